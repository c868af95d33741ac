#include "cmc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmc/error.hpp"

namespace cmc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kD1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
constexpr double kD2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
constexpr double kD1Low[5] = {0.0, -0.5, 0.0, 0.5, 0.0};
constexpr double kD2Low[5] = {0.0, 1.0, -2.0, 1.0, 0.0};

struct Jet {
  Vec3 fx, fy, fxx, fyy, fxy;
};

template <class T, class Get>
T stencil_x(const double (&c)[5], Get&& get, int i, int j) {
  T acc = get(i - 2, j) * c[0];
  for (int a = 1; a < 5; ++a) acc += get(i + a - 2, j) * c[a];
  return acc;
}

template <class T, class Get>
T stencil_y(const double (&c)[5], Get&& get, int i, int j) {
  T acc = get(i, j - 2) * c[0];
  for (int b = 1; b < 5; ++b) acc += get(i, j + b - 2) * c[b];
  return acc;
}

template <class T, class Get>
T stencil_xy(const double (&c)[5], Get&& get, int i, int j) {
  T acc = get(i, j) * 0.0;
  for (int a = 0; a < 5; ++a) {
    if (c[a] == 0.0) continue;
    for (int b = 0; b < 5; ++b) {
      if (c[b] == 0.0) continue;
      acc += get(i + a - 2, j + b - 2) * (c[a] * c[b]);
    }
  }
  return acc;
}

Jet jet(const SurfaceGrid& s, int i, int j, bool low) {
  const DomainGrid& d = s.domain;
  auto p = [&](int a, int b) -> Vec3 { return s.point(a, b); };
  const double hx = d.hx(), hy = d.hy();
  const auto& d1 = low ? kD1Low : kD1;
  const auto& d2 = low ? kD2Low : kD2;
  Jet out;
  out.fx = stencil_x<Vec3>(d1, p, i, j) / hx;
  out.fy = stencil_y<Vec3>(d1, p, i, j) / hy;
  out.fxx = stencil_x<Vec3>(d2, p, i, j) / (hx * hx);
  out.fyy = stencil_y<Vec3>(d2, p, i, j) / (hy * hy);
  out.fxy = stencil_xy<Vec3>(d1, p, i, j) / (hx * hy);
  return out;
}

double form_ratio_H(const Jet& t) {
  const Vec3 n = t.fx.cross(t.fy).normalized();
  const double E = t.fx.dot(t.fx), F = t.fx.dot(t.fy), G = t.fy.dot(t.fy);
  const double e = t.fxx.dot(n), f = t.fxy.dot(n), g = t.fyy.dot(n);
  return (e * G - 2.0 * f * F + g * E) / (2.0 * (E * G - F * F));
}

}  // namespace

Stats summarize(std::span<const double> values, std::span<const unsigned char> valid) {
  std::vector<double> v;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (valid[k] && std::isfinite(values[k])) v.push_back(std::abs(values[k]));
  }
  Stats s;
  s.count = static_cast<int>(v.size());
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / v.size();
  auto quantile = [&v](double q) {
    const std::size_t k = static_cast<std::size_t>(q * (v.size() - 1));
    std::nth_element(v.begin(), v.begin() + k, v.end());
    return v[k];
  };
  s.p50 = quantile(0.5);
  s.p95 = quantile(0.95);
  s.max = *std::max_element(v.begin(), v.end());
  return s;
}

std::vector<double> GeometryReport::u() const {
  std::vector<double> out(E.size(), kNaN);
  for (std::size_t k = 0; k < E.size(); ++k) {
    if (valid[k]) out[k] = 0.5 * std::log((E[k] + G[k]) / 8.0);
  }
  return out;
}

GeometryReport fundamental_forms(const SurfaceGrid& surface, const VerifyOptions& options) {
  const DomainGrid& d = surface.domain;
  if (surface.points.size() != d.size()) throw Error(ErrorKind::InvalidData, "point grid does not match its domain");
  GeometryReport r;
  r.domain = d;
  const std::size_t n = d.size();
  r.valid.assign(n, 0);
  for (auto* v : {&r.E, &r.F, &r.G, &r.e, &r.f, &r.g, &r.H_form, &r.H_lap, &r.K, &r.conformality, &r.normal_defect}) {
    v->assign(n, kNaN);
  }
  r.Q.assign(n, cplx(kNaN, kNaN));
  const bool have_normals = surface.normals.size() == n;

  std::vector<double> cross(n, kNaN), coarse(n, kNaN);
  double h_scale = 1.0;
  for (int j = r.margin; j < d.ny - r.margin; ++j) {
    for (int i = r.margin; i < d.nx - r.margin; ++i) {
      const std::size_t k = d.index(i, j);
      const Jet t = jet(surface, i, j, false);
      const Vec3 nrm = t.fx.cross(t.fy).normalized();
      const double E = t.fx.dot(t.fx), F = t.fx.dot(t.fy), G = t.fy.dot(t.fy);
      const double e = t.fxx.dot(nrm), f = t.fxy.dot(nrm), g = t.fyy.dot(nrm);
      const double det = E * G - F * F;
      r.valid[k] = 1;
      r.E[k] = E;
      r.F[k] = F;
      r.G[k] = G;
      r.e[k] = e;
      r.f[k] = f;
      r.g[k] = g;
      r.H_form[k] = (e * G - 2.0 * f * F + g * E) / (2.0 * det);
      r.H_lap[k] = (t.fxx + t.fyy).dot(nrm) / (E + G);
      r.K[k] = (e * g - f * f) / det;
      const Vec3 fzz_re = 0.25 * (t.fxx - t.fyy);
      const Vec3 fzz_im = -0.5 * t.fxy;
      r.Q[k] = cplx(nrm.dot(fzz_re), nrm.dot(fzz_im));
      r.conformality[k] = std::max(std::abs(E - G), 2.0 * std::abs(F)) / (E + G);
      if (have_normals) {
        const Vec3& m = surface.normals[k];
        r.normal_defect[k] = std::abs(m.dot(t.fx)) / t.fx.norm() + std::abs(m.dot(t.fy)) / t.fy.norm();
      }
      cross[k] = r.H_form[k] - r.H_lap[k];
      h_scale = std::max(h_scale, std::abs(r.H_form[k]));
      if (options.coarse_check) coarse[k] = r.H_form[k] - form_ratio_H(jet(surface, i, j, true));
    }
  }
  r.H_stats = summarize(r.H_form, r.valid);
  r.H_lap_stats = summarize(r.H_lap, r.valid);
  r.K_stats = summarize(r.K, r.valid);
  std::vector<double> qa(n);
  for (std::size_t k = 0; k < n; ++k) qa[k] = std::abs(r.Q[k]);
  r.Q_abs_stats = summarize(qa, r.valid);
  r.conformality_stats = summarize(r.conformality, r.valid);
  r.normal_stats = summarize(r.normal_defect, r.valid);
  r.cross_check = summarize(cross, r.valid).max;
  if (options.coarse_check) {
    r.coarse_check = summarize(coarse, r.valid).max;
    if (r.coarse_check > options.coarse_tol * h_scale) {
      throw Error(ErrorKind::GridTooCoarse, "second- and fourth-order curvature estimates disagree by " +
                                                std::to_string(r.coarse_check) + "; refine the grid");
    }
  }
  return r;
}

double cmc_residual(const GeometryReport& report, double H) {
  std::vector<double> dev(report.H_form.size());
  for (std::size_t k = 0; k < dev.size(); ++k) dev[k] = report.H_form[k] - H;
  return summarize(dev, report.valid).max;
}

double cmc_residual(const SurfaceGrid& surface, double H) { return cmc_residual(fundamental_forms(surface), H); }

CompatibilityResidual gauss_codazzi_residual(const DomainGrid& d, std::span<const double> u, std::span<const cplx> Q,
                                             double H, int margin) {
  if (u.size() != d.size() || Q.size() != d.size()) throw Error(ErrorKind::InvalidData, "grid size mismatch");
  if (d.nx <= 2 * margin || d.ny <= 2 * margin) throw Error(ErrorKind::GridTooCoarse, "grid too small for the margin");
  auto U = [&](int i, int j) { return u[d.index(i, j)]; };
  auto W = [&](int i, int j) { return Q[d.index(i, j)]; };
  const double hx = d.hx(), hy = d.hy();
  CompatibilityResidual r;
  for (int j = margin; j < d.ny - margin; ++j) {
    for (int i = margin; i < d.nx - margin; ++i) {
      const double lap = stencil_x<double>(kD2, U, i, j) / (hx * hx) + stencil_y<double>(kD2, U, i, j) / (hy * hy);
      const double uu = U(i, j);
      const double q2 = std::norm(W(i, j));
      const double gauss = 0.25 * lap + H * H * std::exp(2.0 * uu) - 0.25 * q2 * std::exp(-2.0 * uu);
      const cplx qx = stencil_x<cplx>(kD1, W, i, j) / hx;
      const cplx qy = stencil_y<cplx>(kD1, W, i, j) / hy;
      const cplx qzbar = 0.5 * (qx + cplx(0.0, 1.0) * qy);
      if (!std::isfinite(gauss) || !std::isfinite(std::abs(qzbar))) {
        throw Error(ErrorKind::InvalidData, "u or Q undefined inside the margin");
      }
      r.gauss = std::max(r.gauss, std::abs(gauss));
      r.codazzi = std::max(r.codazzi, std::abs(qzbar));
    }
  }
  return r;
}

CompatibilityResidual gauss_codazzi_residual(const GeometryReport& report, double H) {
  return gauss_codazzi_residual(report.domain, report.u(), report.Q, H, report.margin + 2);
}

double hopf_rotation_check(const GeometryReport& a, const GeometryReport& b, cplx lambda0) {
  if (a.Q.size() != b.Q.size()) throw Error(ErrorKind::InvalidData, "reports cover different grids");
  const cplx rot = 1.0 / (lambda0 * lambda0);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.Q.size(); ++k) {
    if (a.valid[k] && b.valid[k]) worst = std::max(worst, std::abs(a.Q[k] - rot * b.Q[k]));
  }
  return worst;
}

double hopf_rotation_check(const SurfaceGrid& at_lambda0, const SurfaceGrid& at_one, cplx lambda0) {
  return hopf_rotation_check(fundamental_forms(at_lambda0), fundamental_forms(at_one), lambda0);
}

CurveCheck bjoerling_check(const SurfaceGrid& s, const BjoerlingData& data) {
  const DomainGrid& d = s.domain;
  const AnalyticVec3 df = data.f0.derivative();
  const int j0 = d.axis_row();
  CurveCheck c;
  for (int i = 0; i < d.nx; ++i) {
    const double x = d.x(i);
    c.position = std::max(c.position, (s.point(i, j0) - data.f0.eval_real(x)).norm());
    if (s.normals.size() == d.size()) {
      const Vec3& n = s.normal(i, j0);
      c.tangency = std::max({c.tangency, std::abs(n.dot(df.eval_real(x).normalized())),
                             std::abs(n.dot(data.v.eval_real(x).normalized()))});
    }
  }
  return c;
}

}  // namespace cmc
