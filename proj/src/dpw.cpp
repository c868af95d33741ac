#include "cmc/dpw.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmc/error.hpp"
#include "cmc/su2.hpp"

namespace cmc {

namespace {

std::string node_name(const DomainGrid& grid, int i, int j) {
  std::ostringstream s;
  s << "node (" << i << ", " << j << ") z = (" << grid.x(i) << ", " << grid.y(j) << ")";
  return s.str();
}

// RK4 with step doubling on Phi' = Phi xi(z(s)) dz/ds for a straight segment.
class Stepper {
 public:
  Stepper(const HolomorphicPotential& xi, const IntegrationOptions& options)
      : eval_(xi, options.regular_tol), opts_(options), n_(options.degree), h_(options.max_step) {
    const int width = 2 * n_ + 1;
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_, &half_, &full_, &two_}) v->resize(width);
  }

  double spill() const { return spill_; }
  long steps() const { return steps_; }

  // Advances y (coefficients -N..N) from za to zb.
  void advance(std::vector<Mat2>& y, cplx za, cplx zb) {
    const double length = std::abs(zb - za);
    if (length == 0.0) return;
    const cplx dir = (zb - za) / length;
    double s = 0.0;
    while (s < length) {
      double h = std::min(h_, length - s);
      const bool last = (h == length - s);
      rk4(y, za, dir, s, h, full_);
      rk4(y, za, dir, s, 0.5 * h, half_);
      rk4(half_, za, dir, s + 0.5 * h, 0.5 * h, two_);
      double err = 0.0, scale = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) {
        err = std::max(err, (two_[k] - full_[k]).cwiseAbs().maxCoeff());
        scale = std::max(scale, y[k].cwiseAbs().maxCoeff());
      }
      err /= 15.0;
      const double allowed = opts_.tol * std::max(1.0, scale);
      const double factor = err > 0.0 ? 0.9 * std::pow(allowed / err, 0.2) : 4.0;
      if (err <= allowed) {
        for (std::size_t k = 0; k < y.size(); ++k) y[k] = two_[k] + (two_[k] - full_[k]) / 15.0;
        s = last ? length : s + h;
        ++steps_;
        h_ = std::min(opts_.max_step, h * std::clamp(factor, 1.0, 4.0));
      } else {
        h_ = h * std::clamp(factor, 0.1, 0.9);
        if (h_ < opts_.min_step) {
          throw Error(ErrorKind::StepFailure, "integration step fell below the minimum",
                      "z = (" + std::to_string((za + s * dir).real()) + ", " +
                          std::to_string((za + s * dir).imag()) + ")");
        }
      }
    }
  }

 private:
  // out = (Phi * xi(z)) dz/ds, truncated to modes -N..N.
  void derivative(const std::vector<Mat2>& y, cplx z, cplx dir, std::vector<Mat2>& out) {
    eval_.evaluate(z, modes_);
    const int lo = eval_.lowest_mode();
    for (Mat2& m : modes_) m *= dir;
    for (Mat2& o : out) o.setZero();
    for (int m = lo; m <= eval_.highest_mode(); ++m) {
      const Mat2& a = modes_[m - lo];
      if (a.isZero(0.0)) continue;
      for (int j = -n_; j <= n_; ++j) {
        const int k = j + m;
        const Mat2& p = y[j + n_];
        if (k < -n_ || k > n_) {
          spill_ = std::max(spill_, (p * a).norm());
          continue;
        }
        out[k + n_].noalias() += p * a;
      }
    }
  }

  void rk4(const std::vector<Mat2>& y, cplx za, cplx dir, double s, double h, std::vector<Mat2>& out) {
    const std::size_t w = y.size();
    derivative(y, za + s * dir, dir, k1_);
    for (std::size_t k = 0; k < w; ++k) tmp_[k] = y[k] + (0.5 * h) * k1_[k];
    derivative(tmp_, za + (s + 0.5 * h) * dir, dir, k2_);
    for (std::size_t k = 0; k < w; ++k) tmp_[k] = y[k] + (0.5 * h) * k2_[k];
    derivative(tmp_, za + (s + 0.5 * h) * dir, dir, k3_);
    for (std::size_t k = 0; k < w; ++k) tmp_[k] = y[k] + h * k3_[k];
    derivative(tmp_, za + (s + h) * dir, dir, k4_);
    for (std::size_t k = 0; k < w; ++k) out[k] = y[k] + (h / 6.0) * (k1_[k] + 2.0 * k2_[k] + 2.0 * k3_[k] + k4_[k]);
  }

  PotentialEvaluator eval_;
  IntegrationOptions opts_;
  int n_;
  double h_;
  double spill_ = 0.0;
  long steps_ = 0;
  std::vector<Mat2> modes_;
  std::vector<Mat2> k1_, k2_, k3_, k4_, tmp_, half_, full_, two_;
};

std::vector<Mat2> identity_coeffs(int n) {
  std::vector<Mat2> y(2 * n + 1, Mat2::Zero());
  y[n] = Mat2::Identity();
  return y;
}

TwistedLoop to_loop(const std::vector<Mat2>& y, int n) {
  TwistedLoop l(n);
  for (int k = -n; k <= n; ++k) l.at(k) = y[k + n];
  l.enforce_twisting();
  return l;
}

}  // namespace

FrameGrid integrate_frame(const HolomorphicPotential& xi, const DomainGrid& grid, const IntegrationOptions& options) {
  grid.validate();
  if (options.degree < 1) throw Error(ErrorKind::ConfigError, "frame truncation degree must be positive");
  const int n = options.degree;
  Stepper stepper(xi, options);
  FrameGrid out;
  out.values.resize(grid.size());

  const int i0 = grid.base_column();
  const int j0 = grid.axis_row();
  std::vector<std::vector<Mat2>> axis(grid.nx);
  axis[i0] = identity_coeffs(n);

  auto guarded = [&](int i, int j, auto&& step) {
    try {
      step();
    } catch (const Error& e) {
      throw e.annotated(node_name(grid, i, j) + (e.where().empty() ? "" : "; " + e.where()));
    }
  };

  for (int dir : {+1, -1}) {
    std::vector<Mat2> y = axis[i0];
    for (int i = i0 + dir; i >= 0 && i < grid.nx; i += dir) {
      guarded(i, j0, [&] { stepper.advance(y, grid.z(i - dir, j0), grid.z(i, j0)); });
      axis[i] = y;
    }
  }
  for (int i = 0; i < grid.nx; ++i) {
    out.values[grid.index(i, j0)] = to_loop(axis[i], n);
    for (int dir : {+1, -1}) {
      std::vector<Mat2> y = axis[i];
      for (int j = j0 + dir; j >= 0 && j < grid.ny; j += dir) {
        guarded(i, j, [&] { stepper.advance(y, grid.z(i, j - dir), grid.z(i, j)); });
        out.values[grid.index(i, j)] = to_loop(y, n);
      }
    }
  }
  out.spill = stepper.spill();
  out.steps = stepper.steps();
  return out;
}

TwistedLoop integrate_path(const HolomorphicPotential& xi, const std::vector<cplx>& vertices,
                           const IntegrationOptions& options) {
  if (vertices.empty()) throw std::invalid_argument("integration path needs a start point");
  Stepper stepper(xi, options);
  std::vector<Mat2> y = identity_coeffs(options.degree);
  for (std::size_t k = 1; k < vertices.size(); ++k) stepper.advance(y, vertices[k - 1], vertices[k]);
  return to_loop(y, options.degree);
}

Vec3 sym_bobenko(const TwistedLoop& F, cplx lambda0, double H) {
  const Mat2 f = loop_eval(F, lambda0);
  const double unitarity = (f.adjoint() * f - Mat2::Identity()).norm();
  if (unitarity > 1e-6) {
    throw Error(ErrorKind::NonUnitaryFrame, "frame is not unitary at lambda0 (defect " + std::to_string(unitarity) + ")");
  }
  const Mat2 finv = f.inverse();
  const Mat2 x = f * su2_basis(2) * finv + cplx(0.0, 2.0) * lambda0 * loop_dlambda_eval(F, lambda0) * finv;
  if (su2_defect(x) > 1e-8 * (1.0 + x.norm())) {
    throw Error(ErrorKind::NonUnitaryFrame, "Sym bracket is not in su(2) (defect " + std::to_string(su2_defect(x)) + ")");
  }
  return -from_su2(x) / (2.0 * H);
}

Vec3 frame_normal(const TwistedLoop& F, cplx lambda0) {
  const Mat2 f = loop_eval(F, lambda0);
  const double unitarity = (f.adjoint() * f - Mat2::Identity()).norm();
  if (unitarity > 1e-6) throw Error(ErrorKind::NonUnitaryFrame, "frame is not unitary at lambda0");
  return from_su2(f * su2_basis(2) * f.inverse()).normalized();
}

std::vector<Vec3> normal_field(const std::vector<TwistedLoop>& frames, cplx lambda0) {
  std::vector<Vec3> out;
  out.reserve(frames.size());
  for (const TwistedLoop& f : frames) out.push_back(frame_normal(f, lambda0));
  return out;
}

SurfaceGrid build_surface(const HolomorphicPotential& xi, double H, const DomainGrid& grid,
                          const SurfaceOptions& options, const Placement& placement) {
  if (!(std::isfinite(H) && H != 0.0)) throw Error(ErrorKind::InvalidData, "H must be a nonzero real");
  if (std::abs(std::abs(options.lambda0) - 1.0) > kCircleTolerance) {
    throw Error(ErrorKind::OffCircle, "lambda0 must be unimodular");
  }
  FrameGrid phi = integrate_frame(xi, grid, options.integration);

  SurfaceGrid out;
  out.domain = grid;
  out.points.resize(grid.size());
  out.normals.resize(grid.size());
  if (options.keep_frames) out.frames.emplace(grid.size());
  out.meta.H = H;
  out.meta.lambda0 = options.lambda0;
  out.meta.degree = options.integration.degree;
  out.meta.fact_tol = options.iwasawa.fact_tol;
  out.meta.unit_tol = options.iwasawa.unit_tol;

  std::vector<Vec3> sym(grid.size());
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t idx = grid.index(i, j);
      try {
        // Modes below round-off only cost time in the splitting.
        const TwistedLoop& g = phi.values[idx];
        IwasawaResult r = iwasawa(g.resized(std::max(2, effective_degree(g))), options.iwasawa);
        sym[idx] = sym_bobenko(r.F, options.lambda0, H);
        out.normals[idx] = placement.rotation * frame_normal(r.F, options.lambda0);
        if (out.frames) (*out.frames)[idx] = std::move(r.F);
      } catch (const Error& e) {
        throw e.annotated(node_name(grid, i, j));
      }
      phi.values[idx] = TwistedLoop(1);  // release memory early
    }
  }
  const Vec3 base = placement.subtract_base ? sym[grid.index(grid.base_column(), grid.axis_row())] : Vec3::Zero();
  for (std::size_t k = 0; k < sym.size(); ++k) {
    out.points[k] = placement.scale * (placement.rotation * (sym[k] - base) + placement.anchor);
  }
  return out;
}

SurfaceGrid build_surface(const BjoerlingData& data, const DomainGrid& grid, const SurfaceOptions& options) {
  const FrameCurve frame = curve_frame(data);
  const HolomorphicPotential xi = boundary_potential(data);
  Placement p;
  p.subtract_base = true;
  p.rotation = frame.R0;
  p.anchor = data.f0.eval_real(data.x0);
  if (std::abs(grid.x0 - data.x0) > 1e-12) throw Error(ErrorKind::ConfigError, "grid base point differs from x0");
  SurfaceGrid s = build_surface(xi, data.H, grid, options, p);
  s.meta.source = data.name;
  return s;
}

SurfaceGrid family_member(const BjoerlingData& data, double t, const DomainGrid& grid, const SurfaceOptions& options,
                          bool scaled) {
  BjoerlingData base = data;
  base.H = 1.0;
  const FrameCurve frame = curve_frame(base);
  const HolomorphicPotential xi =
      two_parameter_potential(metric_u(base), 2.0 * frame.a, hopf_Q(base, frame), t);
  Placement p;
  p.subtract_base = true;
  p.rotation = frame.R0;
  p.anchor = base.f0.eval_real(base.x0);
  p.scale = scaled ? t : 1.0;
  if (std::abs(grid.x0 - data.x0) > 1e-12) throw Error(ErrorKind::ConfigError, "grid base point differs from x0");
  SurfaceGrid s = build_surface(xi, t, grid, options, p);
  s.meta.H = scaled ? 1.0 : t;
  s.meta.source = data.name + " family t=" + std::to_string(t);
  return s;
}

}  // namespace cmc
