#include "cmc/bjoerling.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cmc/error.hpp"

namespace cmc {

namespace {

const cplx kI(0.0, 1.0);

std::string at_x(double x) { return "x = " + std::to_string(x); }

std::vector<double> sample_points(const Interval& J, int samples) {
  std::vector<double> xs;
  // Open interval: stay half a step away from the ends.
  const double h = (J.b - J.a) / samples;
  for (int k = 0; k < samples; ++k) xs.push_back(J.a + (k + 0.5) * h);
  return xs;
}

void check_regular(const BjoerlingData& data, int samples) {
  const AnalyticVec3 d = data.f0.derivative();
  for (double x : sample_points(data.J, samples)) {
    if (d.eval_real(x).norm() <= 1e-12) throw Error(ErrorKind::NonRegularCurve, "curve derivative vanishes", at_x(x));
  }
}

AnalyticVec3 normalized(const AnalyticVec3& w) { return w.scaled(1.0 / sqrt(dot(w, w))); }

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGaussNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                               0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                 0.2223810344533745, 0.1012285362903763};

}  // namespace

void validate(const BjoerlingData& data, int samples) {
  if (!(std::isfinite(data.H) && data.H != 0.0)) throw Error(ErrorKind::InvalidData, "H must be a nonzero real");
  if (!(data.J.a < data.x0 && data.x0 < data.J.b)) {
    throw Error(ErrorKind::InvalidData, "base point x0 must lie inside J");
  }
  const AnalyticVec3 d = data.f0.derivative();
  for (double x : sample_points(data.J, samples)) {
    const Vec3 fp = d.eval_real(x);
    const Vec3 v = data.v.eval_real(x);
    if (fp.norm() <= 1e-12) throw Error(ErrorKind::NonRegularCurve, "curve derivative vanishes", at_x(x));
    if (v.norm() <= 1e-12) throw Error(ErrorKind::InvalidData, "field v vanishes", at_x(x));
    if (std::abs(v.dot(fp)) > 1e-10 * v.norm() * fp.norm()) {
      throw Error(ErrorKind::InvalidData, "field v is not orthogonal to the curve", at_x(x));
    }
  }
}

AnalyticFn metric_u(const BjoerlingData& data) {
  check_regular(data, 257);
  const AnalyticVec3 d = data.f0.derivative();
  return ln(0.5 * sqrt(dot(d, d)));
}

FrameCurve curve_frame(const BjoerlingData& data) {
  validate(data);
  FrameCurve fc;
  fc.t = normalized(data.f0.derivative());
  fc.v = normalized(data.v);
  fc.n = cross(fc.t, fc.v);
  fc.a = cplx(0.0, 0.5) * dot(fc.v, fc.t.derivative());
  fc.b = 0.5 * (dot(fc.t, fc.n.derivative()) - kI * dot(fc.n, fc.v.derivative()));
  fc.x0 = data.x0;
  fc.R0.col(0) = fc.t.eval_real(data.x0);
  fc.R0.col(1) = fc.v.eval_real(data.x0);
  fc.R0.col(2) = fc.n.eval_real(data.x0);
  return fc;
}

Mat3 FrameCurve::rotation_at(double x) const {
  Mat3 r;
  r.col(0) = t.eval_real(x);
  r.col(1) = v.eval_real(x);
  r.col(2) = n.eval_real(x);
  return R0.transpose() * r;
}

Mat2 FrameCurve::frame_at(double x, double max_step) const { return sample({x}, max_step).front(); }

std::vector<Mat2> FrameCurve::sample(const std::vector<double>& xs, double max_step) const {
  if (!std::is_sorted(xs.begin(), xs.end())) throw std::invalid_argument("frame sample points must be sorted");
  std::vector<Mat2> out(xs.size());

  auto mc_norm = [this](double x) {
    const double ea = std::abs(a.eval_complex(x));
    const double eb = std::abs(b.eval_complex(x));
    return std::sqrt(2.0 * (ea * ea + eb * eb));
  };

  // Walks from x0 towards each requested point in one direction.
  auto walk = [&](int first, int last, int dir) {
    double x = x0;
    Mat2 f = Mat2::Identity();
    double rate = mc_norm(x);
    for (int k = first; k != last; k += dir) {
      const double target = xs[k];
      while (x != target) {
        double next = target;
        if (max_step > 0.0 && std::abs(target - x) > max_step) next = x + dir * max_step;
        const Mat2 g = su2_from_rotation(rotation_at(next), f);
        const double next_rate = mc_norm(next);
        // The closer of the two lifts is only trustworthy for small turns.
        const double turn = std::abs(next - x) * std::max(rate, next_rate);
        if (turn > 1.0 || (g - f).norm() > 2.0 * turn + 1e-9) {
          throw Error(ErrorKind::FrameDiscontinuity,
                      "frame lift jumps between samples; refine the sampling", at_x(next));
        }
        f = g;
        x = next;
        rate = next_rate;
      }
      out[k] = f;
    }
  };

  const int n_pts = static_cast<int>(xs.size());
  const int split = static_cast<int>(std::lower_bound(xs.begin(), xs.end(), x0) - xs.begin());
  walk(split, n_pts, +1);
  walk(split - 1, -1, -1);
  return out;
}

AnalyticFn u_z_along(const BjoerlingData& data, const FrameCurve& frame) {
  return frame.a + 0.5 * metric_u(data).derivative();
}

AnalyticFn hopf_Q(const BjoerlingData& data, const FrameCurve& frame) {
  const AnalyticFn eu = exp(metric_u(data));
  return -2.0 * eu * (frame.b.conj_extension() + data.H * eu);
}

HolomorphicPotential boundary_potential(const BjoerlingData& data) {
  const FrameCurve frame = curve_frame(data);
  const AnalyticFn eu = exp(metric_u(data));
  const AnalyticFn emu = 1.0 / eu;
  const AnalyticFn Q = hopf_Q(data, frame);
  const double H = data.H;

  HolomorphicPotential xi(-1, 1);
  xi.set(-1, 0, 1, -H * eu);
  xi.set(-1, 1, 0, 0.5 * Q * emu);
  xi.set(0, 0, 0, frame.a);
  xi.set(0, 1, 1, -frame.a);
  xi.set(1, 0, 1, -0.5 * Q.conj_extension() * emu);
  xi.set(1, 1, 0, H * eu);

  std::vector<cplx> probes;
  for (double x : sample_points(data.J, 5)) probes.emplace_back(x);
  xi.check_invariants(probes);
  return xi;
}

HolomorphicPotential two_parameter_potential(const AnalyticFn& u0, const AnalyticFn& eta0, const AnalyticFn& Q,
                                             double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidData, "family parameter t must be positive");
  const AnalyticFn eu = exp(u0);
  const AnalyticFn emu = 1.0 / eu;
  HolomorphicPotential xi(-1, 1);
  xi.set(-1, 0, 1, -t * eu);
  xi.set(-1, 1, 0, (1.0 - t) * eu + 0.5 * Q * emu);
  xi.set(0, 0, 0, 0.5 * eta0);
  xi.set(0, 1, 1, -0.5 * eta0);
  xi.set(1, 0, 1, -((1.0 - t) * eu + 0.5 * Q.conj_extension() * emu));
  xi.set(1, 1, 0, t * eu);
  return xi;
}

SurfaceGrid schwarz_minimal(const AnalyticVec3& f0, const AnalyticVec3& n, const DomainGrid& grid) {
  grid.validate();
  const AnalyticVec3 df = f0.derivative();
  const AnalyticVec3 w = cross(n, df);
  std::vector<AnalyticFn> fns;
  for (int k = 0; k < 3; ++k) fns.push_back(f0[k]);
  for (int k = 0; k < 3; ++k) fns.push_back(df[k]);
  for (int k = 0; k < 3; ++k) fns.push_back(w[k]);
  const CompiledFns compiled(fns);

  std::array<cplx, 9> buf;
  auto eval = [&](cplx z) {
    compiled.evaluate(z, buf);
    return buf;
  };
  auto integrand = [&](double x, double s) {
    const auto v = eval(cplx(x, s));
    return Vec3(v[6].real(), v[7].real(), v[8].real());
  };

  SurfaceGrid out;
  out.domain = grid;
  out.points.resize(grid.size());
  out.normals.resize(grid.size());
  out.meta.H = 0.0;
  out.meta.source = "schwarz";

  const int j0 = grid.axis_row();
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    for (int dir : {+1, -1}) {
      Vec3 acc = Vec3::Zero();
      for (int j = j0; j >= 0 && j < grid.ny; j += dir) {
        const double y = grid.y(j);
        if (j != j0) {
          const double y_prev = grid.y(j - dir);
          const double mid = 0.5 * (y + y_prev);
          const double half = 0.5 * (y - y_prev);
          for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
            acc += kGaussWeights[q] * half * integrand(x, mid + half * kGaussNodes[q]);
          }
        }
        const auto v = eval(cplx(x, y));
        const std::size_t idx = grid.index(i, j);
        out.points[idx] = Vec3(v[0].real(), v[1].real(), v[2].real()) + acc;
        // f = Re Phi with Phi' = f0' - i (n x f0'): f_x = Re Phi', f_y = -Im Phi'.
        Vec3 fx, fy;
        for (int k = 0; k < 3; ++k) {
          const cplx d = v[3 + k] - kI * v[6 + k];
          fx(k) = d.real();
          fy(k) = -d.imag();
        }
        out.normals[idx] = fx.cross(fy).normalized();
      }
    }
  }
  return out;
}

}  // namespace cmc
