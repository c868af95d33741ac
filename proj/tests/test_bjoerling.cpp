#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cmc/bjoerling.hpp"
#include "cmc/error.hpp"

using namespace cmc;

namespace {

const cplx I(0.0, 1.0);

BjoerlingData make(std::array<std::string, 3> f0, std::array<std::string, 3> v, double H, Interval J = {-1.0, 1.0}) {
  BjoerlingData d;
  d.f0 = AnalyticVec3::parse(f0);
  d.v = AnalyticVec3::parse(v);
  d.H = H;
  d.J = J;
  return d;
}

BjoerlingData circle(double H) { return make({"sin(2*x)", "0", "-cos(2*x)"}, {"0", "1", "0"}, H); }

BjoerlingData line(const std::string& theta, double H) {
  return make({"2*x", "0", "0"}, {"0", "cos(" + theta + ")", "sin(" + theta + ")"}, H);
}

// Helix with a field turning against the principal normal; nothing is constant.
BjoerlingData helix() {
  const std::string c = "cos(0.3*x)", s = "sin(0.3*x)";
  return make({"cos(x)", "sin(x)", "x"},
              {"-" + c + "*cos(x) + " + s + "*sin(x)/sqrt(2)", "-" + c + "*sin(x) - " + s + "*cos(x)/sqrt(2)",
               s + "/sqrt(2)"},
              0.6, {-2.0, 2.0});
}

Mat2 mc_matrix(cplx a, cplx b) {
  Mat2 m;
  m << a, b, -std::conj(b), -a;
  return m;
}

bool exactly(const AnalyticFn& f, cplx value) {
  const auto c = f.constant_value();
  return c && *c == value;
}

}  // namespace

TEST_CASE("metric_u examples") {
  CHECK(exactly(metric_u(circle(0.7)), 0.0));
  CHECK(exactly(metric_u(line("0.4", 1.0)), 0.0));
  const BjoerlingData unit = make({"x", "0", "0"}, {"0", "0", "1"}, 1.0);
  CHECK(metric_u(unit).eval_real(0.3) == doctest::Approx(std::log(0.5)));

  const BjoerlingData h = helix();
  const AnalyticFn u = metric_u(h);
  for (double x : {-1.5, 0.0, 0.8}) {
    const double speed = h.f0.derivative().eval_real(x).norm();
    CHECK(4.0 * std::exp(2.0 * u.eval_real(x)) == doctest::Approx(speed * speed));
  }

  const BjoerlingData bad = make({"x^3", "0", "0"}, {"0", "1", "0"}, 1.0);
  try {
    metric_u(bad);
    FAIL("expected NonRegularCurve");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonRegularCurve);
  }
}

TEST_CASE("validation of Bjoerling data") {
  auto kind_of = [](const BjoerlingData& d) {
    try {
      validate(d);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ConfigError;  // stands for "no error"
  };
  CHECK(kind_of(circle(0.5)) == ErrorKind::ConfigError);
  CHECK(kind_of(circle(0.0)) == ErrorKind::InvalidData);
  CHECK(kind_of(make({"x", "0", "0"}, {"1", "1", "0"}, 1.0)) == ErrorKind::InvalidData);
  CHECK(kind_of(make({"x", "0", "0"}, {"0", "0", "0"}, 1.0)) == ErrorKind::InvalidData);
  BjoerlingData off = circle(1.0);
  off.x0 = 2.0;
  CHECK(kind_of(off) == ErrorKind::InvalidData);
}

TEST_CASE("frame along the circle") {
  const FrameCurve fc = curve_frame(circle(0.5));
  CHECK(fc.a.is_zero());
  CHECK(exactly(fc.b, -1.0));
  const std::vector<double> xs = {-0.9, -0.3, 0.0, 0.2, 0.7};
  const std::vector<Mat2> frames = fc.sample(xs);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    Mat2 expect;
    expect << std::cos(xs[k]), -std::sin(xs[k]), std::sin(xs[k]), std::cos(xs[k]);
    CHECK((frames[k] - expect).norm() < 1e-14);
  }
  CHECK((fc.frame_at(0.0) - Mat2::Identity()).norm() == 0.0);
}

TEST_CASE("frame along a line with rotating field") {
  for (const std::string theta : {"0.4", "2*x", "x^2"}) {
    const BjoerlingData d = line(theta, 1.0);
    const FrameCurve fc = curve_frame(d);
    const AnalyticFn th = AnalyticFn::parse(theta);
    const double th0 = th.eval_real(0.0);
    CHECK(fc.a.is_zero());
    for (double x : {-0.8, 0.1, 0.6}) {
      const double t = th.eval_real(x) - th0;
      Mat2 expect;
      expect << std::cos(t / 2), -I * std::sin(t / 2), -I * std::sin(t / 2), std::cos(t / 2);
      CHECK((fc.frame_at(x) - expect).norm() < 1e-13);
      CHECK(std::abs(fc.b.eval_complex(x) + 0.5 * I * th.derivative().eval_real(x)) < 1e-14);
    }
  }
}

TEST_CASE("frame Maurer-Cartan form matches a and b") {
  const BjoerlingData d = helix();
  const FrameCurve fc = curve_frame(d);
  CHECK((fc.frame_at(d.x0) - Mat2::Identity()).norm() == 0.0);
  const double h = 1e-3;
  for (double x : {-1.2, -0.4, 0.5, 1.3}) {
    const std::vector<Mat2> f = fc.sample({x - 2 * h, x - h, x, x + h, x + 2 * h});
    const Mat2 df = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
    const Mat2 mc = f[2].inverse() * df;
    const cplx a = fc.a.eval_complex(x);
    const cplx b = fc.b.eval_complex(x);
    CHECK(std::abs(a.real()) <= 1e-12);
    CHECK((mc - mc_matrix(a, b)).norm() < 1e-9);
    CHECK(std::abs(f[2].determinant() - 1.0) < 1e-13);
  }
}

TEST_CASE("frame lift detects undersampling") {
  const BjoerlingData d = line("12*x", 1.0);
  const FrameCurve fc = curve_frame(d);
  CHECK_NOTHROW(fc.sample({-0.9, 0.4, 0.9}));
  try {
    fc.sample({0.0, 0.4}, 0.0);
    FAIL("expected FrameDiscontinuity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FrameDiscontinuity);
  }
}

TEST_CASE("u_z along the curve") {
  const BjoerlingData c = circle(0.8);
  CHECK(u_z_along(c, curve_frame(c)).is_zero());
  const BjoerlingData l = line("2*x", 0.8);
  CHECK(u_z_along(l, curve_frame(l)).is_zero());

  // Speed-2 circle of radius r with the inward field: u = 0 and a = i/r.
  const double r = 1.6;
  const BjoerlingData s = make({"1.6*cos(1.25*x)", "1.6*sin(1.25*x)", "0"}, {"-cos(1.25*x)", "-sin(1.25*x)", "0"}, 1.0);
  const AnalyticFn uz = u_z_along(s, curve_frame(s));
  CHECK(std::abs(uz.eval_complex(0.3) - I / r) < 1e-14);
  CHECK(std::abs(uz.eval_complex(-0.7) - I / r) < 1e-14);
}

TEST_CASE("Hopf differential along the curve") {
  for (double H : {0.5, 0.75, 1.0, 1.25}) {
    const BjoerlingData c = circle(H);
    CHECK(exactly(hopf_Q(c, curve_frame(c)), 2.0 * (1.0 - H)));
  }
  for (const std::string theta : {"2*x", "x^2", "pi/8*sin(x)^2"}) {
    const double H = 0.9;
    const BjoerlingData l = line(theta, H);
    const AnalyticFn Q = hopf_Q(l, curve_frame(l));
    const AnalyticFn dth = AnalyticFn::parse(theta).derivative();
    for (double x : {-0.5, 0.25}) {
      for (double y : {0.0, 0.3}) {
        const cplx z(x, y);
        CHECK(std::abs(Q.eval_complex(z) - (-I * dth.eval_complex(z) - 2.0 * H)) < 1e-13);
      }
    }
  }
}

TEST_CASE("boundary potential of the circle is exact") {
  for (double H : {0.5, 0.75, 1.0, 1.25, 0.3}) {
    const HolomorphicPotential xi = boundary_potential(circle(H));
    CHECK(xi.lowest_mode() == -1);
    CHECK(xi.highest_mode() == 1);
    CHECK(exactly(xi.entry(-1, 0, 1), -H));
    CHECK(exactly(xi.entry(-1, 1, 0), -(H - 1.0)));
    CHECK(exactly(xi.entry(1, 0, 1), H - 1.0));
    CHECK(exactly(xi.entry(1, 1, 0), H));
    for (int r = 0; r < 2; ++r) {
      CHECK(xi.entry(0, r, r).is_zero());
      CHECK(xi.entry(-1, r, r).is_zero());
      CHECK(xi.entry(1, r, r).is_zero());
    }
  }
}

TEST_CASE("boundary potentials of lines") {
  const double H = 0.7;
  const HolomorphicPotential c = boundary_potential(line("0.3", H));
  CHECK(exactly(c.entry(-1, 0, 1), -H));
  CHECK(exactly(c.entry(-1, 1, 0), -H));
  CHECK(exactly(c.entry(1, 0, 1), H));
  CHECK(exactly(c.entry(1, 1, 0), H));
  CHECK(c.entry(0, 0, 0).is_zero());

  const HolomorphicPotential t = boundary_potential(line("2*x", H));
  CHECK(exactly(t.entry(-1, 0, 1), -H));
  CHECK(exactly(t.entry(-1, 1, 0), cplx(-H, -1.0)));
  CHECK(exactly(t.entry(1, 0, 1), cplx(H, -1.0)));
  CHECK(exactly(t.entry(1, 1, 0), H));
}

TEST_CASE("boundary potential restricts to the frame's Maurer-Cartan form") {
  const BjoerlingData d = helix();
  const FrameCurve fc = curve_frame(d);
  const HolomorphicPotential xi = boundary_potential(d);
  const AnalyticFn u = metric_u(d);
  const AnalyticFn Q = hopf_Q(d, fc);
  for (double x : {-1.5, 0.2, 1.1}) {
    const std::vector<Mat2> m = xi.evaluate(x);
    const Mat2 at_one = m[0] + m[1] + m[2];
    CHECK((at_one - mc_matrix(fc.a.eval_complex(x), fc.b.eval_complex(x))).norm() < 1e-10);
    const double eu = std::exp(u.eval_real(x));
    CHECK(std::abs(m[0](0, 1) + d.H * eu) < 1e-10);
    CHECK(std::abs(2.0 * m[0](1, 0) * eu - Q.eval_complex(x)) < 1e-10);
    CHECK(std::abs(m[2](0, 1) + 0.5 * std::conj(Q.eval_complex(x)) / eu) < 1e-10);
  }
  // Off the axis the entries are holomorphic: conj symmetry z <-> conj(z).
  const cplx z(0.4, 0.3);
  const std::vector<Mat2> up = xi.evaluate(z);
  const std::vector<Mat2> down = xi.evaluate(std::conj(z));
  CHECK(std::abs(up[2](0, 1) - std::conj(-0.5 * Q.eval_complex(std::conj(z)) /
                                         std::exp(u.eval_complex(std::conj(z))))) < 1e-12);
  CHECK(std::abs(down[0](0, 1) - std::conj(up[0](0, 1))) < 1e-12);
}

TEST_CASE("boundary potential is invariant under the frame sign") {
  // Reversing v flips n; the frame changes, but a lifted -F0 would not change a, b, u.
  const BjoerlingData d = helix();
  const HolomorphicPotential xi = boundary_potential(d);
  const FrameCurve fc = curve_frame(d);
  for (double x : {-0.6, 0.9}) {
    const Mat2 f = fc.frame_at(x);
    const Mat3 r = rotation_of(-f);
    CHECK((r - fc.rotation_at(x)).norm() < 1e-12);
  }
  CHECK(xi.entry(0, 0, 0).key() == fc.a.key());
}

TEST_CASE("two-parameter family from sphere data") {
  const AnalyticFn zero;
  for (double t : {0.5, 0.75, 1.0}) {
    const HolomorphicPotential xi = two_parameter_potential(zero, zero, zero, t);
    const HolomorphicPotential ref = boundary_potential(circle(t));
    for (int m = -1; m <= 1; ++m) {
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
          const cplx a = xi.entry(m, r, c).eval_complex(0.3);
          const cplx b = ref.entry(m, r, c).eval_complex(0.3);
          CHECK(std::abs(a - b) == 0.0);
        }
      }
    }
    // Q_t / 2 sits in the lower-left lambda^{-1} entry.
    CHECK(exactly(xi.entry(-1, 1, 0), 1.0 - t));
  }
  CHECK(exactly(two_parameter_potential(zero, zero, zero, 0.5).entry(-1, 1, 0), 0.5));
}

TEST_CASE("two-parameter family at t = 1 is the boundary potential") {
  BjoerlingData d = helix();
  d.H = 1.0;
  const FrameCurve fc = curve_frame(d);
  const AnalyticFn u = metric_u(d);
  const AnalyticFn eta = 2.0 * fc.a;
  const HolomorphicPotential xi = two_parameter_potential(u, eta, hopf_Q(d, fc), 1.0);
  const HolomorphicPotential ref = boundary_potential(d);
  for (cplx z : {cplx(0.2, 0.0), cplx(-0.5, 0.2)}) {
    const std::vector<Mat2> a = xi.evaluate(z);
    const std::vector<Mat2> b = ref.evaluate(z);
    for (int k = 0; k < 3; ++k) CHECK((a[k] - b[k]).norm() < 1e-13);
  }
  for (double t : {0.4, 1.7}) {
    BjoerlingData dt = d;
    dt.H = t;
    const HolomorphicPotential xt = two_parameter_potential(u, eta, hopf_Q(d, fc), t);
    const std::vector<Mat2> a = xt.evaluate(cplx(0.3, 0.1));
    const std::vector<Mat2> b = boundary_potential(dt).evaluate(cplx(0.3, 0.1));
    for (int k = 0; k < 3; ++k) CHECK((a[k] - b[k]).norm() < 1e-13);
  }
}

TEST_CASE("Schwarz formula: plane and catenoid") {
  DomainGrid g;
  g.x_min = -1.0;
  g.x_max = 1.0;
  g.y_max = 0.5;
  g.nx = 21;
  g.ny = 11;

  const SurfaceGrid plane =
      schwarz_minimal(AnalyticVec3::parse({"x", "0", "0"}), AnalyticVec3::parse({"0", "0", "1"}), g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      CHECK((plane.point(i, j) - Vec3(g.x(i), g.y(j), 0.0)).norm() < 1e-14);
      CHECK((plane.normal(i, j) - Vec3(0.0, 0.0, 1.0)).norm() < 1e-14);
    }
  }

  const AnalyticVec3 f0 = AnalyticVec3::parse({"cos(x)", "sin(x)", "0"});
  const SurfaceGrid cat = schwarz_minimal(f0, f0, g);
  const int j0 = g.axis_row();
  for (int i = 0; i < g.nx; ++i) CHECK((cat.point(i, j0) - f0.eval_real(g.x(i))).norm() == 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i), y = g.y(j);
      const Vec3 expect(std::cos(x) * std::cosh(y), std::sin(x) * std::cosh(y), y);
      CHECK((cat.point(i, j) - expect).norm() < 1e-13);
      const Vec3 n = Vec3(std::cos(x), std::sin(x), -std::sinh(y)) / std::cosh(y);
      CHECK((cat.normal(i, j) - n).norm() < 1e-13);
    }
  }
}
