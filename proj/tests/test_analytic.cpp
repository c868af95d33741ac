#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cmc/analytic.hpp"
#include "cmc/error.hpp"

using namespace cmc;

namespace {

const cplx I(0.0, 1.0);
const AnalyticFn z = AnalyticFn::variable();

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no cmc::Error thrown");
  return ErrorKind::ConfigError;
}

}  // namespace

TEST_CASE("eval_complex examples") {
  const AnalyticFn f = sin(2.0 * z);
  for (double x : {-1.0, 0.0, 0.3, 2.5}) CHECK(std::abs(f.eval_complex(x) - std::sin(2 * x)) < 1e-15);

  CHECK(std::abs((z * z).eval_complex(I) - cplx(-1.0)) == 0.0);

  const AnalyticFn theta = z * z;
  for (double y : {0.1, 0.5, 1.3}) {
    const cplx v = theta.eval_complex(cplx(0.0, y));
    CHECK(v.imag() == 0.0);
    CHECK(v.real() == doctest::Approx(-y * y));
    const AnalyticFn t = taylor_of(theta, 0.0, 8);
    CHECK(std::abs(t.eval_complex(cplx(0.0, y)) - v) < 1e-14);
  }
}

TEST_CASE("eval_real agrees with eval_complex on the real line") {
  const AnalyticFn f = AnalyticFn::parse("exp(z)*cos(3*z) + ln(2+z^2) + sqrt(1+z^2)/cosh(z)");
  for (double x = -2.0; x <= 2.0; x += 0.25) {
    CHECK(std::abs(f.eval_complex(x) - f.eval_real(x)) < 1e-13);
  }
  CHECK(kind_of([&] { (I * z).eval_real(1.0); }) == ErrorKind::InvalidData);
}

TEST_CASE("differentiate examples") {
  CHECK((AnalyticFn(3.5).derivative().is_zero()));
  CHECK((2.0 * z).derivative().constant_value() == cplx(2.0));

  const double c = std::numbers::pi / 8;
  const AnalyticFn theta = c * pow(sin(z), 2.0);
  const AnalyticFn expected = (c * 2.0) * sin(z) * cos(z);
  CHECK(theta.derivative().key() == expected.key());
  for (double x : {0.2, 1.1}) {
    CHECK(std::abs(theta.derivative().eval_complex(x) - 2 * (std::numbers::pi / 16) * 2 * std::cos(x) * std::sin(x)) <
          1e-15);
  }
}

TEST_CASE("derivative matches central differences with second order") {
  const AnalyticFn f = AnalyticFn::parse("sin(z)^3*exp(-z/2) + 1/(3+z) + ln(4+z^2)");
  const AnalyticFn df = f.derivative();
  for (double x : {-0.7, 0.1, 0.9}) {
    double err[2];
    const double hs[2] = {1e-3, 1e-4};
    for (int k = 0; k < 2; ++k) {
      const double h = hs[k];
      const double fd = (f.eval_real(x + h) - f.eval_real(x - h)) / (2 * h);
      err[k] = std::abs(df.eval_real(x) - fd);
    }
    CHECK(err[0] < 1e-5);
    CHECK(std::log10(err[0] / err[1]) >= 1.9);
  }
}

TEST_CASE("taylor_of examples") {
  const auto e = taylor_of(exp(z), 0.0, 5).taylor_data();
  REQUIRE(e);
  const std::vector<double> expected = {1, 1, 0.5, 1.0 / 6, 1.0 / 24};
  REQUIRE(e->coeffs.size() == 5);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(e->coeffs[k] - expected[k]) < 1e-16);
  CHECK(std::isinf(e->radius));

  const auto s = taylor_of(sin(2.0 * z), 0.0, 4).taylor_data();
  REQUIRE(s);
  const std::vector<double> s_expected = {0.0, 2.0, 0.0, -4.0 / 3};
  for (int k = 0; k < 4; ++k) CHECK(std::abs(s->coeffs[k] - s_expected[k]) < 1e-15);

  const AnalyticFn r = taylor_of(1.0 / z, 1.0, 10);
  CHECK(r.taylor_data()->radius == 1.0);
  CHECK(std::abs(r.eval_complex(0.5) - 2.0) < 1e-2);
  CHECK(kind_of([&] { r.eval_complex(0.0); }) == ErrorKind::OutOfDomain);
  CHECK(kind_of([&] { r.eval_complex(cplx(1.0, 1.0)); }) == ErrorKind::OutOfDomain);
  CHECK(std::abs(r.eval_complex(cplx(1.0, 0.999)) - 1.0 / cplx(1.0, 0.999)) < 1.0);

  CHECK(kind_of([&] { taylor_of(1.0 / z, 0.0, 4); }) == ErrorKind::SingularCenter);
  CHECK(kind_of([&] { taylor_of(ln(z), 0.0, 4); }) == ErrorKind::SingularCenter);
}

TEST_CASE("taylor radius detection") {
  auto radius_of = [](const AnalyticFn& t) {
    // Probe the declared disc: evaluation just inside succeeds, just outside fails.
    double lo = 0.0, hi = 100.0;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      try {
        t.eval_complex(cplx(mid, 0.0) + 0.0);
        lo = mid;
      } catch (const Error&) {
        hi = mid;
      }
    }
    return lo;
  };
  CHECK(radius_of(taylor_of(1.0 / z, 1.0, 12)) == doctest::Approx(2.0).epsilon(1e-9));  // x < 1 + r
  CHECK(radius_of(taylor_of(ln(3.0 + 2.0 * z), 0.0, 12)) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(radius_of(taylor_of(exp(z) * sin(z), 0.0, 12)) == doctest::Approx(100.0).epsilon(1e-6));
}

TEST_CASE("tree and Taylor representations agree inside the radius") {
  const AnalyticFn f = AnalyticFn::parse("exp(z)*cos(z) + 1/(2-z)");
  const AnalyticFn t = taylor_of(f, 0.0, 60);
  for (int k = 0; k < 12; ++k) {
    const cplx w = std::polar(0.8, 2 * std::numbers::pi * k / 12);
    CHECK(std::abs(t.eval_complex(w) - f.eval_complex(w)) < 1e-10);
  }
  const AnalyticFn shifted = taylor_of(t, 0.3, 60);
  CHECK(std::abs(shifted.eval_complex(0.5) - f.eval_complex(0.5)) < 1e-10);
}

TEST_CASE("real Taylor data has real coefficients and obeys Schwarz reflection") {
  const AnalyticFn f = AnalyticFn::parse("sin(z)^2*ln(5+z) + cosh(z/3)");
  const AnalyticFn t = taylor_of(f, 0.2, 30);
  CHECK_FALSE(t.has_complex_constants());
  for (cplx w : {cplx(0.3, 0.4), cplx(-1.0, 0.7), cplx(2.0, -0.3)}) {
    CHECK(std::abs(f.eval_complex(std::conj(w)) - std::conj(f.eval_complex(w))) < 1e-12);
  }
}

TEST_CASE("simplifier canonical forms") {
  CHECK((pow(sin(2.0 * z), 2.0) + pow(cos(2.0 * z), 2.0)).constant_value() == cplx(1.0));
  CHECK((-2.0 * pow(cos(z), 2.0) * z - 2.0 * z * pow(sin(z), 2.0)).key() == (-2.0 * z).key());
  CHECK((pow(cosh(z), 2.0) - pow(sinh(z), 2.0)).constant_value() == cplx(1.0));
  CHECK((z + z).key() == (2.0 * z).key());
  CHECK((z * z / z).key() == z.key());
  CHECK(sqrt(AnalyticFn(4.0)).constant_value() == cplx(2.0));
  CHECK(ln(AnalyticFn(1.0)).constant_value() == cplx(0.0));
  CHECK(exp(ln(z)).key() == z.key());
  CHECK((sin(z) * 0.0).is_zero());
  CHECK((AnalyticFn(0.75) - 1.0).constant_value() == cplx(0.75 - 1.0));
  CHECK((3.0 * (z + 1.0)).key() == (3.0 * z + 3.0).key());
}

TEST_CASE("conj extension and substitution") {
  const AnalyticFn f = cplx(1.0, 2.0) * exp(cplx(0.0, 1.0) * z) + 3.0;
  const AnalyticFn g = f.conj_extension();
  for (double x : {-0.4, 0.0, 1.2}) CHECK(std::abs(g.eval_complex(x) - std::conj(f.eval_complex(x))) < 1e-14);
  const AnalyticFn t = taylor_of(f, 0.0, 30).conj_extension();
  CHECK(std::abs(t.eval_complex(0.3) - std::conj(f.eval_complex(0.3))) < 1e-13);

  const AnalyticFn h = sin(z).substitute(2.0 * z + 1.0);
  CHECK(h.key() == sin(2.0 * z + 1.0).key());
  const AnalyticFn taylor_sub = taylor_of(exp(z), 0.0, 25).substitute(z * z);
  CHECK(std::abs(taylor_sub.eval_complex(0.5) - std::exp(0.25)) < 1e-13);
  CHECK(std::abs(taylor_sub.derivative().eval_complex(0.5) - std::exp(0.25)) < 1e-13);
}

TEST_CASE("domain errors") {
  CHECK(kind_of([&] { (1.0 / z).eval_complex(0.0); }) == ErrorKind::OutOfDomain);
  CHECK(kind_of([&] { ln(z).eval_complex(-1.0); }) == ErrorKind::OutOfDomain);
  CHECK(kind_of([&] { sqrt(z).eval_complex(-4.0); }) == ErrorKind::OutOfDomain);
  CHECK(std::abs(sqrt(z).eval_complex(cplx(-4.0, 1e-9)) - cplx(0.0, 2.0)) < 1e-8);
  CHECK(kind_of([&] { ln(z).eval_real(0.0); }) == ErrorKind::OutOfDomain);
}

TEST_CASE("parser and printer round trip") {
  for (const char* text : {"0.3926990817*sin(z)^2", "exp(-z/2)*cosh(3*x) - 2", "1/(1+z^2) + ln(2+z)",
                           "(1+2*i)*z^3 - i", "sqrt(1+z)^(-1) + tan(z)", "2^3*z - pi + e", "-z^-2",
                           "sin(z)^2.5*cos(z)"}) {
    CAPTURE(text);
    const AnalyticFn f = AnalyticFn::parse(text);
    const AnalyticFn g = AnalyticFn::parse(f.to_string());
    CHECK(f.key() == g.key());
    CHECK(std::abs(f.eval_complex(cplx(0.3, 0.1)) - g.eval_complex(cplx(0.3, 0.1))) < 1e-14);
  }
  CHECK(std::abs(AnalyticFn::parse("2^3*z").eval_complex(1.0) - 8.0) == 0.0);
  CHECK(std::abs(AnalyticFn::parse("-z^2").eval_complex(3.0) + 9.0) == 0.0);
  CHECK(std::abs(AnalyticFn::parse("1 - 2 - 3").eval_complex(0.0) + 4.0) == 0.0);
  CHECK(std::abs(AnalyticFn::parse("12/3/2").eval_complex(0.0) - 2.0) == 0.0);

  for (const char* bad : {"", "sin(z", "foo(z)", "z^z", "2 $ 3", "y", "3 4"}) {
    CAPTURE(bad);
    CHECK(kind_of([&] { AnalyticFn::parse(bad); }) == ErrorKind::ParseError);
  }
}

TEST_CASE("compiled tape matches tree evaluation") {
  const std::vector<AnalyticFn> fns = {AnalyticFn::parse("sin(z)^2*exp(z)"), AnalyticFn::parse("exp(z) + sin(z)"),
                                       taylor_of(AnalyticFn::parse("1/(3-z)"), 0.0, 40), AnalyticFn(2.5)};
  const CompiledFns tape(fns);
  std::vector<cplx> out(fns.size());
  for (cplx w : {cplx(0.1, 0.2), cplx(-0.5, 0.9)}) {
    tape.evaluate(w, out);
    for (std::size_t k = 0; k < fns.size(); ++k) CHECK(out[k] == fns[k].eval_complex(w));
  }
}

TEST_CASE("vector helpers") {
  const AnalyticVec3 f = AnalyticVec3::parse({"sin(2*z)", "0", "-cos(2*z)"});
  const AnalyticVec3 df = f.derivative();
  CHECK(dot(df, df).constant_value() == cplx(4.0));
  const AnalyticVec3 e1{{AnalyticFn(1.0), AnalyticFn(0.0), AnalyticFn(0.0)}};
  const AnalyticVec3 e2{{AnalyticFn(0.0), AnalyticFn(1.0), AnalyticFn(0.0)}};
  const AnalyticVec3 e3 = cross(e1, e2);
  CHECK(e3[0].is_zero());
  CHECK(e3[1].is_zero());
  CHECK(e3[2].constant_value() == cplx(1.0));
  const Vec3 p = f.eval_real(0.25);
  CHECK(p.x() == doctest::Approx(std::sin(0.5)));
  CHECK(p.z() == doctest::Approx(-std::cos(0.5)));
}
