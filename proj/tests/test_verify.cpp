#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "cmc/dpw.hpp"
#include "cmc/error.hpp"
#include "cmc/verify.hpp"

using namespace cmc;

namespace {

DomainGrid grid(int nx, int ny, double xr, double yr) {
  DomainGrid g;
  g.x_min = -xr;
  g.x_max = xr;
  g.y_max = yr;
  g.nx = nx;
  g.ny = ny;
  return g;
}

SurfaceGrid sample(const DomainGrid& g, const std::function<Vec3(double, double)>& f) {
  SurfaceGrid s;
  s.domain = g;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) s.points.push_back(f(g.x(i), g.y(j)));
  }
  return s;
}

Vec3 cylinder(double x, double y) { return -0.5 * Vec3(4.0 * x, std::sin(4.0 * y), std::cos(4.0 * y)); }
Vec3 sphere(double x, double y) { return Vec3(std::cos(y) / std::cosh(x), std::sin(y) / std::cosh(x), std::tanh(x)); }

BjoerlingData circle(double H) {
  BjoerlingData d;
  d.f0 = AnalyticVec3::parse({"sin(2*x)", "0", "-cos(2*x)"});
  d.v = AnalyticVec3::parse({"0", "1", "0"});
  d.H = H;
  return d;
}

const DomainGrid kPipe = grid(81, 33, 0.4, 0.16);

}  // namespace

TEST_CASE("cylinder and sphere grids") {
  const GeometryReport c = fundamental_forms(sample(grid(61, 41, 0.6, 0.4), cylinder));
  CHECK(cmc_residual(c, 1.0) <= 1e-4);
  CHECK(c.K_stats.max <= 1e-3);
  CHECK(c.conformality_stats.max < 1e-5);
  CHECK(c.cross_check < 1e-5);
  const CompatibilityResidual cc = gauss_codazzi_residual(c, 1.0);
  CHECK(cc.gauss <= 1e-3);
  CHECK(cc.codazzi <= 1e-3);
  // f_zz = -f_yy / 4 and f_yy = -16 (f - axis): Q = -2.
  const std::size_t mid = c.domain.index(30, 20);
  CHECK(std::abs(c.Q[mid] - cplx(-2.0, 0.0)) < 1e-6);

  const GeometryReport s = fundamental_forms(sample(grid(61, 41, 0.6, 0.4), sphere));
  CHECK(std::abs(s.H_stats.mean - 1.0) <= 1e-5);
  CHECK(s.H_stats.max - 1.0 <= 1e-5);
  CHECK(std::abs(s.K_stats.p50 - 1.0) <= 1e-5);
  CHECK(s.Q_abs_stats.max <= 1e-6);
  CHECK(gauss_codazzi_residual(s, -1.0).gauss <= 1e-3);
}

TEST_CASE("fourth-order convergence on the sphere") {
  auto residual = [](int n) {
    const GeometryReport r = fundamental_forms(sample(grid(2 * n + 1, n + 1, 0.8, 0.5), sphere));
    double worst = 0.0;
    for (std::size_t k = 0; k < r.H_form.size(); ++k) {
      if (r.valid[k]) worst = std::max(worst, std::abs(std::abs(r.H_form[k]) - 1.0));
    }
    return worst;
  };
  const double coarse = residual(20), fine = residual(40);
  CHECK(coarse / fine >= std::pow(2.0, 1.8));
}

TEST_CASE("coarse grids are rejected") {
  try {
    fundamental_forms(sample(grid(9, 7, 3.0, 3.0), sphere));
    FAIL("expected GridTooCoarse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GridTooCoarse);
  }
  VerifyOptions lax;
  lax.coarse_check = false;
  CHECK_NOTHROW(fundamental_forms(sample(grid(9, 7, 3.0, 3.0), sphere), lax));
}

TEST_CASE("perturbed surfaces fail the compatibility equations") {
  const SurfaceGrid s = sample(grid(61, 41, 0.6, 0.4), cylinder);
  SurfaceGrid noisy = s;
  std::mt19937 rng(3);
  std::normal_distribution<double> g(0.0, 1e-2);
  for (Vec3& p : noisy.points) p += Vec3(g(rng), g(rng), g(rng));
  VerifyOptions lax;
  lax.coarse_check = false;
  const CompatibilityResidual a = gauss_codazzi_residual(fundamental_forms(s), 1.0);
  const CompatibilityResidual b = gauss_codazzi_residual(fundamental_forms(noisy, lax), 1.0);
  CHECK(b.gauss >= 10.0 * std::max(a.gauss, 1e-6));
  CHECK(b.codazzi >= 10.0 * std::max(a.codazzi, 1e-6));
  CHECK(cmc_residual(fundamental_forms(noisy, lax), 1.0) > 1.0);
}

TEST_CASE("pipeline surfaces are CMC") {
  SUBCASE("Delaunay member H = 0.7") {
    const SurfaceGrid s = build_surface(circle(0.7), kPipe);
    const GeometryReport r = fundamental_forms(s);
    CHECK(cmc_residual(r, 0.7) <= 1e-3);
    const int j0 = kPipe.axis_row();
    for (int i = 2; i < kPipe.nx - 2; ++i) CHECK(std::abs(r.Q[kPipe.index(i, j0)] - 0.6) <= 1e-3);
    const CompatibilityResidual cc = gauss_codazzi_residual(r, 0.7);
    CHECK(cc.gauss <= 1e-3);
    CHECK(cc.codazzi <= 1e-3);
    CHECK(r.normal_stats.max <= 1e-6);
    const CurveCheck cv = bjoerling_check(s, circle(0.7));
    CHECK(cv.position <= 1e-10);
    CHECK(cv.tangency <= 1e-10);
  }
  SUBCASE("accelerating twist") {
    BjoerlingData d;
    d.f0 = AnalyticVec3::parse({"2*x", "0", "0"});
    d.v = AnalyticVec3::parse({"0", "cos(x^2)", "sin(x^2)"});
    d.H = 0.9;
    CHECK(cmc_residual(build_surface(d, kPipe), 0.9) <= 1e-3);
  }
  SUBCASE("cylinder potential") {
    HolomorphicPotential xi(-1, 1);
    xi.set(-1, 0, 1, 1.0);
    xi.set(-1, 1, 0, 1.0);
    CHECK(cmc_residual(build_surface(xi, 1.0, kPipe), 1.0) <= 1e-4);
  }
}

TEST_CASE("Hopf differential rotates with lambda0") {
  const BjoerlingData d = circle(0.75);
  const SurfaceGrid one = build_surface(d, kPipe);
  CHECK(hopf_rotation_check(one, one, 1.0) == 0.0);
  SurfaceOptions opts;
  opts.lambda0 = cplx(0.0, 1.0);
  CHECK(hopf_rotation_check(build_surface(d, kPipe, opts), one, opts.lambda0) <= 1e-3);

  HolomorphicPotential xi(-1, 1);
  xi.set(-1, 0, 1, 1.0);
  xi.set(-1, 1, 0, 1.0);
  const SurfaceGrid c1 = build_surface(xi, 1.0, kPipe);
  opts.lambda0 = std::polar(1.0, std::numbers::pi / 4);
  CHECK(hopf_rotation_check(build_surface(xi, 1.0, kPipe, opts), c1, opts.lambda0) <= 1e-3);
}
