#include <doctest.h>

#include <cmath>
#include <optional>

#include "cmc/error.hpp"
#include "cmc/gallery.hpp"
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

const DomainGrid kSmall = grid(41, 17, 0.5, 0.2);
const DomainGrid kPipe = grid(81, 33, 0.5, 0.2);

// Largest change in pairwise distance: zero iff the grids differ by a rigid motion.
double distance_defect(const SurfaceGrid& a, const SurfaceGrid& b) {
  double worst = 0.0;
  const std::size_t n = a.points.size();
  for (std::size_t i = 0; i < n; i += 7) {
    for (std::size_t j = 0; j < n; j += 5) {
      const double da = (a.points[i] - a.points[j]).norm(), db = (b.points[i] - b.points[j]).norm();
      worst = std::max(worst, std::abs(da - db));
    }
  }
  return worst;
}

GalleryParams params(std::map<std::string, double> numbers, std::string shape = "") {
  GalleryParams p;
  p.numbers = std::move(numbers);
  p.shape = std::move(shape);
  return p;
}

}  // namespace

TEST_CASE("every gallery entry reproduces its curve") {
  for (const std::string& name : gallery_names()) {
    CAPTURE(name);
    const GalleryItem item = example_gallery(name);
    REQUIRE(item.data);
    const SurfaceGrid s = build_surface(*item.data, kSmall);
    const CurveCheck c = bjoerling_check(s, *item.data);
    CHECK(c.position <= 1e-5);
    CHECK(c.tangency <= 1e-5);
  }
}

TEST_CASE("gallery surfaces are CMC") {
  for (const std::string& name : gallery_names()) {
    CAPTURE(name);
    const GalleryItem item = example_gallery(name);
    const SurfaceGrid s = solve_item(item, kPipe);
    CHECK(s.meta.source == name);
    const double H = item.family_t ? 1.0 : item.H;
    CHECK(cmc_residual(s, H) <= 1e-3);
  }
}

TEST_CASE("potential and data describe the same surface") {
  for (const std::string& name : {"cylinder", "planar_circle"}) {
    CAPTURE(name);
    for (double H : {0.8, 1.3}) {
      const GalleryItem item = example_gallery(name, params({{"H", H}}));
      const SurfaceGrid a = build_surface(working_potential(item), H, kSmall);
      const SurfaceGrid b = build_surface(*item.data, kSmall);
      CHECK(distance_defect(a, b) <= 1e-8);
    }
  }
  const GalleryItem odd = example_gallery("planar_circle", params({{"amplitude", 0.3}, {"k", 3}}, "sin"));
  CHECK(distance_defect(build_surface(working_potential(odd), odd.H, kSmall), build_surface(*odd.data, kSmall)) <= 1e-8);
}

TEST_CASE("planar circle with constant angle is a Delaunay surface") {
  const double H = 0.75;
  const GalleryItem flat = example_gallery("planar_circle", params({{"amplitude", 0.0}, {"H", H}}));
  const GalleryItem del = example_gallery("delaunay_circle", params({{"H", H}}));
  const SurfaceGrid a = build_surface(working_potential(flat), H, kSmall);
  const SurfaceGrid b = build_surface(*del.potential, H, kSmall);
  CHECK(distance_defect(a, b) <= 1e-8);
}

TEST_CASE("sphere family member is scaled by t") {
  const GalleryItem item = example_gallery("two_param_sphere", params({{"t", 0.75}}));
  const SurfaceGrid s = solve_item(item, kSmall);
  const int j0 = kSmall.axis_row();
  for (int i = 0; i < kSmall.nx; i += 5) {
    CHECK((s.point(i, j0) - 0.75 * item.data->f0.eval_real(kSmall.x(i))).norm() <= 1e-10);
  }
}

TEST_CASE("gallery parameters are checked") {
  auto kind = [](const std::string& name, const GalleryParams& p) -> std::optional<ErrorKind> {
    try {
      example_gallery(name, p);
    } catch (const Error& e) {
      return e.kind();
    }
    return std::nullopt;
  };
  CHECK(kind("helicoid", {}) == ErrorKind::UnknownExample);
  CHECK(kind("cylinder", params({{"t", 1.0}})) == ErrorKind::ConfigError);
  CHECK(kind("cylinder", params({{"H", 0.0}})) == ErrorKind::ConfigError);
  CHECK(kind("planar_circle", params({{"k", 1.5}})) == ErrorKind::ConfigError);
  CHECK(kind("planar_circle", params({}, "cos")) == ErrorKind::ConfigError);
  CHECK(kind("two_param_sphere", params({{"t", -0.5}})) == ErrorKind::ConfigError);
  CHECK(kind("line_theta_const", params({{"theta", 0.4}, {"H", 2.0}})) == std::nullopt);
}
