#include "cmc/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "cmc/error.hpp"

namespace cmc {

namespace {

const cplx kI(0.0, 1.0);

AnalyticVec3 vec(const std::array<std::string, 3>& text) { return AnalyticVec3::parse(text); }

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string("(") + buf + ")";
}

void allow_only(const GalleryParams& p, std::initializer_list<const char*> keys, bool shape = false) {
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : p.numbers) {
    if (!ok.count(k)) throw Error(ErrorKind::ConfigError, "parameter '" + k + "' does not apply to this example");
    if (!std::isfinite(v)) throw Error(ErrorKind::ConfigError, "parameter '" + k + "' is not finite");
  }
  if (!shape && !p.shape.empty()) throw Error(ErrorKind::ConfigError, "parameter 'shape' does not apply to this example");
}

double nonzero_H(const GalleryParams& p) {
  const double H = p.get("H", 1.0);
  if (H == 0.0) throw Error(ErrorKind::ConfigError, "H must be nonzero");
  return H;
}

GalleryItem line_item(const std::string& name, const std::string& theta, double H) {
  GalleryItem item;
  item.name = name;
  item.H = H;
  BjoerlingData d;
  d.f0 = vec({"2*x", "0", "0"});
  d.v = vec({"0", "cos(" + theta + ")", "sin(" + theta + ")"});
  d.H = H;
  d.J = {-2.0, 2.0};
  d.name = name;
  item.data = d;
  item.potential = boundary_potential(d);
  item.description = "straight line along x1, tangent plane at angle theta0(x) = " + theta;
  return item;
}

}  // namespace

double GalleryParams::get(const std::string& key, double fallback) const {
  const auto it = numbers.find(key);
  return it == numbers.end() ? fallback : it->second;
}

const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names = {"cylinder",      "delaunay_circle", "line_theta_const",
                                                 "line_theta_2x", "line_theta_xsq",  "line_theta_sin2",
                                                 "planar_circle", "two_param_sphere"};
  return names;
}

GalleryItem example_gallery(const std::string& name, const GalleryParams& p) {
  GalleryItem item;
  if (name == "cylinder") {
    allow_only(p, {"H"});
    const double H = nonzero_H(p);
    item.name = name;
    item.H = H;
    HolomorphicPotential xi(-1, 1);
    xi.set(-1, 0, 1, 1.0);
    xi.set(-1, 1, 0, 1.0);
    item.potential = xi;
    item.prefer_potential = true;
    // The same surface as Bjoerling data: its y = 0 line and tangent planes.
    BjoerlingData d;
    const std::string s = num(-1.0 / (2.0 * H));
    d.f0 = vec({s + "*4*x", "0", s});
    d.v = vec({"0", "-1", "0"});
    d.H = H;
    d.J = {-2.0, 2.0};
    d.name = name;
    item.data = d;
    item.description = "round cylinder of radius 1/(2H) from the potential (0, 1/lambda; 1/lambda, 0) dz";
  } else if (name == "delaunay_circle") {
    allow_only(p, {"H"});
    const double H = nonzero_H(p);
    item.name = name;
    item.H = H;
    BjoerlingData d;
    d.f0 = vec({"sin(2*x)", "0", "-cos(2*x)"});
    d.v = vec({"0", "1", "0"});
    d.H = H;
    d.J = {-1.5, 1.5};
    d.name = name;
    item.data = d;
    item.potential = boundary_potential(d);
    item.description = "unit circle in the x1x3-plane with constant field e2: Delaunay surfaces";
  } else if (name == "line_theta_const") {
    allow_only(p, {"H", "theta"});
    item = line_item(name, short_num(p.get("theta", 0.0)), nonzero_H(p));
  } else if (name == "line_theta_2x") {
    allow_only(p, {"H"});
    item = line_item(name, "2*x", nonzero_H(p));
  } else if (name == "line_theta_xsq") {
    allow_only(p, {"H"});
    item = line_item(name, "x^2", nonzero_H(p));
  } else if (name == "line_theta_sin2") {
    allow_only(p, {"H"});
    item = line_item(name, "pi/8*sin(x)^2", nonzero_H(p));
  } else if (name == "planar_circle") {
    allow_only(p, {"H", "amplitude", "k", "shift"}, true);
    const double H = nonzero_H(p);
    const std::string shape = p.shape.empty() ? "sin2" : p.shape;
    const double amp = p.get("amplitude", 0.2);
    const double k = p.get("k", 2.0);
    const double shift = p.get("shift", -std::numbers::pi / 4);
    if (k != std::round(k)) throw Error(ErrorKind::ConfigError, "k must be an integer");
    const AnalyticFn z = AnalyticFn::variable();
    AnalyticFn theta;
    std::string theta_text;
    if (shape == "sin") {
      theta = shift + amp * sin(k * z);
      theta_text = short_num(shift) + " + " + short_num(amp) + " sin(" + short_num(k) + " t)";
    } else if (shape == "sin2") {
      theta = shift + amp * pow(sin(k * z), 2.0);
      theta_text = short_num(shift) + " + " + short_num(amp) + " sin^2(" + short_num(k) + " t)";
    } else {
      throw Error(ErrorKind::ConfigError, "planar_circle shape must be 'sin' or 'sin2'");
    }

    item.name = name;
    item.H = H;
    // Potential in z on the annulus sector, with theta_(z) = theta(-i ln z);
    // the prime is theta' composed the same way, not d/dz.
    const AnalyticFn t_of_z = cplx(0.0, -1.0) * ln(z);
    const AnalyticFn th = theta.substitute(t_of_z);
    const AnalyticFn dth = theta.derivative().substitute(t_of_z);
    const AnalyticFn s2 = sin(2.0 * th);
    const AnalyticFn inv_z = 1.0 / z;
    const AnalyticFn inv_z2 = pow(z, -2.0);
    HolomorphicPotential xi(-1, 1);
    const AnalyticFn diag = 0.5 * inv_z * (cos(2.0 * th) - 1.0);
    xi.set(0, 0, 0, diag);
    xi.set(0, 1, 1, -diag);
    xi.set(-1, 0, 1, -0.5 * H);
    xi.set(1, 0, 1, 0.5 * (s2 + H - 2.0 * kI * dth));
    xi.set(-1, 1, 0, 0.5 * inv_z2 * (s2 + H + 2.0 * kI * dth));
    xi.set(1, 1, 0, -0.5 * H * inv_z2);
    item.potential = xi;
    item.chart = exp(cplx(0.0, 2.0) * z);

    // Equivalent Bjoerling data in w: unit circle traversed at speed 2, field
    // turning by 2 theta(2w) about the tangent from the inward normal towards -e2.
    const AnalyticFn t2 = 2.0 * theta.substitute(2.0 * z);
    BjoerlingData d;
    d.f0 = vec({"sin(2*x)", "0", "-cos(2*x)"});
    d.v.c = {-cos(t2) * sin(2.0 * z), -sin(t2), cos(t2) * cos(2.0 * z)};
    d.H = H;
    d.J = {-1.5, 1.5};
    d.name = name;
    item.data = d;
    // w runs at twice arc length; halve the extents to match the other items.
    item.grid.x_min = -0.5;
    item.grid.x_max = 0.5;
    item.grid.y_max = 0.2;
    item.description = "planar unit circle with theta(t) = " + theta_text +
                       "; potential in z = exp(2 i w) on the sector |arg z| < pi (cut along the negative reals)";
  } else if (name == "two_param_sphere") {
    allow_only(p, {"t"});
    const double t = p.get("t", 0.5);
    if (!(t > 0.0)) throw Error(ErrorKind::ConfigError, "t must be positive");
    item.name = name;
    item.H = t;
    BjoerlingData d;
    d.f0 = vec({"sin(2*x)", "0", "-cos(2*x)"});
    d.v = vec({"0", "1", "0"});
    d.H = 1.0;
    d.J = {-1.5, 1.5};
    d.name = name;
    item.data = d;
    const AnalyticFn zero;
    item.potential = two_parameter_potential(zero, zero, zero, t);
    item.family_t = t;
    item.description = "member t of the family through the unit sphere, scaled by t (Delaunay surfaces)";
  } else {
    throw Error(ErrorKind::UnknownExample, "unknown example '" + name + "'");
  }
  return item;
}

HolomorphicPotential working_potential(const GalleryItem& item) {
  if (!item.potential) throw Error(ErrorKind::InvalidData, "example has no potential");
  return item.chart ? item.potential->pulled_back(*item.chart) : *item.potential;
}

SurfaceGrid solve_item(const GalleryItem& item, const DomainGrid& grid, const SurfaceOptions& options) {
  SurfaceGrid s;
  if (item.family_t && item.data) {
    s = family_member(*item.data, *item.family_t, grid, options);
  } else if (item.data && !item.prefer_potential) {
    s = build_surface(*item.data, grid, options);
  } else {
    s = build_surface(working_potential(item), item.H, grid, options);
  }
  s.meta.source = item.name;
  return s;
}

}  // namespace cmc
