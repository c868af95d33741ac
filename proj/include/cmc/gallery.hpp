#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cmc/bjoerling.hpp"
#include "cmc/dpw.hpp"
#include "cmc/grid.hpp"
#include "cmc/potential.hpp"

namespace cmc {

/// Named numeric parameters plus the one string parameter (`shape`) used by
/// planar_circle. Unknown keys are rejected by example_gallery.
struct GalleryParams {
  std::map<std::string, double> numbers;
  std::string shape;

  double get(const std::string& key, double fallback) const;
};

struct GalleryItem {
  std::string name;
  std::string description;
  double H = 1.0;
  std::optional<BjoerlingData> data;
  std::optional<HolomorphicPotential> potential;
  /// When set, `potential` is written in a coordinate z = chart(w) and the
  /// grid runs in w.
  std::optional<AnalyticFn> chart;
  bool prefer_potential = false;
  std::optional<double> family_t;  // member of the family through `data` (a CMC-1 surface)
  DomainGrid grid;
};

const std::vector<std::string>& gallery_names();

/// cylinder(H), delaunay_circle(H), line_theta_const(theta, H),
/// line_theta_2x(H), line_theta_xsq(H), line_theta_sin2(H),
/// planar_circle(shape in {sin, sin2}, amplitude, k, shift, H),
/// two_param_sphere(t). Throws UnknownExample or ConfigError.
GalleryItem example_gallery(const std::string& name, const GalleryParams& params = {});

/// The potential the DPW steps run on: pulled back through the chart if any.
HolomorphicPotential working_potential(const GalleryItem& item);

/// Surface for an item: family member, Bjoerling solution, or the raw Sym
/// image of the potential, in that order of preference.
SurfaceGrid solve_item(const GalleryItem& item, const DomainGrid& grid, const SurfaceOptions& options = {});

}  // namespace cmc
