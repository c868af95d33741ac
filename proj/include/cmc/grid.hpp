#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmc/loop.hpp"
#include "cmc/su2.hpp"

namespace cmc {

/// Rectangular parameter grid [x_min, x_max] x [-y_max, y_max] with the base
/// point z0 = (x0, 0) on a node. Node (i, j) sits at x_min + i hx,
/// -y_max + j hy; storage is row-major in j.
struct DomainGrid {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_max = 0.4;
  int nx = 201;
  int ny = 81;
  double x0 = 0.0;

  double hx() const { return (x_max - x_min) / (nx - 1); }
  double hy() const { return 2.0 * y_max / (ny - 1); }
  double x(int i) const { return x_min + i * hx(); }
  double y(int j) const { return -y_max + j * hy(); }
  cplx z(int i, int j) const { return {x(i), y(j)}; }
  int base_column() const;
  int axis_row() const { return (ny - 1) / 2; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }

  /// Throws ConfigError unless ny is odd, both counts are >= 5, spacings are
  /// positive and x0 falls on a node.
  void validate() const;
};

struct SurfaceMeta {
  double H = 1.0;
  cplx lambda0 = 1.0;
  int degree = 0;
  double fact_tol = 0.0;
  double unit_tol = 0.0;
  std::string source;
};

struct SurfaceGrid {
  DomainGrid domain;
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::optional<std::vector<TwistedLoop>> frames;
  SurfaceMeta meta;

  const Vec3& point(int i, int j) const { return points[domain.index(i, j)]; }
  const Vec3& normal(int i, int j) const { return normals[domain.index(i, j)]; }
};

}  // namespace cmc
