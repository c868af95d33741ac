#include "cmc/grid.hpp"

#include <cmath>

#include "cmc/error.hpp"

namespace cmc {

int DomainGrid::base_column() const {
  const double s = (x0 - x_min) / hx();
  return static_cast<int>(std::lround(s));
}

void DomainGrid::validate() const {
  if (nx < 5 || ny < 5) throw Error(ErrorKind::ConfigError, "grid needs at least 5 nodes per direction");
  if (ny % 2 == 0) throw Error(ErrorKind::ConfigError, "grid row count must be odd so that y = 0 is a row");
  if (!(x_max > x_min) || !(y_max > 0.0)) throw Error(ErrorKind::ConfigError, "grid extent is empty");
  const double s = (x0 - x_min) / hx();
  if (s < -1e-9 || s > nx - 1 + 1e-9 || std::abs(s - std::round(s)) > 1e-9) {
    throw Error(ErrorKind::ConfigError, "base point x0 = " + std::to_string(x0) + " is not a grid node");
  }
}

}  // namespace cmc
