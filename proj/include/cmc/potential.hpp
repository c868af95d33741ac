#pragma once

#include <array>
#include <string>
#include <vector>

#include "cmc/analytic.hpp"
#include "cmc/loop.hpp"

namespace cmc {

/// Matrix-valued holomorphic 1-form xi = sum_{m=lo}^{hi} A_m(z) lambda^m dz.
/// Entries are analytic functions of z; diagonal entries may only sit on
/// even modes and off-diagonal entries on odd modes.
class HolomorphicPotential {
 public:
  using Block = std::array<std::array<AnalyticFn, 2>, 2>;

  HolomorphicPotential() : HolomorphicPotential(-1, 1) {}
  HolomorphicPotential(int lowest_mode, int highest_mode);

  int lowest_mode() const noexcept { return lo_; }
  int highest_mode() const noexcept { return hi_; }

  const AnalyticFn& entry(int mode, int row, int col) const;
  /// Throws StructureViolation when the entry would break the twisting.
  void set(int mode, int row, int col, AnalyticFn f);

  /// Structural checks: twisting (exact), trace zero (diag entries cancel,
  /// compared by key or at probe points).
  void check_invariants(const std::vector<cplx>& probes = {}) const;

  /// Mode coefficients at z, index m - lowest_mode().
  std::vector<Mat2> evaluate(cplx z) const;

  /// Pullback under z = phi(w): entries become phi'(w) A_m(phi(w)).
  HolomorphicPotential pulled_back(const AnalyticFn& phi) const;

  /// Entries rendered as infix strings, for reports.
  std::vector<std::array<std::array<std::string, 2>, 2>> to_strings() const;

 private:
  int lo_;
  int hi_;
  std::vector<Block> modes_;
};

/// Compiled evaluator for repeated evaluation of a potential, e.g. inside an
/// ODE integrator. Raises RegularityLoss when the (1,2) entry of mode -1
/// drops below `regular_tol` in magnitude.
class PotentialEvaluator {
 public:
  explicit PotentialEvaluator(const HolomorphicPotential& xi, double regular_tol = 0.0);

  int lowest_mode() const noexcept { return lo_; }
  int highest_mode() const noexcept { return hi_; }
  /// Writes the mode matrices into `out` (size highest - lowest + 1).
  void evaluate(cplx z, std::vector<Mat2>& out) const;

 private:
  int lo_;
  int hi_;
  double regular_tol_;
  CompiledFns fns_;
};

}  // namespace cmc
