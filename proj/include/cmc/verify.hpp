#pragma once

#include <span>
#include <vector>

#include "cmc/bjoerling.hpp"
#include "cmc/grid.hpp"

namespace cmc {

struct Stats {
  double max = 0.0;
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  int count = 0;
};

/// Summary of |values| over the flagged nodes.
Stats summarize(std::span<const double> values, std::span<const unsigned char> valid);

/// Finite-difference geometry of a point grid. Per-node arrays follow
/// DomainGrid::index; nodes closer than `margin` to the edge are not valid
/// and hold NaN.
struct GeometryReport {
  DomainGrid domain;
  int margin = 2;
  std::vector<unsigned char> valid;
  std::vector<double> E, F, G;     // first fundamental form
  std::vector<double> e, f, g;     // second fundamental form w.r.t. N = f_x x f_y / |.|
  std::vector<double> H_form;      // (eG - 2fF + gE) / (2(EG - F^2))
  std::vector<double> H_lap;       // <f_xx + f_yy, N> / (E + G)
  std::vector<double> K;
  std::vector<cplx> Q;             // <N, f_zz>
  std::vector<double> conformality;  // max(|E - G|, 2|F|) / (E + G)
  std::vector<double> normal_defect; // |<stored normal, f_x>|/|f_x| + |<stored normal, f_y>|/|f_y|

  Stats H_stats, H_lap_stats, K_stats, Q_abs_stats, conformality_stats, normal_stats;
  double cross_check = 0.0;        // max |H_form - H_lap|
  double coarse_check = 0.0;       // max |H_form - second-order H_form|

  /// u from E + G = 8 e^{2u}.
  std::vector<double> u() const;
};

struct VerifyOptions {
  bool coarse_check = true;
  double coarse_tol = 1e-2;  // relative to max(1, max |H|)
};

/// Fourth-order central differences of points (first, second and mixed
/// derivatives). Throws GridTooCoarse when the second-order estimate of H
/// differs from the fourth-order one by more than coarse_tol.
GeometryReport fundamental_forms(const SurfaceGrid& surface, const VerifyOptions& options = {});

/// max |H_form - H| over valid nodes.
double cmc_residual(const GeometryReport& report, double H);
double cmc_residual(const SurfaceGrid& surface, double H);

struct CompatibilityResidual {
  double gauss = 0.0;    // max |u_{z zbar} + H^2 e^{2u} - |Q|^2 e^{-2u} / 4|
  double codazzi = 0.0;  // max |Q_zbar|
};

/// Differences the sampled u and Q once more (fourth order); nodes need a
/// margin of report.margin + 2.
CompatibilityResidual gauss_codazzi_residual(const DomainGrid& grid, std::span<const double> u,
                                             std::span<const cplx> Q, double H, int margin = 4);
CompatibilityResidual gauss_codazzi_residual(const GeometryReport& report, double H);

/// max |Q^{lambda0} - lambda0^{-2} Q^{1}| over nodes valid in both reports.
double hopf_rotation_check(const GeometryReport& at_lambda0, const GeometryReport& at_one, cplx lambda0);
double hopf_rotation_check(const SurfaceGrid& at_lambda0, const SurfaceGrid& at_one, cplx lambda0);

struct CurveCheck {
  double position = 0.0;  // max |f(x, 0) - f0(x)|
  double tangency = 0.0;  // max of |<N, t>| and |<N, v / |v|>|
};

/// Compares the y = 0 row of the grid with the curve and field.
CurveCheck bjoerling_check(const SurfaceGrid& surface, const BjoerlingData& data);

}  // namespace cmc
