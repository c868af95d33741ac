#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cmc/analytic.hpp"
#include "cmc/loop.hpp"

namespace cmc {

struct IwasawaOptions {
  int degree = -1;              // first truncation of the plus factor; -1 uses the degree of g
  int max_degree = 256;         // doubling cap
  double fact_tol = 1e-9;       // relative to max |g| on the circle
  double unit_tol = 1e-8;
};

struct FactorAttempt {
  int degree;
  double residual;
  double unitarity;
};

/// g = F B with F unitary on the circle and B a plus loop with
/// B(0) = diag(rho, 1/rho), rho > 0.
struct IwasawaResult {
  TwistedLoop F;
  PlusLoop B;
  double residual = 0.0;    // max over circle samples of ||F B - g||
  double unitarity = 0.0;   // max over circle samples of ||F^H F - I||
  double rho = 1.0;
  int degree_used = 0;
  std::vector<FactorAttempt> trace;
};

/// Iwasawa splitting by spectral factorization of P = g^H g.
///
/// The inverse C = B^{-1} is a plus loop with P C = B^H, a minus loop, so the
/// positive modes of P C vanish. Truncating C at degree n gives, for each
/// column, a Hermitian positive definite Toeplitz system (the twisting halves
/// the unknowns) solved by Cholesky. F = g C and B = C^{-1} are validated on
/// twice as many circle samples; failures double n up to max_degree.
/// Throws NearSingularLoop or NoConvergence.
IwasawaResult iwasawa(const TwistedLoop& g, const IwasawaOptions& options = {});

struct BirkhoffOptions {
  int degree = -1;
  int max_degree = 256;
  double fact_tol = 1e-9;         // relative to max |g| on the circle
  double big_cell_tol = 1e-10;    // smallest singular value of the section
};

/// g = g_minus g_plus with g_minus holding modes <= 0 and g_minus(inf) = I.
struct BirkhoffResult {
  TwistedLoop g_minus;
  PlusLoop g_plus;
  bool in_big_cell = false;
  double residual = 0.0;
  double min_singular = 0.0;
  int degree_used = 0;
};

/// Birkhoff splitting via the finite section of g Y = g_minus, Y = g_plus^{-1}.
/// Never throws for points outside the big cell; inspect in_big_cell.
BirkhoffResult birkhoff(const TwistedLoop& g, const BirkhoffOptions& options = {});

struct NormalizedPotentialOptions {
  double h = 1e-3;               // finite-difference step along the curve
  double structure_tol = 1e-6;   // allowed non-(lambda^{-1}, off-diagonal) content
  double regular_tol = 1e-10;    // |a0| below this flags a non-immersion
  int taylor_terms = 6;
  BirkhoffOptions birkhoff{};
};

struct NormalizedPotential {
  AnalyticFn a0;   // upper-right lambda^{-1} coefficient
  AnalyticFn b0;   // lower-left lambda^{-1} coefficient
  std::vector<double> xs;
  std::vector<cplx> a_samples;
  std::vector<cplx> b_samples;
  double structure_defect = 0.0;
  double fit_residual = 0.0;
  bool regular = true;
};

/// Minus factors of the Birkhoff splitting of F0(x), differentiated by a
/// sixth-order central stencil; their Maurer-Cartan form must be
/// off-diagonal and of pure mode -1. The two entries are sampled at `xs` and
/// least-squares fitted by polynomials about `center`.
/// Throws NotInBigCell and StructureViolation.
NormalizedPotential normalized_potential(const std::function<TwistedLoop(double)>& F0,
                                         const std::vector<double>& xs, double center,
                                         const NormalizedPotentialOptions& options = {});

}  // namespace cmc
