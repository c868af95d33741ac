#pragma once

#include <string>
#include <vector>

#include "cmc/analytic.hpp"
#include "cmc/grid.hpp"
#include "cmc/potential.hpp"
#include "cmc/su2.hpp"

namespace cmc {

struct Interval {
  double a = -1.0;
  double b = 1.0;
};

/// Real-analytic curve f0 on J with a tangent-plane field v orthogonal to
/// f0' (v need not be unit), mean curvature H != 0 and base point x0 in J.
struct BjoerlingData {
  AnalyticVec3 f0;
  AnalyticVec3 v;
  double H = 1.0;
  double x0 = 0.0;
  Interval J;
  std::string name;
};

/// Checks H != 0, x0 in J, |f0'| > 0, |v| > 0 and orthogonality on `samples`
/// equispaced points of J. Throws InvalidData or NonRegularCurve.
void validate(const BjoerlingData& data, int samples = 257);

/// u = ln(|f0'| / 2), so that <f0', f0'> = 4 e^{2u}.
AnalyticFn metric_u(const BjoerlingData& data);

/// The frame along the curve. In internal coordinates (the rigid motion R0
/// applied inverse) the tangent t and the unit field v start at e1 and e2.
/// F0^{-1} F0' = (a b; -conj(b) -a) with
///   a = (i/2) <v, t'>,   b = (<t, n'> - i <n, v'>) / 2,   n = t x v.
struct FrameCurve {
  AnalyticVec3 t;  // unit tangent, user coordinates
  AnalyticVec3 v;  // unit field, user coordinates
  AnalyticVec3 n;  // t x v
  AnalyticFn a;
  AnalyticFn b;
  Mat3 R0 = Mat3::Identity();  // columns t(x0), v(x0), n(x0)
  double x0 = 0.0;

  /// Rotation (t v n)(x) expressed in internal coordinates.
  Mat3 rotation_at(double x) const;
  /// SU(2) lift of rotation_at(x) continued from F0(x0) = I.
  Mat2 frame_at(double x, double max_step = 0.01) const;
  /// Lifts at sorted points, continued through the samples themselves and
  /// extra points no further than max_step apart. Throws FrameDiscontinuity
  /// when neighbouring lifts differ by more than the derivative bound allows.
  std::vector<Mat2> sample(const std::vector<double>& xs, double max_step = 0.01) const;
};

FrameCurve curve_frame(const BjoerlingData& data);

/// u_z on the curve: a + u_x / 2.
AnalyticFn u_z_along(const BjoerlingData& data, const FrameCurve& frame);

/// Q = -2 e^u (conj(b) + H e^u), conj(b) taken as a holomorphic extension.
AnalyticFn hopf_Q(const BjoerlingData& data, const FrameCurve& frame);

/// Holomorphic extension of the curve's extended Maurer-Cartan form:
///   mode -1: (0, -H e^u; Q e^{-u}/2, 0)
///   mode  0: diag(a, -a)
///   mode +1: (0, -conj(Q) e^{-u}/2; H e^u, 0)
HolomorphicPotential boundary_potential(const BjoerlingData& data);

/// Potential of the member f^t of the family through a CMC-1 immersion with
/// metric u0, eta0 = -i u_y on the curve and Hopf differential Q:
///   mode -1: (0, -t e^{u0}; (1-t) e^{u0} + Q e^{-u0}/2, 0)
///   mode  0: diag(eta0/2, -eta0/2)
///   mode +1: (0, -(1-t) e^{u0} - conj(Q) e^{-u0}/2; t e^{u0}, 0)
/// It coincides with boundary_potential of the same curve and field at H = t.
HolomorphicPotential two_parameter_potential(const AnalyticFn& u0, const AnalyticFn& eta0,
                                             const AnalyticFn& Q, double t);

/// Minimal surface through f0 with unit normal n along it:
/// f = Re( f0(z) - i int_{x0}^{z} n(w) x f0'(w) dw ), integrated along the
/// real axis (where the integrand is real) and then vertically with
/// Gauss-Legendre panels. Normals come from the holomorphic derivative.
SurfaceGrid schwarz_minimal(const AnalyticVec3& f0, const AnalyticVec3& n, const DomainGrid& grid);

}  // namespace cmc
