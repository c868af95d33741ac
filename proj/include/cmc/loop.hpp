#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace cmc {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline constexpr int kDefaultDegree = 32;
inline constexpr double kCircleTolerance = 1e-12;

/// Twisted sl(2,C)-valued Laurent polynomial in the loop parameter, stored as
/// coefficients for modes -N..N. Diagonal entries live on even modes and
/// off-diagonal entries on odd modes; every constructor and arithmetic routine
/// keeps that pattern exactly (entries outside it are stored as zero).
class TwistedLoop {
 public:
  TwistedLoop() : TwistedLoop(1) {}
  explicit TwistedLoop(int degree);

  static TwistedLoop identity(int degree = kDefaultDegree);
  /// A loop constant in lambda; `m` must be diagonal.
  static TwistedLoop constant(const Mat2& m, int degree = kDefaultDegree);
  /// Single-mode loop m * lambda^k; `m` must respect the twisting of mode k.
  static TwistedLoop monomial(int k, const Mat2& m, int degree);

  int degree() const noexcept { return degree_; }

  /// Coefficient of lambda^k; zero outside -N..N.
  Mat2 operator[](int k) const;
  /// Mutable access, |k| <= N. Call enforce_twisting() after raw writes.
  Mat2& at(int k);

  std::span<const Mat2> coefficients() const noexcept { return coeffs_; }
  std::span<Mat2> coefficients() noexcept { return coeffs_; }

  /// Pads with zeros or drops the outer modes.
  TwistedLoop resized(int degree) const;

  /// Frobenius norm of all coefficients.
  double norm() const;
  /// Frobenius mass sitting on entries that violate the twisting.
  double twisting_defect() const;
  /// Zeroes the entries that violate the twisting.
  void enforce_twisting();

  /// Evaluation at any nonzero lambda (no circle check).
  Mat2 evaluate(cplx lambda) const;

 private:
  int degree_;
  std::vector<Mat2> coeffs_;  // index k + degree_
};

/// Loop with only non-negative modes 0..N (extends holomorphically to the disc).
class PlusLoop {
 public:
  PlusLoop() : PlusLoop(0) {}
  explicit PlusLoop(int degree);

  static PlusLoop from_loop(const TwistedLoop& loop, int degree);

  int degree() const noexcept { return degree_; }
  Mat2 operator[](int k) const;
  Mat2& at(int k);

  TwistedLoop to_loop() const;
  Mat2 evaluate(cplx lambda) const;

 private:
  int degree_;
  std::vector<Mat2> coeffs_;
};

/// Coefficientwise sum; the result has the larger degree.
TwistedLoop operator+(const TwistedLoop& a, const TwistedLoop& b);
TwistedLoop operator-(const TwistedLoop& a, const TwistedLoop& b);
TwistedLoop operator*(cplx s, const TwistedLoop& a);

/// Values of a loop at M equispaced points exp(2 pi i j / M).
struct CircleSamples {
  std::vector<Mat2> values;
  int size() const noexcept { return static_cast<int>(values.size()); }
};

/// Result of a truncating operation: the kept loop and the Frobenius mass of
/// everything that was discarded.
struct Truncated {
  TwistedLoop loop;
  double spill = 0.0;
};

/// Smallest power of two >= 4N + 4.
int sample_count_for(int degree);
cplx circle_point(int j, int sample_count);

CircleSamples to_samples(const TwistedLoop& loop, int sample_count);
/// Inverse of to_samples, keeping modes -degree..degree. The spill reports the
/// mass found on the dropped modes and on entries violating the twisting.
Truncated from_samples(const CircleSamples& samples, int degree);

/// Evaluation on the unit circle; throws OffCircle when |lambda| != 1.
Mat2 loop_eval(const TwistedLoop& loop, cplx lambda);

/// Truncated product. `max_degree < 0` keeps every mode (N_A + N_B).
Truncated loop_mul(const TwistedLoop& a, const TwistedLoop& b, int max_degree = -1);

/// Pointwise inverse on circle samples, returned at the degree of `a` unless
/// `degree` is given. Throws NearSingularLoop when min |det| < 1e-10.
Truncated loop_inverse(const TwistedLoop& a, int degree = -1);

/// lambda -> A(lambda)^H on the circle, i.e. C_k -> (C_{-k})^H.
TwistedLoop loop_star(const TwistedLoop& a);

/// Derivative of the truncated series with respect to lambda, on the circle.
Mat2 loop_dlambda_eval(const TwistedLoop& a, cplx lambda);

/// max_j |det A(lambda_j) - 1| over `sample_count` circle points.
double det_defect(const TwistedLoop& a, int sample_count = 0);

/// max_j ||A(lambda_j)^H A(lambda_j) - I|| over circle points.
double unitarity_defect(const TwistedLoop& a, int sample_count = 0);

/// max_j ||A(lambda_j) - B(lambda_j)|| over circle points.
double max_circle_distance(const TwistedLoop& a, const TwistedLoop& b, int sample_count = 0);

/// Largest |k| whose coefficient pair exceeds rel_tol times the largest one.
int effective_degree(const TwistedLoop& a, double rel_tol = 1e-17);

}  // namespace cmc
