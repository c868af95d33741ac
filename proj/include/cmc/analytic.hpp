#pragma once

#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace cmc {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;

namespace detail {
struct Node;
struct Tape;
}

/// Truncated Taylor expansion sum_n coeffs[n] (z - center)^n, valid for
/// |z - center| < radius.
struct TaylorData {
  double center = 0.0;
  std::vector<cplx> coeffs;
  double radius = 0.0;
};

/// A real-analytic function on an interval together with its canonical
/// holomorphic extension.
///
/// Internally an immutable expression DAG over {constants, z, +, *, real
/// powers, exp, ln, sin, cos, sinh, cosh, Taylor leaves}. Construction always
/// goes through simplifying constructors, so structurally equal functions
/// compare equal by key(), constants fold exactly, and sin^2 + cos^2 collapses.
/// Logarithms and non-integer powers use the principal branch; evaluating on
/// the cut, at a pole, or outside a Taylor disc throws OutOfDomain.
class AnalyticFn {
 public:
  AnalyticFn();  // the zero function
  AnalyticFn(double value);  // NOLINT(google-explicit-constructor)
  AnalyticFn(cplx value);    // NOLINT(google-explicit-constructor)

  static AnalyticFn variable();
  static AnalyticFn taylor(TaylorData data);
  /// Infix grammar: numbers, z (alias x), i, pi, e, + - * / ^, and the
  /// functions exp ln log sin cos tan sinh cosh tanh sqrt.
  static AnalyticFn parse(std::string_view text);

  cplx eval_complex(cplx z) const;
  /// Evaluation in real arithmetic; throws InvalidData for complex-valued
  /// expressions.
  double eval_real(double x) const;

  AnalyticFn derivative() const;
  /// Holomorphic extension of x -> conj(f(x)) for real x.
  AnalyticFn conj_extension() const;
  /// f(inner(z)).
  AnalyticFn substitute(const AnalyticFn& inner) const;

  std::optional<cplx> constant_value() const;
  /// The expansion when this function is a bare Taylor leaf in z.
  std::optional<TaylorData> taylor_data() const;
  bool is_zero() const;
  bool has_complex_constants() const;

  /// Canonical structural key; equal keys mean identical functions.
  const std::string& key() const;
  /// Re-parseable infix text (Taylor leaves print as taylor<...> and are not
  /// re-parseable).
  std::string to_string() const;

  const std::shared_ptr<const detail::Node>& node() const noexcept { return node_; }
  explicit AnalyticFn(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

  friend AnalyticFn operator+(const AnalyticFn& a, const AnalyticFn& b);
  friend AnalyticFn operator-(const AnalyticFn& a, const AnalyticFn& b);
  friend AnalyticFn operator*(const AnalyticFn& a, const AnalyticFn& b);
  friend AnalyticFn operator/(const AnalyticFn& a, const AnalyticFn& b);
  friend AnalyticFn operator-(const AnalyticFn& a);

 private:
  std::shared_ptr<const detail::Node> node_;
};

AnalyticFn exp(const AnalyticFn& f);
AnalyticFn ln(const AnalyticFn& f);
AnalyticFn sin(const AnalyticFn& f);
AnalyticFn cos(const AnalyticFn& f);
AnalyticFn sinh(const AnalyticFn& f);
AnalyticFn cosh(const AnalyticFn& f);
AnalyticFn pow(const AnalyticFn& f, double exponent);
AnalyticFn sqrt(const AnalyticFn& f);

/// Taylor coefficients at a real center by power-series arithmetic on the
/// expression. The radius is the distance to the nearest detected singularity
/// (exact for affine arguments of poles, logs and roots; otherwise a
/// root-test estimate from the computed coefficients), infinity if none.
/// Throws SingularCenter when the center itself is singular.
AnalyticFn taylor_of(const AnalyticFn& f, double center, int n_terms);

/// Batch evaluator: the union of the expression DAGs flattened into one tape
/// with shared subexpressions evaluated once.
class CompiledFns {
 public:
  CompiledFns() = default;
  explicit CompiledFns(std::span<const AnalyticFn> fns);

  std::size_t size() const noexcept { return size_; }
  void evaluate(cplx z, std::span<cplx> out) const;

 private:
  std::shared_ptr<const detail::Tape> tape_;
  std::size_t size_ = 0;
};

/// Three analytic coordinate functions (a curve or a vector field along it).
struct AnalyticVec3 {
  std::array<AnalyticFn, 3> c;

  static AnalyticVec3 parse(const std::array<std::string, 3>& text);

  const AnalyticFn& operator[](int i) const { return c[i]; }
  AnalyticVec3 derivative() const;
  AnalyticVec3 scaled(const AnalyticFn& s) const;
  AnalyticVec3 conj_extension() const;
  std::array<cplx, 3> eval_complex(cplx z) const;
  Vec3 eval_real(double x) const;
  std::array<std::string, 3> to_strings() const;
};

AnalyticFn dot(const AnalyticVec3& a, const AnalyticVec3& b);
AnalyticVec3 cross(const AnalyticVec3& a, const AnalyticVec3& b);
AnalyticVec3 operator+(const AnalyticVec3& a, const AnalyticVec3& b);
AnalyticVec3 operator-(const AnalyticVec3& a, const AnalyticVec3& b);

}  // namespace cmc
