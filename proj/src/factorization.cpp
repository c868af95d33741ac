#include "cmc/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "cmc/error.hpp"

namespace cmc {

namespace {

// Row carrying the unknown of mode j in column c of a twisted loop.
int twisted_row(int j, int c) { return (j % 2 == 0) ? c : 1 - c; }

double max_sample_norm(const TwistedLoop& g, int m) {
  double worst = 0.0;
  for (const Mat2& v : to_samples(g, m).values) worst = std::max(worst, v.norm());
  return worst;
}

double min_sample_det(const TwistedLoop& g, int m) {
  double best = std::numeric_limits<double>::infinity();
  for (const Mat2& v : to_samples(g, m).values) best = std::min(best, std::abs(v.determinant()));
  return best;
}

struct Validation {
  double residual;
  double unitarity;
};

Validation validate_product(const TwistedLoop& left, const TwistedLoop& right, const TwistedLoop& g,
                            int m, bool check_unitary) {
  const CircleSamples sl = to_samples(left, m);
  const CircleSamples sr = to_samples(right, m);
  const CircleSamples sg = to_samples(g, m);
  Validation v{0.0, 0.0};
  for (int j = 0; j < m; ++j) {
    v.residual = std::max(v.residual, (sl.values[j] * sr.values[j] - sg.values[j]).norm());
    if (check_unitary) {
      v.unitarity = std::max(v.unitarity, (sl.values[j].adjoint() * sl.values[j] - Mat2::Identity()).norm());
    }
  }
  return v;
}

void require_invertible(const TwistedLoop& g) {
  const double det = min_sample_det(g, sample_count_for(g.degree()));
  if (det < 1e-10) {
    throw Error(ErrorKind::NearSingularLoop,
                "loop is not invertible on the circle (min |det| = " + std::to_string(det) + ")");
  }
}

// Solves the truncated spectral factorization at degree n; returns C = B^{-1}.
TwistedLoop plus_inverse_factor(const TwistedLoop& P, int n) {
  TwistedLoop C(n);
  for (int c = 0; c < 2; ++c) {
    Eigen::MatrixXcd T(n, n);
    Eigen::VectorXcd rhs(n);
    for (int k = 1; k <= n; ++k) {
      const int rk = twisted_row(k, c);
      rhs(k - 1) = -P[k](rk, c);
      for (int j = 1; j <= n; ++j) T(k - 1, j - 1) = P[k - j](rk, twisted_row(j, c));
    }
    Eigen::VectorXcd x;
    if (n > 0) {
      const Eigen::LLT<Eigen::MatrixXcd> llt(T);
      if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::NearSingularLoop, "Toeplitz section of g^H g is not positive definite");
      }
      x = llt.solve(rhs);
    }
    cplx d = P[0](c, c);
    for (int j = 1; j <= n; ++j) d += P[-j](c, twisted_row(j, c)) * x(j - 1);
    if (!(d.real() > 0.0)) {
      throw Error(ErrorKind::NearSingularLoop, "spectral factor normalization is not positive");
    }
    const double scale = 1.0 / std::sqrt(d.real());
    C.at(0)(c, c) = scale;
    for (int j = 1; j <= n; ++j) C.at(j)(twisted_row(j, c), c) = x(j - 1) * scale;
  }
  return C;
}

}  // namespace

IwasawaResult iwasawa(const TwistedLoop& g, const IwasawaOptions& options) {
  require_invertible(g);
  const int d = g.degree();

  // P = g^H g on the circle; exact at degree 2d.
  const int mp = sample_count_for(2 * d);
  CircleSamples sp = to_samples(g, mp);
  for (Mat2& v : sp.values) v = v.adjoint() * v;
  const TwistedLoop P = from_samples(sp, 2 * d).loop;

  const double g_norm = max_sample_norm(g, sample_count_for(d));
  const double fact_tol = options.fact_tol * std::max(g_norm, 1.0);

  IwasawaResult result;
  int n = options.degree > 0 ? options.degree : std::max(d, 1);
  for (;;) {
    const TwistedLoop C = plus_inverse_factor(P, n);
    const int deg_f = std::max(d, n);
    TwistedLoop F = loop_mul(g, C, deg_f).loop;
    const TwistedLoop b_loop = loop_inverse(C, n).loop;
    PlusLoop B = PlusLoop::from_loop(b_loop, n);

    const Validation v = validate_product(F, B.to_loop(), g, 2 * sample_count_for(deg_f), true);
    result.trace.push_back({n, v.residual, v.unitarity});
    if (v.residual <= fact_tol && v.unitarity <= options.unit_tol) {
      result.F = std::move(F);
      result.B = std::move(B);
      result.residual = v.residual;
      result.unitarity = v.unitarity;
      result.rho = result.B[0](0, 0).real();
      result.degree_used = n;
      return result;
    }
    if (n >= options.max_degree) break;
    n = std::min(2 * n, options.max_degree);
  }

  std::ostringstream msg;
  msg << "Iwasawa factorization did not reach tolerance;";
  for (const FactorAttempt& a : result.trace) {
    msg << " [N=" << a.degree << " residual=" << a.residual << " unitarity=" << a.unitarity << "]";
  }
  throw Error(ErrorKind::NoConvergence, msg.str());
}

BirkhoffResult birkhoff(const TwistedLoop& g, const BirkhoffOptions& options) {
  require_invertible(g);
  const int d = g.degree();
  const double g_norm = max_sample_norm(g, sample_count_for(d));
  const double fact_tol = options.fact_tol * std::max(g_norm, 1.0);

  BirkhoffResult result;
  int n = options.degree > 0 ? options.degree : std::max(d, 1);
  double last_residual = 0.0;
  for (;;) {
    TwistedLoop Y(n);
    double min_singular = std::numeric_limits<double>::infinity();
    for (int c = 0; c < 2; ++c) {
      Eigen::MatrixXcd A(n + 1, n + 1);
      Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + 1);
      rhs(0) = 1.0;
      for (int k = 0; k <= n; ++k) {
        const int rk = twisted_row(k, c);
        for (int j = 0; j <= n; ++j) A(k, j) = g[k - j](rk, twisted_row(j, c));
      }
      const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
      min_singular = std::min(min_singular, svd.singularValues()(n));
      if (svd.singularValues()(n) < options.big_cell_tol) break;
      const Eigen::VectorXcd y = A.partialPivLu().solve(rhs);
      for (int j = 0; j <= n; ++j) Y.at(j)(twisted_row(j, c), c) = y(j);
    }
    result.min_singular = min_singular;
    result.degree_used = n;
    if (min_singular < options.big_cell_tol) {
      result.in_big_cell = false;
      return result;
    }

    const TwistedLoop gy = loop_mul(g, Y).loop;
    TwistedLoop minus(d);
    for (int k = -d; k <= 0; ++k) minus.at(k) = gy[k];
    const PlusLoop plus = PlusLoop::from_loop(loop_inverse(Y, n).loop, n);

    const int m = 2 * sample_count_for(std::max(d, n));
    last_residual = validate_product(minus, plus.to_loop(), g, m, false).residual;
    if (last_residual <= fact_tol) {
      result.g_minus = std::move(minus);
      result.g_plus = plus;
      result.in_big_cell = true;
      result.residual = last_residual;
      return result;
    }
    if (n >= options.max_degree) break;
    n = std::min(2 * n, options.max_degree);
  }
  throw Error(ErrorKind::NoConvergence,
              "Birkhoff factorization did not reach tolerance (residual " + std::to_string(last_residual) +
                  " at N=" + std::to_string(n) + ")");
}

NormalizedPotential normalized_potential(const std::function<TwistedLoop(double)>& F0,
                                         const std::vector<double>& xs, double center,
                                         const NormalizedPotentialOptions& options) {
  if (xs.empty()) throw std::invalid_argument("normalized_potential needs sample points");
  static constexpr double kStencil[] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
  const double h = options.h;

  NormalizedPotential out;
  out.xs = xs;
  for (double x : xs) {
    std::vector<TwistedLoop> minus;
    for (int s = -3; s <= 3; ++s) {
      const BirkhoffResult b = birkhoff(F0(x + s * h), options.birkhoff);
      if (!b.in_big_cell) {
        throw Error(ErrorKind::NotInBigCell, "frame leaves the big cell", "x = " + std::to_string(x + s * h));
      }
      minus.push_back(b.g_minus);
    }
    int deg = 0;
    for (const TwistedLoop& l : minus) deg = std::max(deg, l.degree());
    TwistedLoop derivative(deg);
    for (int s = 0; s < 7; ++s) {
      if (kStencil[s] == 0.0) continue;
      for (int k = -deg; k <= deg; ++k) derivative.at(k) += (kStencil[s] / h) * minus[s][k];
    }
    const TwistedLoop mc = loop_mul(loop_inverse(minus[3], deg).loop, derivative, deg).loop;

    const cplx a = mc[-1](0, 1);
    const cplx b = mc[-1](1, 0);
    double other = 0.0;
    for (int k = -deg; k <= deg; ++k) {
      Mat2 m = mc[k];
      if (k == -1) m(0, 1) = m(1, 0) = 0.0;
      other += m.squaredNorm();
    }
    other = std::sqrt(other);
    out.structure_defect = std::max(out.structure_defect, other);
    if (other > options.structure_tol * (1.0 + std::abs(a) + std::abs(b))) {
      throw Error(ErrorKind::StructureViolation,
                  "Maurer-Cartan form of the minus factor has content outside mode -1 off-diagonal (" +
                      std::to_string(other) + ")",
                  "x = " + std::to_string(x));
    }
    out.a_samples.push_back(a);
    out.b_samples.push_back(b);
    if (std::abs(a) < options.regular_tol) out.regular = false;
  }

  // Least-squares polynomial fit in powers of (x - center).
  const int n = static_cast<int>(xs.size());
  const int terms = std::max(1, std::min(options.taylor_terms, n));
  Eigen::MatrixXd V(n, terms);
  double reach = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = xs[i] - center;
    reach = std::max(reach, std::abs(t));
    double p = 1.0;
    for (int k = 0; k < terms; ++k, p *= t) V(i, k) = p;
  }
  const auto qr = V.colPivHouseholderQr();
  auto fit = [&](const std::vector<cplx>& values) {
    Eigen::VectorXd re(n), im(n);
    for (int i = 0; i < n; ++i) {
      re(i) = values[i].real();
      im(i) = values[i].imag();
    }
    const Eigen::VectorXd cr = qr.solve(re);
    const Eigen::VectorXd ci = qr.solve(im);
    out.fit_residual = std::max({out.fit_residual, (V * cr - re).cwiseAbs().maxCoeff(),
                                 (V * ci - im).cwiseAbs().maxCoeff()});
    TaylorData t;
    t.center = center;
    t.radius = reach + h;
    for (int k = 0; k < terms; ++k) t.coeffs.emplace_back(cr(k), ci(k));
    return AnalyticFn::taylor(std::move(t));
  };
  out.a0 = fit(out.a_samples);
  out.b0 = fit(out.b_samples);
  return out;
}

}  // namespace cmc
