#include "cmc/loop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

#include "cmc/error.hpp"
#include "fft.hpp"

namespace cmc {

namespace {

bool twisting_allows(int k, int row, int col) { return ((k & 1) == 0) == (row == col); }

int positive_mod(int k, int m) { return ((k % m) + m) % m; }

void check_twisted_matrix(int k, const Mat2& m) {
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      if (!twisting_allows(k, r, c) && std::abs(m(r, c)) > 1e-14) {
        throw std::invalid_argument("coefficient of mode " + std::to_string(k) +
                                    " violates the twisting");
      }
    }
  }
}

}  // namespace

TwistedLoop::TwistedLoop(int degree) : degree_(degree), coeffs_(2 * degree + 1, Mat2::Zero()) {
  if (degree < 0) throw std::invalid_argument("loop degree must be non-negative");
}

TwistedLoop TwistedLoop::identity(int degree) {
  TwistedLoop loop(degree);
  loop.at(0) = Mat2::Identity();
  return loop;
}

TwistedLoop TwistedLoop::constant(const Mat2& m, int degree) { return monomial(0, m, degree); }

TwistedLoop TwistedLoop::monomial(int k, const Mat2& m, int degree) {
  if (std::abs(k) > degree) throw std::invalid_argument("monomial mode exceeds the loop degree");
  check_twisted_matrix(k, m);
  TwistedLoop loop(degree);
  loop.at(k) = m;
  loop.enforce_twisting();
  return loop;
}

Mat2 TwistedLoop::operator[](int k) const {
  if (k < -degree_ || k > degree_) return Mat2::Zero();
  return coeffs_[k + degree_];
}

Mat2& TwistedLoop::at(int k) {
  if (k < -degree_ || k > degree_) throw std::out_of_range("loop mode out of range");
  return coeffs_[k + degree_];
}

TwistedLoop TwistedLoop::resized(int degree) const {
  TwistedLoop out(degree);
  const int keep = std::min(degree, degree_);
  for (int k = -keep; k <= keep; ++k) out.at(k) = (*this)[k];
  return out;
}

double TwistedLoop::norm() const {
  double sum = 0.0;
  for (const Mat2& m : coeffs_) sum += m.squaredNorm();
  return std::sqrt(sum);
}

double TwistedLoop::twisting_defect() const {
  double sum = 0.0;
  for (int k = -degree_; k <= degree_; ++k) {
    const Mat2& m = coeffs_[k + degree_];
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        if (!twisting_allows(k, r, c)) sum += std::norm(m(r, c));
      }
    }
  }
  return std::sqrt(sum);
}

void TwistedLoop::enforce_twisting() {
  for (int k = -degree_; k <= degree_; ++k) {
    Mat2& m = coeffs_[k + degree_];
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        if (!twisting_allows(k, r, c)) m(r, c) = 0.0;
      }
    }
  }
}

Mat2 TwistedLoop::evaluate(cplx lambda) const {
  // Horner from the top mode down, then shift by lambda^{-N}.
  Mat2 acc = coeffs_.back();
  for (int i = static_cast<int>(coeffs_.size()) - 2; i >= 0; --i) acc = acc * lambda + coeffs_[i];
  return acc * std::pow(lambda, -degree_);
}

TwistedLoop operator+(const TwistedLoop& a, const TwistedLoop& b) {
  TwistedLoop out = a.resized(std::max(a.degree(), b.degree()));
  for (int k = -b.degree(); k <= b.degree(); ++k) out.at(k) += b[k];
  return out;
}

TwistedLoop operator-(const TwistedLoop& a, const TwistedLoop& b) { return a + cplx(-1.0) * b; }

TwistedLoop operator*(cplx s, const TwistedLoop& a) {
  TwistedLoop out = a;
  for (Mat2& m : out.coefficients()) m *= s;
  return out;
}

PlusLoop::PlusLoop(int degree) : degree_(degree), coeffs_(degree + 1, Mat2::Zero()) {
  if (degree < 0) throw std::invalid_argument("loop degree must be non-negative");
}

PlusLoop PlusLoop::from_loop(const TwistedLoop& loop, int degree) {
  PlusLoop out(degree);
  for (int k = 0; k <= degree; ++k) out.at(k) = loop[k];
  return out;
}

Mat2 PlusLoop::operator[](int k) const {
  if (k < 0 || k > degree_) return Mat2::Zero();
  return coeffs_[k];
}

Mat2& PlusLoop::at(int k) {
  if (k < 0 || k > degree_) throw std::out_of_range("plus-loop mode out of range");
  return coeffs_[k];
}

TwistedLoop PlusLoop::to_loop() const {
  TwistedLoop out(degree_);
  for (int k = 0; k <= degree_; ++k) out.at(k) = coeffs_[k];
  out.enforce_twisting();
  return out;
}

Mat2 PlusLoop::evaluate(cplx lambda) const {
  Mat2 acc = coeffs_.back();
  for (int i = degree_ - 1; i >= 0; --i) acc = acc * lambda + coeffs_[i];
  return acc;
}

int sample_count_for(int degree) {
  int m = 4;
  while (m < 4 * degree + 4) m <<= 1;
  return m;
}

cplx circle_point(int j, int sample_count) {
  const double angle = 2.0 * std::numbers::pi * j / sample_count;
  return {std::cos(angle), std::sin(angle)};
}

CircleSamples to_samples(const TwistedLoop& loop, int sample_count) {
  std::vector<Mat2> data(sample_count, Mat2::Zero());
  for (int k = -loop.degree(); k <= loop.degree(); ++k) {
    data[positive_mod(k, sample_count)] += loop[k];
  }
  detail::FftPlan(sample_count).transform(data, +1);
  return CircleSamples{std::move(data)};
}

Truncated from_samples(const CircleSamples& samples, int degree) {
  const int m = samples.size();
  if (2 * degree + 1 > m) throw std::invalid_argument("too few circle samples for the requested degree");
  std::vector<Mat2> data = samples.values;
  detail::FftPlan(m).transform(data, -1);
  for (Mat2& c : data) c /= static_cast<double>(m);

  Truncated out{TwistedLoop(degree), 0.0};
  double spill = 0.0;
  for (int idx = 0; idx < m; ++idx) {
    const int k = idx <= m / 2 ? idx : idx - m;
    if (std::abs(k) <= degree) {
      out.loop.at(k) = data[idx];
    } else {
      spill += data[idx].squaredNorm();
    }
  }
  const double twist = out.loop.twisting_defect();
  out.loop.enforce_twisting();
  out.spill = std::sqrt(spill + twist * twist);
  return out;
}

Mat2 loop_eval(const TwistedLoop& loop, cplx lambda) {
  if (std::abs(std::abs(lambda) - 1.0) > kCircleTolerance) {
    throw Error(ErrorKind::OffCircle, "loop evaluation requires |lambda| = 1");
  }
  return loop.evaluate(lambda);
}

Truncated loop_mul(const TwistedLoop& a, const TwistedLoop& b, int max_degree) {
  const int full = a.degree() + b.degree();
  int m = 4;
  while (m < 2 * full + 1) m <<= 1;
  CircleSamples sa = to_samples(a, m);
  const CircleSamples sb = to_samples(b, m);
  for (int j = 0; j < m; ++j) sa.values[j] = sa.values[j] * sb.values[j];
  Truncated product = from_samples(sa, full);
  if (max_degree < 0 || max_degree >= full) return product;

  double spill = product.spill * product.spill;
  for (int k = max_degree + 1; k <= full; ++k) {
    spill += product.loop[k].squaredNorm() + product.loop[-k].squaredNorm();
  }
  return Truncated{product.loop.resized(max_degree), std::sqrt(spill)};
}

Truncated loop_inverse(const TwistedLoop& a, int degree) {
  if (degree < 0) degree = a.degree();
  const int m = sample_count_for(std::max(a.degree(), degree));
  CircleSamples s = to_samples(a, m);
  for (Mat2& v : s.values) {
    const cplx det = v.determinant();
    if (std::abs(det) < 1e-10) {
      throw Error(ErrorKind::NearSingularLoop,
                  "loop determinant nearly vanishes on the circle (|det| = " +
                      std::to_string(std::abs(det)) + ")");
    }
    Mat2 inv;
    inv << v(1, 1), -v(0, 1), -v(1, 0), v(0, 0);
    v = inv / det;
  }
  return from_samples(s, degree);
}

TwistedLoop loop_star(const TwistedLoop& a) {
  TwistedLoop out(a.degree());
  for (int k = -a.degree(); k <= a.degree(); ++k) out.at(k) = a[-k].adjoint();
  return out;
}

Mat2 loop_dlambda_eval(const TwistedLoop& a, cplx lambda) {
  if (std::abs(std::abs(lambda) - 1.0) > kCircleTolerance) {
    throw Error(ErrorKind::OffCircle, "lambda derivative requires |lambda| = 1");
  }
  Mat2 acc = Mat2::Zero();
  cplx power = std::pow(lambda, -a.degree() - 1);
  for (int k = -a.degree(); k <= a.degree(); ++k) {
    if (k != 0) acc += static_cast<double>(k) * power * a[k];
    power *= lambda;
  }
  return acc;
}

double det_defect(const TwistedLoop& a, int sample_count) {
  if (sample_count <= 0) sample_count = sample_count_for(a.degree());
  const CircleSamples s = to_samples(a, sample_count);
  double worst = 0.0;
  for (const Mat2& v : s.values) worst = std::max(worst, std::abs(v.determinant() - 1.0));
  return worst;
}

double unitarity_defect(const TwistedLoop& a, int sample_count) {
  if (sample_count <= 0) sample_count = sample_count_for(a.degree());
  const CircleSamples s = to_samples(a, sample_count);
  double worst = 0.0;
  for (const Mat2& v : s.values) {
    worst = std::max(worst, (v.adjoint() * v - Mat2::Identity()).norm());
  }
  return worst;
}

double max_circle_distance(const TwistedLoop& a, const TwistedLoop& b, int sample_count) {
  if (sample_count <= 0) sample_count = sample_count_for(std::max(a.degree(), b.degree()));
  const CircleSamples sa = to_samples(a, sample_count);
  const CircleSamples sb = to_samples(b, sample_count);
  double worst = 0.0;
  for (int j = 0; j < sample_count; ++j) worst = std::max(worst, (sa.values[j] - sb.values[j]).norm());
  return worst;
}

int effective_degree(const TwistedLoop& a, double rel_tol) {
  double top = 0.0;
  for (const Mat2& m : a.coefficients()) top = std::max(top, m.norm());
  for (int k = a.degree(); k > 0; --k) {
    if (a[k].norm() + a[-k].norm() > rel_tol * top) return k;
  }
  return 0;
}

}  // namespace cmc
