#include "cmc/potential.hpp"

#include <cmath>

#include "cmc/error.hpp"

namespace cmc {

namespace {

bool allowed(int mode, int row, int col) { return ((mode % 2 == 0) == (row == col)); }

}  // namespace

HolomorphicPotential::HolomorphicPotential(int lowest_mode, int highest_mode)
    : lo_(lowest_mode), hi_(highest_mode) {
  if (highest_mode < lowest_mode) throw std::invalid_argument("empty mode band");
  modes_.resize(static_cast<std::size_t>(hi_ - lo_ + 1));
}

const AnalyticFn& HolomorphicPotential::entry(int mode, int row, int col) const {
  static const AnalyticFn zero;
  if (mode < lo_ || mode > hi_) return zero;
  return modes_[static_cast<std::size_t>(mode - lo_)][row][col];
}

void HolomorphicPotential::set(int mode, int row, int col, AnalyticFn f) {
  if (mode < lo_ || mode > hi_) throw std::out_of_range("potential mode outside the band");
  if (!allowed(mode, row, col) && !f.is_zero()) {
    throw Error(ErrorKind::StructureViolation,
                "entry (" + std::to_string(row) + "," + std::to_string(col) + ") of mode " +
                    std::to_string(mode) + " breaks the twisting");
  }
  modes_[static_cast<std::size_t>(mode - lo_)][row][col] = std::move(f);
}

void HolomorphicPotential::check_invariants(const std::vector<cplx>& probes) const {
  for (int m = lo_; m <= hi_; ++m) {
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        if (!allowed(m, r, c) && !entry(m, r, c).is_zero()) {
          throw Error(ErrorKind::StructureViolation, "potential is not twisted");
        }
      }
    }
    const AnalyticFn trace = entry(m, 0, 0) + entry(m, 1, 1);
    if (trace.is_zero()) continue;
    for (cplx z : probes) {
      const cplx t = trace.eval_complex(z);
      const double scale = 1.0 + std::abs(entry(m, 0, 0).eval_complex(z));
      if (std::abs(t) > 1e-12 * scale) {
        throw Error(ErrorKind::StructureViolation, "potential is not trace free",
                    "mode " + std::to_string(m));
      }
    }
    if (probes.empty()) throw Error(ErrorKind::StructureViolation, "potential trace is not structurally zero");
  }
}

std::vector<Mat2> HolomorphicPotential::evaluate(cplx z) const {
  std::vector<Mat2> out;
  for (int m = lo_; m <= hi_; ++m) {
    Mat2 a;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) a(r, c) = entry(m, r, c).eval_complex(z);
    }
    out.push_back(a);
  }
  return out;
}

HolomorphicPotential HolomorphicPotential::pulled_back(const AnalyticFn& phi) const {
  HolomorphicPotential out(lo_, hi_);
  const AnalyticFn dphi = phi.derivative();
  for (int m = lo_; m <= hi_; ++m) {
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        const AnalyticFn& e = entry(m, r, c);
        if (!e.is_zero()) out.set(m, r, c, dphi * e.substitute(phi));
      }
    }
  }
  return out;
}

std::vector<std::array<std::array<std::string, 2>, 2>> HolomorphicPotential::to_strings() const {
  std::vector<std::array<std::array<std::string, 2>, 2>> out;
  for (int m = lo_; m <= hi_; ++m) {
    std::array<std::array<std::string, 2>, 2> block;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) block[r][c] = entry(m, r, c).to_string();
    }
    out.push_back(block);
  }
  return out;
}

PotentialEvaluator::PotentialEvaluator(const HolomorphicPotential& xi, double regular_tol)
    : lo_(xi.lowest_mode()), hi_(xi.highest_mode()), regular_tol_(regular_tol) {
  std::vector<AnalyticFn> entries;
  for (int m = lo_; m <= hi_; ++m) {
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) entries.push_back(xi.entry(m, r, c));
    }
  }
  fns_ = CompiledFns(entries);
}

void PotentialEvaluator::evaluate(cplx z, std::vector<Mat2>& out) const {
  cplx values[64];
  std::vector<cplx> heap;
  cplx* buf = values;
  if (fns_.size() > 64) {
    heap.resize(fns_.size());
    buf = heap.data();
  }
  fns_.evaluate(z, std::span<cplx>(buf, fns_.size()));
  out.resize(static_cast<std::size_t>(hi_ - lo_ + 1));
  for (int m = lo_; m <= hi_; ++m) {
    const cplx* v = buf + 4 * (m - lo_);
    out[m - lo_] << v[0], v[1], v[2], v[3];
  }
  if (regular_tol_ > 0.0 && lo_ == -1 && std::abs(out[0](0, 1)) < regular_tol_) {
    throw Error(ErrorKind::RegularityLoss, "the lambda^{-1} upper-right entry of the potential vanishes",
                "z = (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
  }
}

}  // namespace cmc
