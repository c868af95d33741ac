#include "fft.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include <fftw3.h>

namespace cmc::detail {

namespace {

// Plans are made once per (size, sign) and reused on any array; planning is
// not thread safe in FFTW, execution is.
fftw_plan plan_for(int size, int sign) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  auto& p = plans[{size, sign}];
  if (!p) {
    std::vector<Mat2> scratch(size);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    // The four entries of each block are interleaved with stride 4.
    p = fftw_plan_many_dft(1, &size, 4, buf, nullptr, 4, 1, buf, nullptr, 4, 1, sign,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  return p;
}

}  // namespace

FftPlan::FftPlan(int size) : size_(size) {
  if (size < 1 || (size & (size - 1)) != 0) throw std::invalid_argument("FFT size must be a power of two");
}

void FftPlan::transform(std::vector<Mat2>& data, int sign) const {
  if (static_cast<int>(data.size()) != size_) throw std::invalid_argument("FFT input has the wrong length");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(size_, sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD), buf, buf);
}

}  // namespace cmc::detail
