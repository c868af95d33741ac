#pragma once

#include <vector>

#include "cmc/loop.hpp"

namespace cmc::detail {

// Transform over 2x2 blocks: out_j = sum_k in_k exp(sign 2 pi i j k / M), M a power of two.
class FftPlan {
 public:
  explicit FftPlan(int size);
  int size() const noexcept { return size_; }
  void transform(std::vector<Mat2>& data, int sign) const;

 private:
  int size_;
};

}  // namespace cmc::detail
