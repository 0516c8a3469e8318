#pragma once

// Discrete moving-average filter X_k = sum_j w_j xi_{k-j} shared by the
// simulator and the whitening transform.

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "numerics.hpp"

namespace ctp::detail {

class MaFilter {
 public:
  explicit MaFilter(std::vector<cplx> weights);

  const std::vector<cplx>& weights() const { return weights_; }
  std::size_t length() const { return weights_.size(); }

  /// DFT (negative exponent) of the weights zero-padded to n; cached.
  std::shared_ptr<const std::vector<cplx>> spectrum(std::size_t n) const;

  /// Valid part of the linear convolution: noise.size() - length() + 1 values,
  /// out[k] = sum_j w_j noise[k + length() - 1 - j].
  std::vector<cplx> synthesize(std::span<const cplx> noise) const;

  /// Frequency-domain division of the zero-padded path by the weight
  /// spectrum. Bins with |W| < mask_level * max |W| are zeroed and counted.
  std::vector<cplx> deconvolve(std::span<const cplx> path, double mask_level,
                               std::size_t* masked) const;

 private:
  std::vector<cplx> weights_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::shared_ptr<const std::vector<cplx>>> cache_;
};

}  // namespace ctp::detail
