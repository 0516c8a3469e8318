#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctp/spectral_model.hpp"

namespace ctp {

enum class PathMethod { MovingAverage, Spectral };

/// Discretized realization X(t_k), t_k = start + k * step.
struct SamplePath {
  double step = 0.0;
  double start = 0.0;
  std::vector<cplx> values;
  std::uint64_t seed = 0;
  PathMethod method = PathMethod::MovingAverage;
  bool real_mode = false;
  /// Driving increments (MA paths, when kept). noise[i] is the increment over
  /// the cell (t - h, t] with t = start + (i - noise_offset) * step.
  std::vector<cplx> noise;
  long noise_offset = 0;
  std::vector<std::string> warnings;

  double time(long k) const { return start + static_cast<double>(k) * step; }
  std::size_t size() const { return values.size(); }
};

}  // namespace ctp
