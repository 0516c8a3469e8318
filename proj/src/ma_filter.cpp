#include "ma_filter.hpp"

#include <algorithm>
#include <cmath>

namespace ctp::detail {

MaFilter::MaFilter(std::vector<cplx> weights) : weights_(std::move(weights)) {}

std::shared_ptr<const std::vector<cplx>> MaFilter::spectrum(std::size_t n) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
  }
  auto w = std::make_shared<std::vector<cplx>>(n);
  const std::size_t m = std::min(n, weights_.size());
  std::copy_n(weights_.begin(), m, w->begin());
  dft(*w, FftSign::Negative);
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(n, std::move(w)).first->second;
}

std::vector<cplx> MaFilter::synthesize(std::span<const cplx> noise) const {
  const std::size_t J = weights_.size();
  if (J == 0 || noise.size() < J) return std::vector<cplx>(noise.size() >= J ? noise.size() - J + 1 : 0);
  const std::size_t out = noise.size() - J + 1;
  // Circular convolution of length P >= noise.size() is exact at indices >= J-1.
  const std::size_t P = good_fft_size(noise.size());
  auto W = spectrum(P);
  std::vector<cplx> buf(P);
  std::copy(noise.begin(), noise.end(), buf.begin());
  dft(buf, FftSign::Negative);
  for (std::size_t k = 0; k < P; ++k) buf[k] *= (*W)[k];
  dft(buf, FftSign::Positive);
  const double scale = 1.0 / static_cast<double>(P);
  std::vector<cplx> result(out);
  for (std::size_t k = 0; k < out; ++k) result[k] = buf[k + J - 1] * scale;
  return result;
}

std::vector<cplx> MaFilter::deconvolve(std::span<const cplx> path, double mask_level,
                                       std::size_t* masked) const {
  const std::size_t n = path.size();
  const std::size_t P = good_fft_size(std::max(n, weights_.size()));
  auto W = spectrum(P);
  double peak = 0.0;
  for (const cplx& v : *W) peak = std::max(peak, std::abs(v));
  std::vector<cplx> buf(P);
  std::copy(path.begin(), path.end(), buf.begin());
  dft(buf, FftSign::Negative);
  std::size_t count = 0;
  for (std::size_t k = 0; k < P; ++k) {
    if (std::abs((*W)[k]) < mask_level * peak) {
      buf[k] = 0.0;
      ++count;
    } else {
      buf[k] /= (*W)[k];
    }
  }
  dft(buf, FftSign::Positive);
  const double scale = 1.0 / static_cast<double>(P);
  std::vector<cplx> result(n);
  for (std::size_t k = 0; k < n; ++k) result[k] = buf[k] * scale;
  if (masked) *masked = count;
  return result;
}

}  // namespace ctp::detail
