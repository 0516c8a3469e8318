#pragma once

// Internal numerical helpers shared by the modules. Not installed.

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ctp::detail {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class FftSign { Negative, Positive };  // sign of the exponent in e^{+-2 pi i jk/N}

/// In-place unnormalized DFT: out_k = sum_j in_j e^{sign 2 pi i jk/N}.
/// Thread-safe (planning is serialized internally).
void dft(std::vector<cplx>& data, FftSign sign);

/// Smallest 2^k or 3 * 2^k that is >= n.
std::size_t good_fft_size(std::size_t n);

/// Linear convolution of two sequences via zero-padded FFT.
std::vector<cplx> convolve(std::span<const cplx> a, std::span<const cplx> b);

/// Real dilogarithm Li2(x) for x <= 1.
double dilog(double x);

/// Integral over [a, b] of the piecewise-cubic Lagrange interpolant of samples
/// f_k at s_k = s0 + k h. [a, b] must lie inside the sampled range.
double integrate_cubic(std::span<const double> f, double s0, double h, double a, double b);

/// Piecewise-cubic interpolation of the samples at s.
double interpolate_cubic(std::span<const double> f, double s0, double h, double s);
cplx interpolate_cubic(std::span<const cplx> f, double s0, double h, double s);

/// int_0^1 e^{i theta y} dy and int_0^1 y e^{i theta y} dy, stable at small theta.
cplx filon_e0(double theta);
cplx filon_e1(double theta);

/// Seed for an independent stream keyed by (seed, stream index).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a(std::string_view text);

}  // namespace ctp::detail
