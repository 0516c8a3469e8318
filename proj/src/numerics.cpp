#include "numerics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string_view>

namespace ctp::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// fftw_malloc keeps alignment fixed, so the planner picks the same codelets
// on every call and repeated runs are bit-identical.
struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : ptr(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {}
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* ptr;
};

}  // namespace

std::size_t good_fft_size(std::size_t n) {
  std::size_t best = 1;
  while (best < n) best <<= 1;
  // 3 * 2^k is often much closer and still fast.
  for (std::size_t p = 3; p < best; p <<= 1)
    if (p >= n) return std::min(best, p);
  return best;
}

void dft(std::vector<cplx>& data, FftSign sign) {
  const std::size_t n = data.size();
  if (n == 0) return;
  const int dir = sign == FftSign::Negative ? FFTW_FORWARD : FFTW_BACKWARD;
  FftwBuffer buf(n);
  fftw_plan plan;
  {
    // Plans are cached per (size, direction); executing a cached in-place
    // plan on a fresh fftw_malloc buffer is thread-safe.
    static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto it = cache.find({n, dir});
    if (it == cache.end())
      it = cache.emplace(std::make_pair(n, dir),
                         fftw_plan_dft_1d(static_cast<int>(n), buf.ptr, buf.ptr, dir, FFTW_ESTIMATE))
               .first;
    plan = it->second;
  }
  auto* raw = reinterpret_cast<double*>(data.data());
  for (std::size_t k = 0; k < n; ++k) {
    buf.ptr[k][0] = raw[2 * k];
    buf.ptr[k][1] = raw[2 * k + 1];
  }
  fftw_execute_dft(plan, buf.ptr, buf.ptr);
  for (std::size_t k = 0; k < n; ++k) data[k] = cplx(buf.ptr[k][0], buf.ptr[k][1]);
}

std::vector<cplx> convolve(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out = a.size() + b.size() - 1;
  const std::size_t n = good_fft_size(out);
  std::vector<cplx> fa(n), fb(n);
  std::copy(a.begin(), a.end(), fa.begin());
  std::copy(b.begin(), b.end(), fb.begin());
  dft(fa, FftSign::Negative);
  dft(fb, FftSign::Negative);
  for (std::size_t k = 0; k < n; ++k) fa[k] *= fb[k];
  dft(fa, FftSign::Positive);
  const double scale = 1.0 / static_cast<double>(n);
  std::vector<cplx> result(out);
  for (std::size_t k = 0; k < out; ++k) result[k] = fa[k] * scale;
  return result;
}

double dilog(double x) {
  if (x == 1.0) return kPi * kPi / 6.0;
  if (x == 0.0) return 0.0;
  if (x < -1.0) {
    // Li2(x) = -pi^2/6 - 1/2 log^2(-x) - Li2(1/x)
    const double l = std::log(-x);
    return -kPi * kPi / 6.0 - 0.5 * l * l - dilog(1.0 / x);
  }
  if (x < -0.5) {
    // Landen: Li2(x) = -Li2(x/(x-1)) - 1/2 log^2(1-x)
    const double l = std::log1p(-x);
    return -dilog(x / (x - 1.0)) - 0.5 * l * l;
  }
  if (x > 0.5) {
    // Li2(x) = pi^2/6 - log(x) log(1-x) - Li2(1-x)
    return kPi * kPi / 6.0 - std::log(x) * std::log1p(-x) - dilog(1.0 - x);
  }
  double sum = 0.0, power = x;
  for (int k = 1; k < 200; ++k) {
    const double term = power / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    power *= x;
  }
  return sum;
}

namespace {

// Lagrange basis on nodes {-1, 0, 1, 2} integrated over [u0, u1].
void cubic_weights(double u0, double u1, double w[4]) {
  // Antiderivatives of the four basis polynomials.
  auto F = [](double u, double out[4]) {
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u;
    // l_{-1} = -u(u-1)(u-2)/6 = -(u^3 - 3u^2 + 2u)/6
    out[0] = -(u4 / 4 - u3 + u2) / 6.0;
    // l_0 = (u+1)(u-1)(u-2)/2 = (u^3 - 2u^2 - u + 2)/2
    out[1] = (u4 / 4 - 2 * u3 / 3 - u2 / 2 + 2 * u) / 2.0;
    // l_1 = -(u+1)u(u-2)/2 = -(u^3 - u^2 - 2u)/2
    out[2] = -(u4 / 4 - u3 / 3 - u2) / 2.0;
    // l_2 = (u+1)u(u-1)/6 = (u^3 - u)/6
    out[3] = (u4 / 4 - u2 / 2) / 6.0;
  };
  double a[4], b[4];
  F(u0, a);
  F(u1, b);
  for (int i = 0; i < 4; ++i) w[i] = b[i] - a[i];
}

// Stencil start for cell k so that nodes first..first+3 exist.
long stencil_start(long k, long n) {
  return std::clamp(k - 1, 0L, std::max(0L, n - 4));
}

template <class T>
T integrate_cell(std::span<const T> f, long k, double u0, double u1) {
  const long n = static_cast<long>(f.size());
  if (n < 4) {
    // Linear fallback.
    const T fa = f[static_cast<std::size_t>(k)];
    const T fb = f[static_cast<std::size_t>(std::min(k + 1, n - 1))];
    const double m0 = u1 - u0, m1 = 0.5 * (u1 * u1 - u0 * u0);
    return fa * (m0 - m1) + fb * m1;
  }
  const long first = stencil_start(k, n);
  const double shift = static_cast<double>(k - first - 1);  // node offset of k in {-1,0,1,2}
  double w[4];
  cubic_weights(u0 + shift, u1 + shift, w);
  T sum{};
  for (int i = 0; i < 4; ++i) sum += f[static_cast<std::size_t>(first + i)] * w[i];
  return sum;
}

template <class T>
T interpolate_impl(std::span<const T> f, double s0, double h, double s) {
  const long n = static_cast<long>(f.size());
  const double x = (s - s0) / h;
  long k = static_cast<long>(std::floor(x));
  k = std::clamp(k, 0L, std::max(0L, n - 2));
  const double u = x - static_cast<double>(k);
  if (n < 4) {
    const T fa = f[static_cast<std::size_t>(k)];
    const T fb = f[static_cast<std::size_t>(std::min(k + 1, n - 1))];
    return fa * (1.0 - u) + fb * u;
  }
  const long first = stencil_start(k, n);
  const double v = u + static_cast<double>(k - first - 1);
  const double l[4] = {-v * (v - 1) * (v - 2) / 6.0, (v + 1) * (v - 1) * (v - 2) / 2.0,
                       -(v + 1) * v * (v - 2) / 2.0, (v + 1) * v * (v - 1) / 6.0};
  T sum{};
  for (int i = 0; i < 4; ++i) sum += f[static_cast<std::size_t>(first + i)] * l[i];
  return sum;
}

}  // namespace

double integrate_cubic(std::span<const double> f, double s0, double h, double a, double b) {
  if (b <= a || f.size() < 2) return 0.0;
  const long n = static_cast<long>(f.size());
  const double xa = (a - s0) / h, xb = (b - s0) / h;
  long ka = std::clamp(static_cast<long>(std::floor(xa)), 0L, n - 2);
  long kb = std::clamp(static_cast<long>(std::floor(xb)), 0L, n - 2);
  // b on a node belongs to the cell to its left.
  if (static_cast<double>(kb) == xb && kb > 0) --kb;
  double sum = 0.0;
  for (long k = ka; k <= kb; ++k) {
    const double u0 = std::max(0.0, xa - static_cast<double>(k));
    const double u1 = std::min(1.0, xb - static_cast<double>(k));
    if (u1 > u0) sum += integrate_cell<double>(f, k, u0, u1);
  }
  return sum * h;
}

double interpolate_cubic(std::span<const double> f, double s0, double h, double s) {
  return interpolate_impl<double>(f, s0, h, s);
}

cplx interpolate_cubic(std::span<const cplx> f, double s0, double h, double s) {
  return interpolate_impl<cplx>(f, s0, h, s);
}

cplx filon_e0(double theta) {
  if (std::abs(theta) < 0.5) {
    // sum (i theta)^n / (n+1)!
    cplx term = 1.0, sum = 0.0;
    for (int n = 0; n < 20; ++n) {
      sum += term;
      term *= cplx(0.0, theta) / static_cast<double>(n + 2);
    }
    return sum;
  }
  const cplx e = std::exp(cplx(0.0, theta));
  return (e - 1.0) / cplx(0.0, theta);
}

cplx filon_e1(double theta) {
  if (std::abs(theta) < 0.5) {
    // sum (i theta)^n / (n! (n+2))
    cplx power = 1.0, sum = 0.0;
    double factorial = 1.0;
    for (int n = 0; n < 20; ++n) {
      sum += power / (factorial * (n + 2));
      power *= cplx(0.0, theta);
      factorial *= (n + 1);
    }
    return sum;
  }
  const cplx e = std::exp(cplx(0.0, theta));
  const cplx it(0.0, theta);
  return e / it + (e - 1.0) / (theta * theta);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  // Two rounds of splitmix64 over (seed, stream).
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace ctp::detail
