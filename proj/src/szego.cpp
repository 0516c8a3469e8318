#include "ctp/szego.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctp/error.hpp"
#include "numerics.hpp"

namespace ctp {

using detail::kPi;
using detail::kTwoPi;

SzegoFactor::SzegoFactor(FrequencyGrid grid, std::vector<cplx> c_freq, TimeGrid time_grid,
                         std::vector<cplx> c_time, double leak_energy, double truncated_energy,
                         double log_integral, cplx value_at_minus_i, int phase_sign)
    : grid_(grid),
      c_freq_(std::move(c_freq)),
      time_grid_(time_grid),
      extent_count_(std::lround(time_grid.extent / time_grid.step)),
      c_time_(std::move(c_time)),
      leak_energy_(leak_energy),
      truncated_energy_(truncated_energy),
      log_integral_(log_integral),
      value_at_minus_i_(value_at_minus_i),
      phase_sign_(phase_sign) {
  if (c_freq_.size() != grid_.size())
    throw Error(Errc::Config, "c_freq size does not match the frequency grid");
  if (c_time_.size() != static_cast<std::size_t>(2 * extent_count_ + 1))
    throw Error(Errc::Config, "c_time size does not match the time grid");
  rebuild_energy();
}

void SzegoFactor::rebuild_energy() {
  power_.resize(static_cast<std::size_t>(extent_count_ + 1));
  for (std::size_t k = 0; k < power_.size(); ++k) power_[k] = std::norm(c_time_[k]);
}

cplx SzegoFactor::kernel_at(double s) const {
  if (s > 0.0 || s < -time_grid_.extent) return 0.0;
  return detail::interpolate_cubic(kernel(), -time_grid_.extent, time_grid_.step, s);
}

double SzegoFactor::energy_between(double a, double b) const {
  a = std::max(a, -time_grid_.extent);
  b = std::min(b, 0.0);
  if (b <= a) return 0.0;
  return detail::integrate_cubic(power_, -time_grid_.extent, time_grid_.step, a, b);
}

double SzegoFactor::effective_support() const {
  const double total = total_energy();
  const double h = time_grid_.step;
  double acc = 0.0;
  for (long k = 0; k < extent_count_; ++k) {
    const double s = -static_cast<double>(k) * h;
    acc += energy_between(s - h, s);
    if (acc >= (1.0 - 1e-8) * total) return static_cast<double>(k + 1) * h;
  }
  return time_grid_.extent;
}

SzegoFactor SzegoFactor::with_kernel(std::vector<cplx> c_time) const {
  return SzegoFactor(grid_, c_freq_, time_grid_, std::move(c_time), leak_energy_,
                     truncated_energy_, log_integral_, value_at_minus_i_, phase_sign_);
}

SzegoFactor SzegoFactor::rotated(double theta) const {
  const cplx u = std::polar(1.0, theta);
  std::vector<cplx> f = c_freq_, t = c_time_;
  for (auto& v : f) v *= u;
  for (auto& v : t) v *= u;
  return SzegoFactor(grid_, std::move(f), time_grid_, std::move(t), leak_energy_,
                     truncated_energy_, log_integral_, value_at_minus_i_ * u, phase_sign_);
}

namespace {

double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(std::abs(x)); }

// Product-integration weight of node i for PV int l(x)/(mu_j - x) dx with
// piecewise-linear l, as a function of m = j - i (grid units).
double pv_weight(long m) {
  if (m == 0) return 0.0;
  const double a = std::abs(static_cast<double>(m));
  const double w = a == 1.0 ? 2.0 * std::log(2.0)
                            : a * std::log1p(-1.0 / (a * a)) + std::log1p(2.0 / (a - 1.0));
  return m > 0 ? w : -w;
}

// int_0^1 (-log u) M / (u^2 + M^2) du = int_M^inf log(x/M) / (1 + x^2) dx
double log_tail_integral(double m) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate([m](double u) { return -std::log(u) * m / (u * u + m * m); },
                              0.0, 1.0);
}

struct Candidate {
  std::vector<cplx> c_freq;
  std::vector<cplx> c_time;  // on [-L, L]
  double leak = 0.0;
  double truncated = 0.0;
};

// Continuation slope of 1/2 log G' in log|mu| at each band edge.
struct EdgeSlopes {
  double left = 0.0;
  double right = 0.0;
};

std::vector<double> hilbert_phase(std::span<const double> ell, long k, EdgeSlopes slope) {
  const std::size_t n = ell.size();
  std::vector<cplx> signal(ell.begin(), ell.end());
  std::vector<cplx> weights(static_cast<std::size_t>(4 * k + 1));
  for (long m = -2 * k; m <= 2 * k; ++m) weights[static_cast<std::size_t>(m + 2 * k)] = pv_weight(m);
  const auto conv = detail::convolve(signal, weights);

  const double lk = ell[n - 1], lmk = ell[0];
  const double logk = std::log(static_cast<double>(k));
  std::vector<double> phase(n);
  for (long j = -k; j <= k; ++j) {
    double pv = conv[static_cast<std::size_t>(j + 3 * k)].real();
    // Right band end merged with the continuation on (M, inf).
    const double nr = static_cast<double>(j - k);
    pv += lk * (-1.0 + xlogx(nr) + xlogx(1.0 - nr) - logk);
    pv -= slope.right * detail::dilog(static_cast<double>(j) / static_cast<double>(k));
    // Left band end merged with the continuation on (-inf, -M).
    const double nl = static_cast<double>(j + k + 1);
    pv -= lmk * (-1.0 + xlogx(nl) - xlogx(nl - 1.0) - logk);
    pv += slope.left * detail::dilog(-static_cast<double>(j) / static_cast<double>(k));
    phase[static_cast<std::size_t>(j + k)] = pv / kPi;
  }
  return phase;
}

long gauge_index(const SpectralModel& model) {
  const long k = model.grid().half_count();
  for (long d = 0; d <= k; ++d) {
    if (model.sample(d) > model.floor()) return d;
    if (model.sample(-d) > model.floor()) return -d;
  }
  return 0;
}

Candidate build_candidate(const SpectralModel& model, std::span<const double> ell,
                          std::span<const double> hilbert, int sign, TimeGrid tg,
                          std::size_t period) {
  const auto& grid = model.grid();
  const long k = grid.half_count();
  const long g = gauge_index(model);
  const double phase0 = sign * hilbert[static_cast<std::size_t>(g + k)];

  Candidate cand;
  cand.c_freq.resize(grid.size());
  for (long j = -k; j <= k; ++j) {
    const auto i = static_cast<std::size_t>(j + k);
    cand.c_freq[i] = std::polar(std::exp(ell[i]), sign * hilbert[i] - phase0);
  }

  // Pole part a1/z + a2/z^2, z = kappa + 2 pi i mu, <-> (a1 - a2 s) e^{kappa s}
  // on s <= 0 carries the jump of c* at 0. It matches c at both band edges so
  // the remainder is continuous where the band is cut (no 1/s ringing).
  const double m = grid.cutoff;
  const double kappa = std::max(1.0, 40.0 / tg.extent);
  cplx a1 = 0.0, a2 = 0.0;
  if (model.right_tail().closed && model.left_tail().closed) {
    const cplx zp(kappa, kTwoPi * m), zm(kappa, -kTwoPi * m);
    const cplx up = cand.c_freq.back() * zp * zp, um = cand.c_freq.front() * zm * zm;
    a1 = (up - um) / (zp - zm);
    a2 = up - a1 * zp;
  }

  const auto n = static_cast<long>(period);
  std::vector<cplx> buf(period, 0.0);
  for (long j = -k; j <= k; ++j) {
    const double w = (j == -k || j == k) ? 0.5 : 1.0;
    const cplx z(kappa, kTwoPi * grid.node(j));
    const cplx rho = cand.c_freq[static_cast<std::size_t>(j + k)] - a1 / z - a2 / (z * z);
    buf[static_cast<std::size_t>((j % n + n) % n)] += w * grid.spacing * rho;
  }
  detail::dft(buf, detail::FftSign::Negative);

  const long lc = std::lround(tg.extent / tg.step);
  double e_pos = 0.0, e_all = 0.0, e_cut = 0.0;
  cand.c_time.assign(static_cast<std::size_t>(2 * lc + 1), 0.0);
  for (long q = -n / 2; q < n - n / 2; ++q) {
    const double s = static_cast<double>(q) * tg.step;
    cplx v = buf[static_cast<std::size_t>((q % n + n) % n)];
    if (q <= 0) v += (a1 - a2 * s) * std::exp(kappa * s);
    const double e = std::norm(v);
    e_all += e;
    if (q > 0) e_pos += e;
    if (q < -lc) e_cut += e;
    if (q >= -lc && q <= lc) cand.c_time[static_cast<std::size_t>(q + lc)] = v;
  }
  cand.leak = e_all > 0.0 ? e_pos / e_all : 0.0;
  cand.truncated = e_all > 0.0 ? e_cut / e_all : 0.0;
  return cand;
}

cplx value_at_minus_i(std::span<const cplx> kernel, double extent, double step) {
  std::vector<double> re(kernel.size()), im(kernel.size());
  for (std::size_t q = 0; q < kernel.size(); ++q) {
    const double s = -extent + static_cast<double>(q) * step;
    const cplx v = kernel[q] * std::exp(kTwoPi * s);
    re[q] = v.real();
    im[q] = v.imag();
  }
  return {detail::integrate_cubic(re, -extent, step, -extent, 0.0),
          detail::integrate_cubic(im, -extent, step, -extent, 0.0)};
}

// (1/2pi) int log G' / (1 + mu^2) over the line, band by trapezoid on the
// floored samples, tails by the power-law continuation.
double log_integral_rhs(const SpectralModel& model) {
  const auto& grid = model.grid();
  const long k = grid.half_count();
  const double floor = model.floor();
  double band = 0.0;
  for (long j = -k; j <= k; ++j) {
    const double w = (j == -k || j == k) ? 0.5 * grid.spacing : grid.spacing;
    const double mu = grid.node(j);
    band += w * std::log(std::max(model.sample(j), floor)) / (1.0 + mu * mu);
  }
  const double m = grid.cutoff;
  const double atan_tail = 0.5 * kPi - std::atan(m);
  const double log_tail = log_tail_integral(m);
  const double right = std::log(std::max(model.sample(k), floor)) * atan_tail +
                       2.0 * model.right_tail().log_slope * log_tail;
  const double left = std::log(std::max(model.sample(-k), floor)) * atan_tail +
                      2.0 * model.left_tail().log_slope * log_tail;
  return (band + left + right) / kTwoPi;
}

}  // namespace

SzegoFactor factorize(const SpectralModel& model, TimeGrid tg, const FactorTolerances& tol) {
  const auto regularity = szego_integral(model, RegularityConfig{model.floor()});
  if (regularity.classification == Regularity::Deterministic) {
    std::ostringstream os;
    os << "density is deterministic (floored Szego integral " << regularity.floored_value
       << ", sub-floor fraction " << regularity.subfloor_fraction << "); no outer factor exists";
    throw Error(Errc::Regularity, os.str());
  }
  if (!(tg.step > 0.0) || !(tg.extent > 0.0))
    throw Error(Errc::Config, "time grid needs h > 0 and L > 0");
  const auto& grid = model.grid();
  const double period_d = 1.0 / (tg.step * grid.spacing);
  const auto period = static_cast<std::size_t>(std::llround(period_d));
  if (std::abs(period_d - static_cast<double>(period)) > 1e-9 * period_d)
    throw Error(Errc::Config, "1 / (h * dmu) must be an integer");
  const double ratio = tg.extent / tg.step;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
    throw Error(Errc::Config, "L / h must be an integer");
  const long k = grid.half_count();
  if (static_cast<std::size_t>(2 * k + 1) > period)
    throw Error(Errc::Config, "time step too coarse for the band: need h <= 1 / (2 M)");
  if (2 * std::lround(ratio) >= static_cast<long>(period))
    throw Error(Errc::Config, "kernel extent L must be below half of 1 / dmu");

  std::vector<double> ell(grid.size());
  for (long j = -k; j <= k; ++j)
    ell[static_cast<std::size_t>(j + k)] = 0.5 * std::log(std::max(model.sample(j), model.floor()));
  const auto hilbert =
      hilbert_phase(ell, k, {model.left_tail().log_slope, model.right_tail().log_slope});

  auto lower = build_candidate(model, ell, hilbert, -1, tg, period);
  auto upper = build_candidate(model, ell, hilbert, +1, tg, period);
  const bool flip = upper.leak < lower.leak;
  Candidate& best = flip ? upper : lower;
  if (best.leak > tol.support) {
    std::ostringstream os;
    os << "no anticausal factor: leak energy " << lower.leak << " (sign -1) and " << upper.leak
       << " (sign +1) both exceed " << tol.support;
    throw Error(Errc::Factorization, os.str());
  }

  const auto lc = static_cast<std::size_t>(std::lround(ratio));
  const std::span<const cplx> kernel = std::span<const cplx>(best.c_time).first(lc + 1);
  const cplx at_minus_i = value_at_minus_i(kernel, tg.extent, tg.step);
  return SzegoFactor(grid, std::move(best.c_freq), tg, std::move(best.c_time), best.leak,
                     best.truncated, log_integral_rhs(model), at_minus_i, flip ? +1 : -1);
}

LogIntegralCheck log_integral_check(const SzegoFactor& factor, const SpectralModel& model) {
  LogIntegralCheck out;
  const auto& tg = factor.time_grid();
  out.lhs = std::log(std::abs(value_at_minus_i(factor.kernel(), tg.extent, tg.step)));
  out.rhs = log_integral_rhs(model);
  out.discrepancy = std::abs(out.lhs - out.rhs);
  return out;
}

bool FactorDiagnostics::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

FactorDiagnostics verify_factor(const SzegoFactor& factor, const SpectralModel& model,
                                const FactorTolerances& tol) {
  FactorDiagnostics d;
  const auto samples = model.samples();
  const auto c = factor.c_freq();
  double peak = 0.0, worst = 0.0;
  for (double g : samples) peak = std::max(peak, g);
  for (std::size_t j = 0; j < c.size() && j < samples.size(); ++j)
    worst = std::max(worst, std::abs(std::norm(c[j]) - samples[j]));
  d.modulus_error = peak > 0.0 ? worst / peak : worst;

  const auto full = factor.c_time_full();
  const auto lc = static_cast<std::size_t>(factor.extent_count());
  double e_pos = 0.0, e_all = 0.0, c_max = 0.0, tail = 0.0;
  const auto tail_end = static_cast<std::size_t>(0.05 * static_cast<double>(lc));
  for (std::size_t q = 0; q < full.size(); ++q) {
    const double e = std::norm(full[q]);
    e_all += e;
    if (q > lc) e_pos += e;
    if (q <= lc) c_max = std::max(c_max, std::abs(full[q]));
    if (q <= tail_end) tail = std::max(tail, std::abs(full[q]));
  }
  d.leak_energy = e_all > 0.0 ? e_pos / e_all : 0.0;
  d.tail_level = c_max > 0.0 ? tail / c_max : 0.0;
  d.truncated_energy = factor.truncated_energy();

  const double mass = model.total_mass();
  d.plancherel_gap = std::abs(factor.total_energy() - mass) / mass;
  d.log_integral_gap = log_integral_check(factor, model).discrepancy;

  d.checks = {
      {"modulus", d.modulus_error, tol.modulus, d.modulus_error <= tol.modulus},
      {"support", d.leak_energy, tol.support, d.leak_energy <= tol.support},
      {"plancherel", d.plancherel_gap, tol.plancherel, d.plancherel_gap <= tol.plancherel},
      {"tail_decay", d.tail_level, tol.tail, d.tail_level <= tol.tail},
      {"truncation", d.truncated_energy, tol.tail, d.truncated_energy <= tol.tail},
      {"log_integral", d.log_integral_gap, tol.log_integral,
       d.log_integral_gap <= tol.log_integral},
  };
  return d;
}

}  // namespace ctp
