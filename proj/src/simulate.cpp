#include "ctp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <boost/random/normal_distribution.hpp>
#include <random>
#include <sstream>
#include <thread>

#include "ctp/error.hpp"
#include "ma_filter.hpp"
#include "numerics.hpp"

namespace ctp {

namespace {

void check_step(const SzegoFactor& factor, double h) {
  if (!(std::abs(h - factor.step()) <= 1e-12 * factor.step())) {
    std::ostringstream msg;
    msg << "simulation step " << h << " does not match the factor time step " << factor.step();
    throw Error(Errc::Config, msg.str());
  }
}

std::vector<cplx> real_weights(std::vector<cplx> w) {
  double peak = 0.0, imag = 0.0;
  for (const cplx& v : w) {
    peak = std::max(peak, std::abs(v));
    imag = std::max(imag, std::abs(v.imag()));
  }
  if (imag > 1e-8 * peak)
    throw Error(Errc::Validation, "real mode needs a real kernel (density must be symmetric)");
  for (cplx& v : w) v = v.real();
  return w;
}

std::vector<cplx> draw_noise(std::mt19937_64& rng, std::size_t n, double h, bool real_mode) {
  boost::random::normal_distribution<double> normal;
  std::vector<cplx> noise(n);
  if (real_mode) {
    const double s = std::sqrt(h);
    for (auto& v : noise) v = s * normal(rng);
  } else {
    const double s = std::sqrt(0.5 * h);
    for (auto& v : noise) {
      const double re = normal(rng);
      const double im = normal(rng);
      v = cplx(s * re, s * im);
    }
  }
  return noise;
}

SamplePath ma_path(const detail::MaFilter& filter, std::size_t n, double h, std::uint64_t seed,
                   bool real_mode, bool keep_noise) {
  std::mt19937_64 rng(detail::stream_seed(seed, 0));
  const std::size_t J = filter.length();
  auto noise = draw_noise(rng, n + J - 1, h, real_mode);
  SamplePath p;
  p.step = h;
  p.values = filter.synthesize(noise);
  if (real_mode)
    for (auto& v : p.values) v = v.real();
  p.seed = seed;
  p.method = PathMethod::MovingAverage;
  p.real_mode = real_mode;
  if (keep_noise) {
    p.noise = std::move(noise);
    p.noise_offset = static_cast<long>(J) - 1;
  }
  return p;
}


}  // namespace

SamplePath simulate_ma(const SzegoFactor& factor, std::size_t n_points, double h,
                       std::uint64_t seed, const MaOptions& options) {
  check_step(factor, h);
  auto w = ma_weights(factor);
  if (options.real_mode) w = real_weights(std::move(w));
  if (n_points < 2 || n_points < w.size()) {
    std::ostringstream msg;
    msg << "path of " << n_points << " points is shorter than the kernel extent (" << w.size()
        << " points, " << static_cast<double>(w.size()) * h << " time units)";
    throw Error(Errc::Config, msg.str());
  }
  detail::MaFilter filter(std::move(w));
  return ma_path(filter, n_points, h, seed, options.real_mode, options.keep_noise);
}

SamplePath simulate_spectral(const SpectralModel& model, std::size_t n_points, double h,
                             std::uint64_t seed, bool real_mode) {
  if (n_points < 2) throw Error(Errc::Validation, "path needs at least two points");
  if (!(h > 0.0)) throw Error(Errc::Validation, "time step must be positive");
  const auto& grid = model.grid();
  const double ratio = 1.0 / (grid.spacing * h);
  const long N = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(N)) > 1e-9 * ratio)
    throw Error(Errc::Config, "1/(dmu h) must be an integer for spectral synthesis");
  if (static_cast<long>(n_points) > N)
    throw Error(Errc::Config, "path longer than the spectral period 1/dmu");
  const long K = grid.half_count();
  const auto G = model.samples();

  if (real_mode) {
    double peak = 0.0, asym = 0.0;
    for (long j = 0; j <= K; ++j) {
      const double a = G[static_cast<std::size_t>(K + j)], b = G[static_cast<std::size_t>(K - j)];
      peak = std::max(peak, a);
      asym = std::max(asym, std::abs(a - b));
    }
    if (asym > 1e-12 * peak)
      throw Error(Errc::Validation, "real mode needs a symmetric density");
  }

  std::mt19937_64 rng(detail::stream_seed(seed, 0));
  boost::random::normal_distribution<double> normal;
  std::vector<cplx> bins(static_cast<std::size_t>(N));
  auto amp = [&](long j) {
    const double wt = (j == -K || j == K) ? 0.5 : 1.0;
    return std::sqrt(std::max(0.0, G[static_cast<std::size_t>(j + K)]) * wt * grid.spacing);
  };
  auto bin = [&](long j) -> cplx& { return bins[static_cast<std::size_t>(((j % N) + N) % N)]; };
  if (real_mode) {
    bin(0) += amp(0) * normal(rng);
    for (long j = 1; j <= K; ++j) {
      const double re = normal(rng), im = normal(rng);
      const cplx z = cplx(re, im) * std::sqrt(0.5);
      bin(j) += amp(j) * z;
      bin(-j) += amp(j) * std::conj(z);
    }
  } else {
    for (long j = -K; j <= K; ++j) {
      const double re = normal(rng), im = normal(rng);
      bin(j) += amp(j) * cplx(re, im) * std::sqrt(0.5);
    }
  }
  detail::dft(bins, detail::FftSign::Positive);

  SamplePath p;
  p.step = h;
  p.values.assign(bins.begin(), bins.begin() + static_cast<long>(n_points));
  if (real_mode)
    for (auto& v : p.values) v = v.real();
  p.seed = seed;
  p.method = PathMethod::Spectral;
  p.real_mode = real_mode;

  const double nyquist = 0.5 / h;
  double outside = model.tail_mass();
  for (long j = -K; j <= K; ++j) {
    if (std::abs(grid.node(j)) > nyquist) {
      const double wt = (j == -K || j == K) ? 0.5 : 1.0;
      outside += G[static_cast<std::size_t>(j + K)] * wt * grid.spacing;
    }
  }
  const double total = model.total_mass();
  if (grid.cutoff > nyquist || outside > 1e-6 * total) {
    std::ostringstream msg;
    msg << "aliasing: band cutoff " << grid.cutoff << ", Nyquist " << nyquist
        << ", mass outside the representable band " << outside << " (" << outside / total
        << " of total)";
    p.warnings.push_back(msg.str());
  }
  return p;
}

std::pair<double, double> mc_summary(const std::vector<double>& values, std::size_t n) {
  n = std::min(n, values.size());
  if (n < 2) return {n ? values[0] : 0.0, 0.0};
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += values[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += (values[i] - mean) * (values[i] - mean);
  const double var = ss / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

McReport monte_carlo_mse(const SzegoFactor& factor, const PredictorSpec& spec, std::size_t N,
                         std::uint64_t seed, const McOptions& options) {
  spec.validate();
  if (N < 2) throw Error(Errc::Validation, "Monte Carlo needs at least two replicates");
  const double h = factor.step();
  const PredictionReport report = predict(factor, spec);
  auto w = ma_weights(factor);
  if (options.real_mode) w = real_weights(std::move(w));
  const detail::MaFilter filter(std::move(w));
  const long J = static_cast<long>(filter.length());

  // Observation lags (in cells beyond first_lag) for the orthogonality check.
  const std::vector<long> ortho_lags = {0, J / 4, J / 2};

  struct Replicate {
    double err2 = 0.0, x2 = 0.0, p2 = 0.0;
    std::vector<cplx> cross;
  };
  std::vector<Replicate> reps(N);

  long n_path = 0, t_index = 0, margin = 0;
  if (spec.finite()) {
    const long last = report.first_lag + static_cast<long>(report.kernel.size());
    n_path = std::max({J, last, 2L});
    t_index = n_path - 1;
  } else {
    margin = static_cast<long>(std::ceil(options.edge_margin_factor * static_cast<double>(J)));
    const long P = static_cast<long>(detail::good_fft_size(static_cast<std::size_t>(2 * margin + 2 * J)));
    n_path = P - J + 1;
    t_index = n_path - margin - 1 + std::min(report.first_lag, margin);
  }

  auto run = [&](std::size_t r) {
    const std::uint64_t s = detail::stream_seed(seed, r);
    Replicate& rep = reps[r];
    cplx x, pred;
    if (spec.finite()) {
      const SamplePath path =
          ma_path(filter, static_cast<std::size_t>(n_path), h, s, options.real_mode, true);
      x = path.values[static_cast<std::size_t>(t_index)];
      pred = apply_predictor(InnovationSeries::from_noise(path), report, path.time(t_index));
    } else {
      const SamplePath path =
          ma_path(filter, static_cast<std::size_t>(n_path), h, s, options.real_mode, false);
      std::size_t masked = 0;
      const auto xi = filter.deconvolve(path.values, 1e-8, &masked);
      InnovationSeries innov;
      innov.step = h;
      innov.first_index = margin;
      innov.increments.assign(xi.begin() + margin, xi.end() - margin);
      x = path.values[static_cast<std::size_t>(t_index)];
      pred = apply_predictor(innov, report, path.time(t_index));
      const cplx e = x - pred;
      for (long lag : ortho_lags) {
        const long u = t_index - report.first_lag - lag;
        rep.cross.push_back(u >= 0 ? e * std::conj(path.values[static_cast<std::size_t>(u)]) : cplx{});
      }
    }
    rep.err2 = std::norm(x - pred);
    rep.x2 = std::norm(x);
    rep.p2 = std::norm(pred);
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, N));
  if (threads <= 1) {
    for (std::size_t r = 0; r < N; ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t r = t; r < N; r += threads) run(r);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  McReport out;
  out.spec = spec;
  out.n = N;
  out.seed = seed;
  out.underpowered = N < 100;
  out.theory = options.theory.value_or(report.sigma2);
  out.squared_errors.reserve(N);
  std::vector<double> pyth(N);
  double sx = 0.0, sp = 0.0;
  for (std::size_t r = 0; r < N; ++r) {
    out.squared_errors.push_back(reps[r].err2);
    pyth[r] = reps[r].x2 - reps[r].p2;
    sx += reps[r].x2;
    sp += reps[r].p2;
  }
  std::tie(out.mse, out.std_error) = mc_summary(out.squared_errors, N);
  out.z = out.std_error > 0.0 ? (out.mse - out.theory) / out.std_error
                              : (out.mse == out.theory ? 0.0 : HUGE_VAL);
  out.mean_signal = sx / static_cast<double>(N);
  out.mean_prediction = sp / static_cast<double>(N);
  const auto [pm, pse] = mc_summary(pyth, N);
  out.pythagoras_gap = pm - out.theory;
  out.pythagoras_std_error = pse;
  out.pythagoras_z = pse > 0.0 ? out.pythagoras_gap / pse : 0.0;

  if (!spec.finite()) {
    for (std::size_t i = 0; i < ortho_lags.size(); ++i) {
      std::vector<double> re(N), im(N);
      double e2 = 0.0, x2 = 0.0;
      for (std::size_t r = 0; r < N; ++r) {
        re[r] = reps[r].cross[i].real();
        im[r] = reps[r].cross[i].imag();
        e2 += reps[r].err2;
        x2 += reps[r].x2;
      }
      const auto [mr, sr] = mc_summary(re, N);
      const auto [mi, si] = mc_summary(im, N);
      OrthogonalityCheck c;
      c.lag = static_cast<double>(report.first_lag + ortho_lags[i]) * h;
      c.mean = cplx(mr, mi);
      c.std_error = std::max(sr, si);
      c.z = std::max(sr > 0 ? std::abs(mr) / sr : 0.0, si > 0 ? std::abs(mi) / si : 0.0);
      c.correlation = std::abs(c.mean) / std::sqrt(std::max(1e-300, e2 * x2) / (double(N) * double(N)));
      out.orthogonality.push_back(c);
    }
  }
  return out;
}

}  // namespace ctp
