#include "ctp/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctp/error.hpp"
#include "ma_filter.hpp"
#include "numerics.hpp"

namespace ctp {

using detail::kTwoPi;

void PredictorSpec::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw Error(Errc::Domain, "lag tau must be positive, got " + std::to_string(tau));
  if (half_length && (!(*half_length > 0.0) || !std::isfinite(*half_length)))
    throw Error(Errc::Domain, "half-length T must be positive, got " + std::to_string(*half_length));
}

namespace {

// Number of grid cells covering [0, x], counting a cell once its right
// endpoint reaches the interval; tolerant to round-off at exact multiples.
long cells_for(double x, double h) { return static_cast<long>(std::ceil(x / h - 1e-9)); }

// Cell averages (c*(-j h) + c*(-(j+1) h)) / 2 for j in [j0, j1).
std::vector<cplx> cell_weights(const SzegoFactor& f, long j0, long j1) {
  const auto k = f.kernel();
  const long Lc = f.extent_count();
  j1 = std::min(j1, Lc);
  std::vector<cplx> w;
  if (j1 <= j0) return w;
  w.reserve(static_cast<std::size_t>(j1 - j0));
  for (long j = j0; j < j1; ++j)
    w.push_back(0.5 * (k[static_cast<std::size_t>(Lc - j)] + k[static_cast<std::size_t>(Lc - j - 1)]));
  return w;
}

// h * sum |c*(s_k)|^2 over grid points s_k in [a, b).
double riemann_energy(const SzegoFactor& f, double a, double b) {
  const auto k = f.kernel();
  const long Lc = f.extent_count();
  const double h = f.step();
  double sum = 0.0;
  for (long q = 0; q <= Lc; ++q) {
    const double s = -static_cast<double>(Lc - q) * h;
    if (s >= a - 1e-9 * h && s < b - 1e-9 * h) sum += std::norm(k[static_cast<std::size_t>(q)]);
  }
  return sum * h;
}

// F_j = int_a^b e^{2 pi i mu_j s} c*(s) ds on every band node, with
// [a, b] inside [-L, 0]. Filon rule on the piecewise-linear interpolant:
// interior nodes go through one FFT on the period N = 1 / (dmu h); the two
// half-hats and the partial end cells are summed in closed form.
std::vector<cplx> partial_transform(const SzegoFactor& f, double a, double b) {
  const auto& grid = f.frequency_grid();
  const long K = grid.half_count();
  const std::size_t nf = static_cast<std::size_t>(2 * K + 1);
  std::vector<cplx> out(nf);
  const double L = f.time_grid().extent, h = f.step();
  a = std::max(a, -L);
  b = std::min(b, 0.0);
  if (b <= a) return out;
  const auto x = f.kernel();
  const long Lc = f.extent_count();
  auto node_s = [&](long q) { return -L + static_cast<double>(q) * h; };

  long qa = static_cast<long>(std::ceil((a + L) / h - 1e-9));
  long qb = static_cast<long>(std::floor((b + L) / h + 1e-9));
  qa = std::clamp(qa, 0L, Lc);
  qb = std::clamp(qb, 0L, Lc);
  const double da = std::max(0.0, node_s(qa) - a);
  const double db = std::max(0.0, b - node_s(qb));

  const long N = std::lround(1.0 / (grid.spacing * h));
  std::vector<cplx> v(static_cast<std::size_t>(N));
  for (long q = qa + 1; q < qb; ++q) v[static_cast<std::size_t>(q)] = x[static_cast<std::size_t>(q)];
  if (qb - qa >= 2) detail::dft(v, detail::FftSign::Positive);

  const cplx va = da > 0.0 ? f.kernel_at(a) : cplx{};
  const cplx vb = db > 0.0 ? f.kernel_at(b) : cplx{};
  for (long j = -K; j <= K; ++j) {
    const double w = kTwoPi * grid.node(j);
    const double th = w * h;
    cplx sum{};
    if (qa <= qb) {
      const cplx E0 = detail::filon_e0(th), E1 = detail::filon_e1(th);
      const cplx R = E0 - E1;  // int_0^1 (1 - y) e^{i th y} dy
      if (qb - qa >= 2) {
        const std::size_t idx = static_cast<std::size_t>(((j % N) + N) % N);
        sum += h * 2.0 * R.real() * std::exp(cplx(0.0, w * (-L))) * v[idx];
      }
      if (qb > qa) {
        sum += h * R * std::exp(cplx(0.0, w * node_s(qa))) * x[static_cast<std::size_t>(qa)];
        sum += h * std::conj(R) * std::exp(cplx(0.0, w * node_s(qb))) * x[static_cast<std::size_t>(qb)];
      }
      if (da > 0.0) {
        const cplx xq = x[static_cast<std::size_t>(qa)];
        sum += da * std::exp(cplx(0.0, w * a)) *
               (va * detail::filon_e0(w * da) + (xq - va) * detail::filon_e1(w * da));
      }
      if (db > 0.0) {
        const cplx xq = x[static_cast<std::size_t>(qb)];
        sum += db * std::exp(cplx(0.0, w * node_s(qb))) *
               (xq * detail::filon_e0(w * db) + (vb - xq) * detail::filon_e1(w * db));
      }
    } else {
      // [a, b] inside a single cell.
      const double d = b - a;
      sum += d * std::exp(cplx(0.0, w * a)) *
             (f.kernel_at(a) * detail::filon_e0(w * d) +
              (f.kernel_at(b) - f.kernel_at(a)) * detail::filon_e1(w * d));
    }
    out[static_cast<std::size_t>(j + K)] = sum;
  }
  return out;
}

}  // namespace

InnovationSeries InnovationSeries::from_noise(const SamplePath& path) {
  if (path.noise.empty())
    throw Error(Errc::Validation, "path carries no stored driving noise");
  InnovationSeries s;
  s.step = path.step;
  s.origin = path.start;
  s.first_index = -path.noise_offset;
  s.increments = path.noise;
  s.seed = path.seed;
  s.method = path.method;
  return s;
}

std::vector<cplx> ma_weights(const SzegoFactor& factor) {
  const long J = cells_for(factor.effective_support(), factor.step());
  return cell_weights(factor, 0, std::max(J, 1L));
}

PredictionReport predict_whole_past(const SzegoFactor& factor, double tau, bool with_psi) {
  const auto spec = PredictorSpec::whole_past(tau);
  spec.validate();
  const double h = factor.step(), L = factor.time_grid().extent;
  PredictionReport r;
  r.spec = spec;
  r.step = h;
  r.first_lag = cells_for(tau, h);
  const long J = cells_for(factor.effective_support(), h);
  r.kernel = cell_weights(factor, r.first_lag, J);
  r.sigma2 = factor.energy_between(-std::min(tau, L), 0.0);
  r.sigma2_riemann = riemann_energy(factor, -std::min(tau, L), 0.0);
  if (with_psi) r.psi = prediction_function(factor, tau);
  return r;
}

PredictionReport predict_finite_section(const SzegoFactor& factor, double tau, double half_length) {
  const auto spec = PredictorSpec::finite_section(tau, half_length);
  spec.validate();
  const double h = factor.step(), L = factor.time_grid().extent;
  PredictionReport r;
  r.spec = spec;
  r.step = h;
  r.first_lag = cells_for(tau, h);
  const long last = cells_for(tau + 2.0 * half_length, h);
  r.kernel = cell_weights(factor, r.first_lag, last);
  // Near part int_{-tau}^0 plus far part int_{-inf}^{-tau-2T}; beyond -L the
  // kernel energy is below the factor's tail tolerance.
  const double far = -std::min(tau + 2.0 * half_length, L);
  r.sigma2 = factor.energy_between(-std::min(tau, L), 0.0) + factor.energy_between(-L, far);
  r.sigma2_riemann = riemann_energy(factor, -std::min(tau, L), 0.0) + riemann_energy(factor, -L, far);
  return r;
}

PredictionReport predict(const SzegoFactor& factor, const PredictorSpec& spec) {
  return spec.finite() ? predict_finite_section(factor, spec.tau, *spec.half_length)
                       : predict_whole_past(factor, spec.tau, false);
}

PredictionFunction prediction_function(const SzegoFactor& factor, double tau) {
  PredictorSpec::whole_past(tau).validate();
  const auto& grid = factor.frequency_grid();
  const long K = grid.half_count();
  const auto c = factor.c_freq();
  const double L = factor.time_grid().extent, M = grid.cutoff;

  double peak = 0.0;
  for (const cplx& v : c) peak = std::max(peak, std::abs(v));
  const double floor = 1e-8 * peak;

  const auto F = partial_transform(factor, -L, -tau);
  const auto G = partial_transform(factor, -tau, 0.0);

  PredictionFunction out;
  out.psi.assign(c.size(), cplx{});
  out.masked.assign(c.size(), 0);
  std::size_t masked = 0;
  double gap = 0.0, energy = 0.0;
  for (long j = -K; j <= K; ++j) {
    const std::size_t i = static_cast<std::size_t>(j + K);
    if (!(std::abs(c[i]) > floor)) {
      out.masked[i] = 1;
      ++masked;
      continue;
    }
    const cplx shift = std::exp(cplx(0.0, kTwoPi * tau * grid.node(j)));
    out.psi[i] = shift * F[i] / c[i];
    const cplx residual = shift * G[i] / c[i];
    gap = std::max(gap, std::abs((shift - out.psi[i]) - residual));
    const double wt = (j == -K || j == K) ? 0.5 : 1.0;
    energy += wt * std::norm(c[i] - F[i]);
  }
  if (masked == c.size())
    throw Error(Errc::Degenerate, "every frequency sample of c is below the masking floor");
  out.masked_fraction = static_cast<double>(masked) / static_cast<double>(c.size());
  out.residual_gap = gap;
  // |e^{2 pi i tau mu} - psi|^2 G' = |c - F|^2; beyond the band the remainder
  // int_{-tau}^0 e^{2 pi i mu s} c*(s) ds decays like the endpoint jumps over 2 pi mu.
  const auto k = factor.kernel();
  const double c0 = std::norm(k.back());
  const double ct = tau < L ? std::norm(factor.kernel_at(-tau)) : 0.0;
  out.sigma2_spectral = energy * grid.spacing + (c0 + ct) / (2.0 * detail::kPi * detail::kPi * M);
  return out;
}

InnovationSeries whiten_path(const SamplePath& path, const SzegoFactor& factor,
                             const WhiteningOptions& options) {
  const double h = factor.step();
  if (std::abs(path.step - h) > 1e-12 * h) {
    std::ostringstream msg;
    msg << "path step " << path.step << " does not match the factor time step " << h;
    throw Error(Errc::Config, msg.str());
  }
  detail::MaFilter filter(ma_weights(factor));
  const long J = static_cast<long>(filter.length());
  const long margin = static_cast<long>(std::ceil(options.edge_margin_factor * static_cast<double>(J)));
  const long n = static_cast<long>(path.values.size());
  if (n <= 2 * margin) {
    std::ostringstream msg;
    msg << "path of " << n << " samples is shorter than twice the edge margin (" << margin << ")";
    throw Error(Errc::InsufficientData, msg.str());
  }
  std::size_t masked = 0;
  auto xi = filter.deconvolve(path.values, 1e-8, &masked);
  InnovationSeries s;
  s.step = h;
  s.origin = path.start;
  s.first_index = margin;
  s.increments.assign(xi.begin() + margin, xi.end() - margin);
  s.masked_count = masked;
  s.seed = path.seed;
  s.method = path.method;
  return s;
}

cplx apply_predictor(const InnovationSeries& innovations, const PredictionReport& report, double t) {
  const double h = innovations.step;
  if (std::abs(report.step - h) > 1e-12 * h)
    throw Error(Errc::Config, "predictor and innovation grids differ");
  const double x = (t - innovations.origin) / h;
  const long kt = std::lround(x);
  if (std::abs(x - static_cast<double>(kt)) > 1e-6)
    throw Error(Errc::Domain, "prediction time is not on the innovation grid");
  if (report.kernel.empty()) return {};
  const long lo = kt - report.first_lag - static_cast<long>(report.kernel.size()) + 1;
  const long hi = kt - report.first_lag;
  const long have_lo = innovations.first_index;
  const long have_hi = innovations.first_index + static_cast<long>(innovations.increments.size()) - 1;
  if (lo < have_lo || hi > have_hi) {
    std::ostringstream msg;
    msg << "innovations do not cover the kernel support: missing";
    if (lo < have_lo) msg << " " << static_cast<double>(have_lo - lo) * h << " time units before";
    if (hi > have_hi) msg << " " << static_cast<double>(hi - have_hi) * h << " time units after";
    throw Error(Errc::Window, msg.str());
  }
  cplx sum{};
  for (std::size_t i = 0; i < report.kernel.size(); ++i) {
    const long idx = hi - static_cast<long>(i) - have_lo;
    sum += report.kernel[i] * innovations.increments[static_cast<std::size_t>(idx)];
  }
  return sum;
}

}  // namespace ctp
