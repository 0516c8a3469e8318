#include "ctp/spectral_model.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctp/error.hpp"
#include "numerics.hpp"

namespace ctp {

using detail::kPi;
using detail::kTwoPi;

void FrequencyGrid::validate() const {
  if (!(spacing > 0.0) || !(cutoff > 0.0) || !std::isfinite(spacing) || !std::isfinite(cutoff))
    throw Error(Errc::Config, "frequency grid needs grid.M > 0 and grid.dmu > 0");
  const double ratio = cutoff / spacing;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 2.0)
    throw Error(Errc::Config, "grid.M / grid.dmu must be an integer >= 2");
}

long FrequencyGrid::half_count() const { return std::lround(cutoff / spacing); }

Family parse_family(const std::string& name) {
  if (name == "ou" || name == "ornstein_uhlenbeck") return Family::OrnsteinUhlenbeck;
  if (name == "ou_sum" || name == "rational") return Family::OuSum;
  if (name == "band" || name == "band_limited") return Family::BandLimited;
  if (name == "gaussian") return Family::Gaussian;
  throw Error(Errc::Config, "unknown density family '" + name + "'");
}

std::string family_name(Family family) {
  switch (family) {
    case Family::OrnsteinUhlenbeck: return "ou";
    case Family::OuSum: return "ou_sum";
    case Family::BandLimited: return "band_limited";
    case Family::Gaussian: return "gaussian";
  }
  return "?";
}

double TailModel::mass(double cutoff) const {
  if (!closed) return 0.0;
  return amplitude * cutoff / (exponent - 1.0);
}

cplx TailModel::fourier(double cutoff, double omega) const {
  if (!closed) return 0.0;
  if (omega == 0.0) return mass(cutoff);
  if (omega < 0.0) return std::conj(fourier(cutoff, -omega));
  // Rotate onto mu = M + i y, where e^{i omega mu} decays.
  const double a = amplitude, p = exponent, m = cutoff;
  boost::math::quadrature::exp_sinh<double> integrator;
  auto part = [&](bool imag) {
    return integrator.integrate(
        [&](double y) {
          const cplx v = std::pow(cplx(1.0, y / m), -p) * std::exp(-omega * y);
          return imag ? v.imag() : v.real();
        },
        1e-13);
  };
  const cplx integral(part(false), part(true));
  return a * cplx(0.0, 1.0) * std::exp(cplx(0.0, omega * m)) * integral;
}

namespace {

void require_params(Family family, const std::vector<double>& p) {
  std::size_t need = 0;
  switch (family) {
    case Family::OrnsteinUhlenbeck: need = 2; break;
    case Family::OuSum: need = 4; break;
    case Family::BandLimited: need = 2; break;
    case Family::Gaussian: need = 1; break;
  }
  if (p.size() != need) {
    std::ostringstream os;
    os << "family '" << family_name(family) << "' takes " << need << " parameter(s), got "
       << p.size();
    throw Error(Errc::Config, os.str());
  }
  for (double v : p)
    if (!std::isfinite(v) || v <= 0.0)
      throw Error(Errc::Config, "family parameters must be finite and positive");
}

TailModel fit_tail(double edge, double inner, long k, double floor) {
  TailModel tail;
  const double lo = 0.5 * std::log(std::max(inner, floor));
  const double hi = 0.5 * std::log(std::max(edge, floor));
  const double dlog = std::log(static_cast<double>(k) / static_cast<double>(k - 1));
  tail.log_slope = (hi - lo) / dlog;
  if (edge <= floor || inner <= floor) return tail;
  const double p = -2.0 * tail.log_slope;
  if (!(p > 1.0 + 1e-9)) return tail;  // not integrable: leave the tail open
  tail.closed = true;
  tail.amplitude = edge;
  tail.exponent = p;
  return tail;
}

}  // namespace

SpectralModel SpectralModel::closed_form(Family family, std::vector<double> params,
                                         FrequencyGrid grid, bool real_mode, double floor) {
  grid.validate();
  require_params(family, params);
  SpectralModel m;
  m.kind_ = ModelKind::ClosedForm;
  m.family_ = family;
  m.params_ = std::move(params);
  m.grid_ = grid;
  m.real_mode_ = real_mode;
  m.floor_ = floor;
  const long k = grid.half_count();
  m.samples_.resize(grid.size());
  for (long j = -k; j <= k; ++j)
    m.samples_[static_cast<std::size_t>(j + k)] = m.evaluate_family(grid.node(j));
  m.finish();
  return m;
}

SpectralModel SpectralModel::sampled(FrequencyGrid grid, std::vector<double> density,
                                     bool real_mode, double floor) {
  grid.validate();
  if (density.size() != grid.size()) {
    std::ostringstream os;
    os << "density has " << density.size() << " samples, grid needs " << grid.size();
    throw Error(Errc::Config, os.str());
  }
  SpectralModel m;
  m.kind_ = ModelKind::Sampled;
  m.grid_ = grid;
  m.real_mode_ = real_mode;
  m.floor_ = floor;
  m.samples_ = std::move(density);
  m.finish();
  return m;
}

void SpectralModel::finish() {
  double peak = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double v = samples_[i];
    if (!std::isfinite(v)) throw Error(Errc::Validation, "density sample is not finite");
    if (v < 0.0) {
      std::ostringstream os;
      os << "negative density sample " << v << " at mu = "
         << grid_.node(static_cast<long>(i) - grid_.half_count());
      throw Error(Errc::Validation, os.str());
    }
    peak = std::max(peak, v);
  }
  if (real_mode_) {
    const std::size_t n = samples_.size();
    for (std::size_t i = 0; i < n / 2; ++i)
      if (std::abs(samples_[i] - samples_[n - 1 - i]) > 1e-12 * peak)
        throw Error(Errc::Validation, "real mode requires G'(-mu) = G'(mu)");
  }
  const long k = grid_.half_count();
  right_ = fit_tail(samples_.back(), samples_[samples_.size() - 2], k, floor_);
  left_ = fit_tail(samples_.front(), samples_[1], k, floor_);
}

double SpectralModel::evaluate_family(double mu) const {
  const double w2 = 4.0 * kPi * kPi * mu * mu;
  const auto& p = params_;
  double v = 0.0;
  switch (family_) {
    case Family::OrnsteinUhlenbeck:
      v = p[0] * 2.0 * p[1] / (p[1] * p[1] + w2);
      break;
    case Family::OuSum:
      v = p[0] * 2.0 * p[1] / (p[1] * p[1] + w2) + p[2] * 2.0 * p[3] / (p[3] * p[3] + w2);
      break;
    case Family::BandLimited:
      v = std::abs(mu) <= p[1] ? p[0] : 0.0;
      break;
    case Family::Gaussian:
      v = p[0] * std::exp(-mu * mu);
      break;
  }
  return scale_ * v;
}

double SpectralModel::density(double mu) const {
  if (kind_ == ModelKind::ClosedForm) return evaluate_family(mu);
  const double m = grid_.cutoff;
  if (mu > m) return right_.closed ? right_.amplitude * std::pow(mu / m, -right_.exponent) : 0.0;
  if (mu < -m) return left_.closed ? left_.amplitude * std::pow(-mu / m, -left_.exponent) : 0.0;
  const double x = (mu + m) / grid_.spacing;
  const auto i = std::min(static_cast<std::size_t>(x), samples_.size() - 2);
  const double u = x - static_cast<double>(i);
  return samples_[i] * (1.0 - u) + samples_[i + 1] * u;
}

double SpectralModel::band_mass() const {
  const double dmu = grid_.spacing;
  const std::size_t n = samples_.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 * dmu : dmu;
    sum += w * samples_[i];
  }
  return sum;
}

double SpectralModel::tail_mass() const {
  return left_.mass(grid_.cutoff) + right_.mass(grid_.cutoff);
}

double SpectralModel::total_mass() const { return band_mass() + tail_mass(); }

SpectralModel SpectralModel::scaled(double k) const {
  if (!(k > 0.0)) throw Error(Errc::Domain, "scale factor must be positive");
  SpectralModel m = *this;
  m.scale_ *= k;
  for (double& v : m.samples_) v *= k;
  m.finish();
  return m;
}

SpectralModel SpectralModel::regridded(FrequencyGrid grid) const {
  grid.validate();
  SpectralModel m = *this;
  m.grid_ = grid;
  const long k = grid.half_count();
  m.samples_.assign(grid.size(), 0.0);
  for (long j = -k; j <= k; ++j) m.samples_[static_cast<std::size_t>(j + k)] = density(grid.node(j));
  m.finish();
  return m;
}

cplx SpectralModel::closed_form_covariance(double t) const {
  if (kind_ != ModelKind::ClosedForm)
    throw Error(Errc::Usage, "sampled models have no closed-form covariance");
  const auto& p = params_;
  const double at = std::abs(t);
  double v = 0.0;
  switch (family_) {
    case Family::OrnsteinUhlenbeck:
      v = p[0] * std::exp(-p[1] * at);
      break;
    case Family::OuSum:
      v = p[0] * std::exp(-p[1] * at) + p[2] * std::exp(-p[3] * at);
      break;
    case Family::BandLimited:
      v = t == 0.0 ? 2.0 * p[1] * p[0] : p[0] * std::sin(kTwoPi * p[1] * t) / (kPi * t);
      break;
    case Family::Gaussian:
      v = p[0] * std::sqrt(kPi) * std::exp(-kPi * kPi * t * t);
      break;
  }
  return scale_ * v;
}

CovarianceFunction CovarianceFunction::from_model(const SpectralModel& model) {
  return {[model](double t) { return covariance_from_density(model, t); }, model.total_mass()};
}

CovarianceFunction CovarianceFunction::closed_form(const SpectralModel& model) {
  return {[model](double t) { return model.closed_form_covariance(t); },
          model.closed_form_covariance(0.0).real()};
}

cplx covariance_from_density(const SpectralModel& model, double t) {
  if (!std::isfinite(t)) throw Error(Errc::Domain, "covariance lag must be finite");
  const auto& grid = model.grid();
  const auto samples = model.samples();
  const long k = grid.half_count();
  const double dmu = grid.spacing;
  const double omega = kTwoPi * t;
  double re = 0.0, im = 0.0;
  for (long j = -k; j <= k; ++j) {
    const double w = (j == -k || j == k) ? 0.5 * dmu : dmu;
    const double g = w * samples[static_cast<std::size_t>(j + k)];
    const double theta = omega * grid.node(j);
    re += g * std::cos(theta);
    im += g * std::sin(theta);
  }
  if (t == 0.0) return {re + model.tail_mass(), im};
  const cplx tails = model.left_tail().fourier(grid.cutoff, -omega) +
                     model.right_tail().fourier(grid.cutoff, omega);
  return {re + tails.real(), im + tails.imag()};
}

namespace {

double floored_integral(const SpectralModel& model, double floor, double* subfloor_fraction) {
  const auto& grid = model.grid();
  const auto samples = model.samples();
  const long k = grid.half_count();
  const double dmu = grid.spacing;
  double sum = 0.0, below = 0.0;
  for (long j = -k; j <= k; ++j) {
    const double w = (j == -k || j == k) ? 0.5 * dmu : dmu;
    const double g = samples[static_cast<std::size_t>(j + k)];
    const double mu = grid.node(j);
    sum += w * std::log(std::max(g, floor)) / (1.0 + mu * mu);
    if (g < floor) below += w;
  }
  if (subfloor_fraction) *subfloor_fraction = below / (2.0 * grid.cutoff);
  return sum;
}

}  // namespace

RegularityReport szego_integral(const SpectralModel& model, const RegularityConfig& config) {
  if (!(config.floor > 0.0)) throw Error(Errc::Config, "floor must be positive");
  RegularityReport report;
  report.config = config;
  report.floored_value = floored_integral(model, config.floor, &report.subfloor_fraction);
  const bool diverges = report.floored_value < config.divergence_threshold ||
                        report.subfloor_fraction > config.max_subfloor_fraction;
  report.classification = diverges ? Regularity::Deterministic : Regularity::Regular;
  report.szego_value =
      diverges ? -std::numeric_limits<double>::infinity() : report.floored_value;
  return report;
}

std::vector<double> szego_trajectory(const SpectralModel& model, std::span<const double> floors) {
  std::vector<double> out;
  out.reserve(floors.size());
  for (double f : floors) {
    if (!(f > 0.0)) throw Error(Errc::Config, "floor must be positive");
    out.push_back(floored_integral(model, f, nullptr));
  }
  return out;
}

DensityEstimate density_from_covariance(const CovarianceFunction& r, FrequencyGrid grid,
                                        const InverseTransformWindow& window, bool real_mode) {
  grid.validate();
  if (!(window.step > 0.0) || !(window.half_length > 0.0))
    throw Error(Errc::Config, "inverse transform window needs positive step and half-length");
  const double period = 1.0 / (window.step * grid.spacing);
  const auto n = static_cast<std::size_t>(std::llround(period));
  if (std::abs(period - static_cast<double>(n)) > 1e-9 * period)
    throw Error(Errc::Config, "1 / (step * dmu) must be an integer");
  const long kt = std::lround(window.half_length / window.step);
  const long kf = grid.half_count();
  if (static_cast<std::size_t>(2 * kt + 1) > n || static_cast<std::size_t>(2 * kf + 1) > n)
    throw Error(Errc::Config, "time window or band exceeds one transform period");

  std::vector<cplx> values(static_cast<std::size_t>(2 * kt + 1));
  for (long k = -kt; k <= kt; ++k)
    values[static_cast<std::size_t>(k + kt)] = r(static_cast<double>(k) * window.step);

  const double r0 = std::abs(values[static_cast<std::size_t>(kt)]);
  double outer = 0.0;
  for (long k = -kt; k <= kt; ++k)
    if (std::abs(static_cast<double>(k)) >= 0.9 * static_cast<double>(kt))
      outer = std::max(outer, std::abs(values[static_cast<std::size_t>(k + kt)]));
  if (outer > window.decay_tolerance * r0) {
    std::ostringstream os;
    os << "covariance has not decayed inside [-" << window.half_length << ", "
       << window.half_length << "]: max |r| on the outer 10% is " << outer << " = "
       << (r0 > 0 ? outer / r0 : outer) << " r(0), tolerance " << window.decay_tolerance;
    throw Error(Errc::Truncation, os.str());
  }

  std::vector<cplx> buf(n, 0.0);
  for (long k = -kt; k <= kt; ++k) {
    const double w = (k == -kt || k == kt) ? 0.5 : 1.0;
    const auto idx = static_cast<std::size_t>((k % static_cast<long>(n) + static_cast<long>(n)) %
                                              static_cast<long>(n));
    buf[idx] += w * window.step * values[static_cast<std::size_t>(k + kt)];
  }
  detail::dft(buf, detail::FftSign::Negative);

  DensityEstimate out{SpectralModel::sampled(grid, std::vector<double>(grid.size(), 0.0)), 0.0};
  std::vector<double> density(grid.size());
  for (long j = -kf; j <= kf; ++j) {
    const auto idx = static_cast<std::size_t>((j % static_cast<long>(n) + static_cast<long>(n)) %
                                              static_cast<long>(n));
    double v = buf[idx].real();
    if (v < 0.0) {
      out.clamp_magnitude = std::max(out.clamp_magnitude, -v);
      v = 0.0;
    }
    density[static_cast<std::size_t>(j + kf)] = v;
  }
  if (real_mode) {
    const std::size_t m = density.size();
    for (std::size_t i = 0; i < m / 2; ++i) {
      const double avg = 0.5 * (density[i] + density[m - 1 - i]);
      density[i] = density[m - 1 - i] = avg;
    }
  }
  out.model = SpectralModel::sampled(grid, std::move(density), real_mode);
  return out;
}

}  // namespace ctp
