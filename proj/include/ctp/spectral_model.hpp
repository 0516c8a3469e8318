#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ctp {

using cplx = std::complex<double>;

/// Uniform frequency grid mu_j = j * spacing, j = -K..K, K = cutoff / spacing.
struct FrequencyGrid {
  double cutoff = 64.0;          // M
  double spacing = 1.0 / 256.0;  // delta mu

  /// Throws Errc::Config unless cutoff/spacing is a positive integer.
  void validate() const;
  long half_count() const;  // K
  std::size_t size() const { return static_cast<std::size_t>(2 * half_count() + 1); }
  double node(long j) const { return static_cast<double>(j) * spacing; }
};

enum class ModelKind { ClosedForm, Sampled };

/// Shipped closed-form families. Parameters (in order):
///   OrnsteinUhlenbeck  {variance, rate}        G' = v 2b / (b^2 + 4 pi^2 mu^2)
///   OuSum              {v1, b1, v2, b2}        sum of two OU densities
///   BandLimited        {level, half_width}     level on [-W, W], 0 outside
///   Gaussian           {level}                 level exp(-mu^2)
enum class Family { OrnsteinUhlenbeck, OuSum, BandLimited, Gaussian };

Family parse_family(const std::string& name);
std::string family_name(Family family);

/// Power-law continuation A (|mu|/M)^-p of the density past one band edge.
/// `closed` is false when the edge density is at or below the floor or the
/// fitted exponent does not give a finite mass; the tail then counts as zero.
struct TailModel {
  bool closed = false;
  double amplitude = 0.0;  // density at the band edge
  double exponent = 0.0;   // p
  double log_slope = 0.0;  // d(1/2 log G') / d log|mu| at the edge (phase continuation)

  double mass(double cutoff) const;
  /// int_M^inf A (mu/M)^-p e^{i omega mu} dmu.
  cplx fourier(double cutoff, double omega) const;
};

/// Spectral density G' of a weakly stationary process, sampled on a
/// symmetric uniform frequency grid. Immutable after construction.
class SpectralModel {
 public:
  static SpectralModel closed_form(Family family, std::vector<double> params,
                                   FrequencyGrid grid = {}, bool real_mode = false,
                                   double floor = 1e-12);
  static SpectralModel sampled(FrequencyGrid grid, std::vector<double> density,
                               bool real_mode = false, double floor = 1e-12);

  ModelKind kind() const { return kind_; }
  Family family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  const FrequencyGrid& grid() const { return grid_; }
  bool real_mode() const { return real_mode_; }
  double floor() const { return floor_; }

  /// Density samples at the grid nodes, index j + K.
  std::span<const double> samples() const { return samples_; }
  double sample(long j) const { return samples_[static_cast<std::size_t>(j + grid_.half_count())]; }

  /// G'(mu) anywhere: closed form, or linear interpolation inside the band
  /// and the tail continuation outside.
  double density(double mu) const;

  const TailModel& left_tail() const { return left_; }
  const TailModel& right_tail() const { return right_; }

  /// Trapezoid mass on the band.
  double band_mass() const;
  double tail_mass() const;
  /// band_mass + tail_mass; equals covariance_from_density(*this, 0) bit for bit.
  double total_mass() const;

  /// Same model with density multiplied by k > 0.
  SpectralModel scaled(double k) const;
  /// Same closed form on another grid (sampled models are resampled linearly).
  SpectralModel regridded(FrequencyGrid grid) const;

  /// Exact covariance when the family has one in closed form.
  bool has_closed_form_covariance() const { return kind_ == ModelKind::ClosedForm; }
  cplx closed_form_covariance(double t) const;

 private:
  SpectralModel() = default;
  void finish();
  double evaluate_family(double mu) const;

  ModelKind kind_ = ModelKind::Sampled;
  Family family_ = Family::OrnsteinUhlenbeck;
  std::vector<double> params_;
  FrequencyGrid grid_;
  bool real_mode_ = false;
  double floor_ = 1e-12;
  double scale_ = 1.0;
  std::vector<double> samples_;
  TailModel left_;
  TailModel right_;
};

/// Covariance function r(t) with r(-t) = conj(r(t)).
struct CovarianceFunction {
  std::function<cplx(double)> evaluate;
  double variance = 0.0;  // r(0)

  cplx operator()(double t) const { return evaluate(t); }
  static CovarianceFunction from_model(const SpectralModel& model);
  static CovarianceFunction closed_form(const SpectralModel& model);
};

/// Trapezoid quadrature of int e^{2 pi i t mu} G'(mu) dmu over the band plus
/// the closed tails.
cplx covariance_from_density(const SpectralModel& model, double t);

enum class Regularity { Regular, Deterministic };

struct RegularityConfig {
  double floor = 1e-12;
  double divergence_threshold = -50.0;
  double max_subfloor_fraction = 0.01;
};

struct RegularityReport {
  Regularity classification = Regularity::Regular;
  /// Finite iff Regular; -infinity when Deterministic.
  double szego_value = 0.0;
  /// Band integral of log(max(G', floor)) / (1 + mu^2), always finite.
  double floored_value = 0.0;
  /// Fraction of the band measure where G' < floor.
  double subfloor_fraction = 0.0;
  RegularityConfig config;
};

RegularityReport szego_integral(const SpectralModel& model, const RegularityConfig& config = {});

/// Floored Szego integral for each floor in turn (same band). A regular
/// density gives a flat trajectory; a deterministic one keeps decreasing.
std::vector<double> szego_trajectory(const SpectralModel& model, std::span<const double> floors);

struct InverseTransformWindow {
  double half_length = 40.0;      // covariance sampled on [-T, T]
  double step = 1.0 / 256.0;      // time spacing; 1/(step * dmu) must be an integer
  double decay_tolerance = 1e-6;  // |r| on the outer 10% of the window, relative to r(0)
};

struct DensityEstimate {
  SpectralModel model;
  double clamp_magnitude = 0.0;  // largest negative ripple clamped to zero
};

/// Inverse Fourier quadrature of a covariance onto a frequency grid.
/// Throws Errc::Truncation when r has not decayed inside the window.
DensityEstimate density_from_covariance(const CovarianceFunction& r, FrequencyGrid grid,
                                        const InverseTransformWindow& window = {},
                                        bool real_mode = false);

}  // namespace ctp
