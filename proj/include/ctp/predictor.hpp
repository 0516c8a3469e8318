#pragma once

#include <optional>
#include <vector>

#include "ctp/sample_path.hpp"
#include "ctp/szego.hpp"

namespace ctp {

/// Lag tau > 0 and either the whole past or a finite section of length 2T
/// ending at t - tau.
struct PredictorSpec {
  double tau = 1.0;
  std::optional<double> half_length;  // T; empty for the whole past

  static PredictorSpec whole_past(double tau) { return {tau, std::nullopt}; }
  static PredictorSpec finite_section(double tau, double half_length) { return {tau, half_length}; }
  bool finite() const { return half_length.has_value(); }
  void validate() const;
};

/// Frequency-domain prediction function (Wiener filter) on the factor's
/// frequency grid. Masked samples carry no value and are excluded from norms.
struct PredictionFunction {
  std::vector<cplx> psi;
  std::vector<unsigned char> masked;
  double masked_fraction = 0.0;
  /// sup over unmasked mu of | (e^{2 pi i tau mu} - psi) - residual | where
  /// residual = e^{2 pi i tau mu} int_{-tau}^0 e^{2 pi i mu s} c*(s) ds / c(mu).
  double residual_gap = 0.0;
  /// Error variance computed on the spectrum: int |e^{2 pi i tau mu} - psi|^2 G' dmu.
  double sigma2_spectral = 0.0;
};

struct PredictionReport {
  PredictorSpec spec;
  double step = 0.0;
  /// kernel[i] weighs the innovation increment over the cell
  /// (t - (first_lag + i + 1) h, t - (first_lag + i) h].
  long first_lag = 0;
  std::vector<cplx> kernel;
  double sigma2 = 0.0;          // piecewise-cubic quadrature of the error integrals
  double sigma2_riemann = 0.0;  // h * sum over the half-open grid cells, first order in h
  std::optional<PredictionFunction> psi;

  double masked_fraction() const { return psi ? psi->masked_fraction : 0.0; }
};

/// Increments of the innovation process recovered from (or used to build) a path.
struct InnovationSeries {
  double step = 0.0;
  double origin = 0.0;    // path start time
  long first_index = 0;   // increments[0] is the cell ending at origin + first_index * step
  std::vector<cplx> increments;
  std::size_t masked_count = 0;
  std::uint64_t seed = 0;
  PathMethod method = PathMethod::MovingAverage;

  /// The stored driving noise of an MA path.
  static InnovationSeries from_noise(const SamplePath& path);
};

/// Cell averages of c* over (-(j+1) h, -j h], j = 0..J-1, J covering the
/// kernel's effective support. The discretized moving average is
/// X(t_k) = sum_j w_j dxi_{k-j}.
std::vector<cplx> ma_weights(const SzegoFactor& factor);

PredictionReport predict_whole_past(const SzegoFactor& factor, double tau, bool with_psi = false);
PredictionReport predict_finite_section(const SzegoFactor& factor, double tau, double half_length);
PredictionReport predict(const SzegoFactor& factor, const PredictorSpec& spec);

PredictionFunction prediction_function(const SzegoFactor& factor, double tau);

struct WhiteningOptions {
  double edge_margin_factor = 4.0;  // margin = factor * effective support
};

InnovationSeries whiten_path(const SamplePath& path, const SzegoFactor& factor,
                             const WhiteningOptions& options = {});

/// Predicted value of X(t) from the innovations.
cplx apply_predictor(const InnovationSeries& innovations, const PredictionReport& report, double t);

}  // namespace ctp
