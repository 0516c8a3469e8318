#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ctp/predictor.hpp"
#include "ctp/sample_path.hpp"
#include "ctp/spectral_model.hpp"
#include "ctp/szego.hpp"

namespace ctp {

struct MaOptions {
  bool real_mode = false;
  bool keep_noise = false;
};

/// X(t_k) = sum_j w_j dxi_{k-j} with independent Gaussian increments of
/// variance h. The warm-up prefix (one kernel support) is generated and dropped.
SamplePath simulate_ma(const SzegoFactor& factor, std::size_t n_points, double h,
                       std::uint64_t seed, const MaOptions& options = {});

/// X(t_k) = sum_j sqrt(G'(mu_j) w_j dmu) Z_j e^{2 pi i t_k mu_j} on the model's
/// frequency grid (trapezoid weights w_j). Mass the grid cannot represent at
/// step h is reported in the path warnings.
SamplePath simulate_spectral(const SpectralModel& model, std::size_t n_points, double h,
                             std::uint64_t seed, bool real_mode = false);

struct McOptions {
  unsigned threads = 0;                 // 0: hardware concurrency
  std::optional<double> theory;         // overrides the formula value
  bool real_mode = false;
  double edge_margin_factor = 4.0;
};

struct OrthogonalityCheck {
  double lag = 0.0;        // t - u
  cplx mean;               // mean of residual * conj(X(u))
  double std_error = 0.0;  // of the modulus, per component max
  double z = 0.0;
  double correlation = 0.0;
};

struct McReport {
  PredictorSpec spec;
  std::size_t n = 0;
  double mse = 0.0;
  double std_error = 0.0;
  double theory = 0.0;
  double z = 0.0;
  bool underpowered = false;  // n < 100
  // Pythagoras: E|X|^2 - E|prediction|^2 against sigma^2.
  double mean_signal = 0.0;
  double mean_prediction = 0.0;
  double pythagoras_gap = 0.0;
  double pythagoras_std_error = 0.0;
  double pythagoras_z = 0.0;
  std::vector<OrthogonalityCheck> orthogonality;  // whole past only
  std::vector<double> squared_errors;            // per replicate, in replicate order
  std::uint64_t seed = 0;
};

/// Mean of |X(t) - prediction|^2 over N independent replicates. The whole-past
/// predictor runs on innovations recovered by whiten_path; the finite-section
/// predictor on the generator's stored noise. Replicate r draws from the stream
/// keyed by (seed, r), so the report does not depend on the thread count.
McReport monte_carlo_mse(const SzegoFactor& factor, const PredictorSpec& spec, std::size_t N,
                         std::uint64_t seed, const McOptions& options = {});

/// Mean and standard error of the first n entries of the squared errors.
std::pair<double, double> mc_summary(const std::vector<double>& values, std::size_t n);

}  // namespace ctp
