#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctp/predictor.hpp"
#include "ctp/spectral_model.hpp"

namespace ctp {

/// Least-squares projection of X(t_obs + tau) onto X(u_1), ..., X(u_m).
struct OracleProblem {
  CovarianceFunction covariance;
  PredictorSpec spec;          // lag and the window type the times represent
  double step = 0.0;           // grid spacing h (0 for an irregular set)
  double t_obs = 0.0;
  std::vector<double> times;   // u_j, increasing

  /// Uniform grid on [-window, 0] with spacing h (whole-past surrogate).
  static OracleProblem whole_past(CovarianceFunction r, double tau, double h, double window = 20.0);
  /// Uniform grid on [-2T, 0] with spacing h: the observation span of the
  /// finite section, target at lag tau past its right end.
  static OracleProblem finite_section(CovarianceFunction r, double tau, double half_length, double h);

  bool uniform() const;
  void validate() const;
};

struct OracleOptions {
  double condition_threshold = 1e12;
  double jitter_start = 1e-12;  // relative to r(0)
  double jitter_max = 1e-6;
  bool use_levinson = true;     // for uniform grids
};

struct OracleSolution {
  PredictorSpec spec;
  std::vector<double> times;
  std::vector<cplx> weights;
  double error_variance = 0.0;
  double condition = 1.0;  // estimate (dense: 1/rcond of the Cholesky factor;
                           // Levinson: r(0) over the smallest Schur complement)
  double jitter = 0.0;     // absolute diagonal jitter used
  std::vector<std::string> jitter_trace;
  std::string method;      // "levinson" or "dense"
};

/// Normal equations sum_j w_j r(u_j - u_k) = r(t_obs + tau - u_k). Throws
/// Errc::IllConditioned (message carries the jitter trace) when no jitter
/// up to jitter_max brings the system below the condition threshold.
OracleSolution solve_projection(const OracleProblem& problem, const OracleOptions& options = {});

struct Comparison {
  double tau = 0.0;
  std::optional<double> half_length;
  double sigma2_formula = 0.0;
  double sigma2_oracle = 0.0;
  double absolute_gap = 0.0;
  double relative_gap = 0.0;  // relative to the formula value
  double tolerance = 0.0;
  bool consistent = false;
  const char* verdict() const { return consistent ? "consistent" : "divergent"; }
};

Comparison compare(const PredictionReport& report, const OracleSolution& oracle, double tolerance = 1e-3);

}  // namespace ctp
