#pragma once

#include <cmath>

#include "ctp/szego.hpp"

namespace fixtures {

inline constexpr double kPi = 3.14159265358979323846;

// Default grids: M = 64, dmu = h = 1/256, L = 40.
inline const ctp::SpectralModel& ou_model() {
  static const auto m = ctp::SpectralModel::closed_form(ctp::Family::OrnsteinUhlenbeck, {1.0, 1.0});
  return m;
}

inline const ctp::SzegoFactor& ou_factor() {
  static const auto f = ctp::factorize(ou_model());
  return f;
}

// 0.6 * OU(rate 1) + 0.4 * OU(rate 4): rational, not Markov.
inline const ctp::SpectralModel& ou_sum_model() {
  static const auto m = ctp::SpectralModel::closed_form(ctp::Family::OuSum, {0.6, 1.0, 0.4, 4.0});
  return m;
}

inline const ctp::SzegoFactor& ou_sum_factor() {
  static const auto f = ctp::factorize(ou_sum_model());
  return f;
}

inline double ou_sigma2(double tau) { return 1.0 - std::exp(-2.0 * tau); }

// ou_sum factor: sqrt(4.4) (beta + i nu) / ((1 + i nu)(4 + i nu)), nu = 2 pi mu,
// beta^2 = 22.4 / 4.4, so c*(s) = sqrt(4.4) (A e^s + B e^{4s}).
inline double ou_sum_sigma2(double tau) {
  const double beta = std::sqrt(22.4 / 4.4), a = (beta - 1.0) / 3.0, b = (4.0 - beta) / 3.0;
  return 4.4 * (a * a * -std::expm1(-2.0 * tau) / 2.0 + 2.0 * a * b * -std::expm1(-5.0 * tau) / 5.0 +
                b * b * -std::expm1(-8.0 * tau) / 8.0);
}

}  // namespace fixtures
