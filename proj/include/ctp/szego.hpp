#pragma once

#include <span>
#include <string>
#include <vector>

#include "ctp/spectral_model.hpp"

namespace ctp {

/// Uniform time grid for the kernel c*: s_k = k h, |s_k| <= L.
struct TimeGrid {
  double step = 1.0 / 256.0;  // h
  double extent = 40.0;       // L
};

struct FactorTolerances {
  double modulus = 1e-9;     // | |c|^2 - G' | <= modulus * max G'
  double support = 1e-6;     // leak energy fraction on s > 0
  double plancherel = 1e-6;  // relative gap between kernel energy and spectral mass
  double tail = 1e-8;        // |c*| near s = -L relative to max |c*|
  double log_integral = 1e-3;
};

/// Outer spectral factor: c(mu) on the frequency grid with |c|^2 = G', and
/// its kernel c*(s), supported on s <= 0, with c(mu) = int e^{2 pi i mu s} c*(s) ds.
///
/// The kernel is stored on [-L, L]. The s > 0 half holds what the inverse
/// transform put there before truncation (the leak), so the support
/// contract can be audited; kernel() exposes the anticausal half [-L, 0],
/// whose last sample is the left limit c*(0-).
class SzegoFactor {
 public:
  SzegoFactor(FrequencyGrid grid, std::vector<cplx> c_freq, TimeGrid time_grid,
              std::vector<cplx> c_time, double leak_energy, double truncated_energy,
              double log_integral, cplx value_at_minus_i, int phase_sign);

  const FrequencyGrid& frequency_grid() const { return grid_; }
  const TimeGrid& time_grid() const { return time_grid_; }
  double step() const { return time_grid_.step; }
  long extent_count() const { return extent_count_; }  // L / h

  std::span<const cplx> c_freq() const { return c_freq_; }
  cplx c_at(long j) const { return c_freq_[static_cast<std::size_t>(j + grid_.half_count())]; }

  /// Samples on [-L, L], index k + L/h.
  std::span<const cplx> c_time_full() const { return c_time_; }
  /// Samples on [-L, 0], index k + L/h for k = -L/h..0.
  std::span<const cplx> kernel() const {
    return std::span<const cplx>(c_time_).first(static_cast<std::size_t>(extent_count_ + 1));
  }
  cplx kernel_at(double s) const;  // cubic interpolation on [-L, 0]

  double leak_energy() const { return leak_energy_; }
  double truncated_energy() const { return truncated_energy_; }
  double log_integral() const { return log_integral_; }
  cplx value_at_minus_i() const { return value_at_minus_i_; }
  /// Sign applied to the Hilbert transform (selected by minimum leak).
  int phase_sign() const { return phase_sign_; }

  /// int_a^b |c*(s)|^2 ds for -L <= a <= b <= 0 (piecewise-cubic quadrature).
  double energy_between(double a, double b) const;
  double total_energy() const { return energy_between(-time_grid_.extent, 0.0); }
  /// Smallest S with int_{-S}^0 |c*|^2 >= (1 - 1e-8) * total energy, on the grid.
  double effective_support() const;

  /// Copies with a modified kernel or factor, used for negative controls and
  /// the gauge invariance checks.
  SzegoFactor with_kernel(std::vector<cplx> c_time) const;
  SzegoFactor rotated(double theta) const;

 private:
  void rebuild_energy();

  FrequencyGrid grid_;
  std::vector<cplx> c_freq_;
  TimeGrid time_grid_;
  long extent_count_ = 0;
  std::vector<cplx> c_time_;
  std::vector<double> power_;  // |c*|^2 on [-L, 0]
  double leak_energy_ = 0.0;
  double truncated_energy_ = 0.0;
  double log_integral_ = 0.0;
  cplx value_at_minus_i_;
  int phase_sign_ = -1;
};

/// Outer factorization of a regular density. Throws Errc::Regularity for a
/// deterministic density and Errc::Factorization when neither phase sign
/// yields an anticausal kernel.
SzegoFactor factorize(const SpectralModel& model, TimeGrid time_grid = {},
                      const FactorTolerances& tol = {});

struct LogIntegralCheck {
  double lhs = 0.0;  // log |c(-i)|, c(-i) = int c*(s) e^{2 pi s} ds
  double rhs = 0.0;  // (1/2pi) int log G'(mu) / (1 + mu^2) dmu, tails included
  double discrepancy = 0.0;
};

/// Evaluates the outer-function identity at the half-plane point w = -i,
/// where the Poisson kernel is (1/pi) / (1 + mu^2).
LogIntegralCheck log_integral_check(const SzegoFactor& factor, const SpectralModel& model);

struct InvariantCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct FactorDiagnostics {
  double leak_energy = 0.0;
  double plancherel_gap = 0.0;  // relative
  double log_integral_gap = 0.0;
  double modulus_error = 0.0;   // relative to max G'
  double tail_level = 0.0;
  double truncated_energy = 0.0;
  std::vector<InvariantCheck> checks;
  bool all_pass() const;
};

/// Recomputes every factor invariant from the stored samples.
FactorDiagnostics verify_factor(const SzegoFactor& factor, const SpectralModel& model,
                                const FactorTolerances& tol = {});

}  // namespace ctp
