#include <algorithm>
#include <cmath>

#include "ctp/error.hpp"
#include "ctp/szego.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace ctp;
using fixtures::kPi;

namespace {

double sup_error_ou(const SzegoFactor& f) {
  double err = 0.0;
  const long K = f.frequency_grid().half_count();
  for (long j = -K; j <= K; ++j) {
    const double mu = f.frequency_grid().node(j);
    err = std::max(err, std::abs(f.c_at(j) - std::sqrt(2.0) / cplx(1.0, 2 * kPi * mu)));
  }
  return err;
}

}  // namespace

TEST_CASE("OU factor matches sqrt(2)/(1 + 2 pi i mu)") {
  const auto& f = fixtures::ou_factor();
  CHECK(sup_error_ou(f) < 1e-4);
  CHECK(f.leak_energy() < 1e-6);
  CHECK(std::abs(f.total_energy() - 1.0) < 1e-6);
  double kernel_err = 0.0;
  for (double s = -20.0; s <= -0.05; s += 0.0137)
    kernel_err = std::max(kernel_err, std::abs(f.kernel_at(s) - std::sqrt(2.0) * std::exp(s)));
  CHECK(kernel_err < 1e-3);
  CHECK(std::abs(f.kernel().back() - std::sqrt(2.0)) < 1e-3);
}

TEST_CASE("factor error falls at least 2x when h and dmu halve") {
  const auto fine_model = SpectralModel::closed_form(Family::OrnsteinUhlenbeck, {1, 1}, {64.0, 1.0 / 512});
  const auto fine = factorize(fine_model, {1.0 / 512, 40.0});
  CHECK(sup_error_ou(fine) * 2.0 <= sup_error_ou(fixtures::ou_factor()));
}

TEST_CASE("scaled density scales the factor by sqrt(k)") {
  const double k = 4.5;
  const auto f = factorize(fixtures::ou_model().scaled(k));
  const auto& g = fixtures::ou_factor();
  double err = 0.0;
  for (std::size_t i = 0; i < g.c_freq().size(); ++i)
    err = std::max(err, std::abs(f.c_freq()[i] - std::sqrt(k) * g.c_freq()[i]));
  CHECK(err < 1e-9);
  const auto a = log_integral_check(g, fixtures::ou_model());
  const auto b = log_integral_check(f, fixtures::ou_model().scaled(k));
  CHECK(b.lhs - a.lhs == doctest::Approx(0.5 * std::log(k)).epsilon(1e-9));
  CHECK(b.rhs - a.rhs == doctest::Approx(0.5 * std::log(k)).epsilon(1e-9));
}

TEST_CASE("deterministic densities are refused") {
  for (const auto& m : {SpectralModel::closed_form(Family::BandLimited, {1.0, 1.0}),
                        SpectralModel::closed_form(Family::Gaussian, {1.0})}) {
    try {
      (void)factorize(m);
      FAIL("expected a regularity error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::Regularity);
    }
  }
}

TEST_CASE("log-integral identity") {
  const auto c = log_integral_check(fixtures::ou_factor(), fixtures::ou_model());
  // Both sides are log sqrt(2)/(1 + 2 pi) for OU.
  CHECK(c.lhs == doctest::Approx(std::log(std::sqrt(2.0) / (1 + 2 * kPi))).epsilon(1e-4));
  CHECK(c.discrepancy < 1e-3);
  const auto fine_model = SpectralModel::closed_form(Family::OrnsteinUhlenbeck, {1, 1}, {64.0, 1.0 / 512});
  const auto fine = log_integral_check(factorize(fine_model), fine_model);
  CHECK(fine.discrepancy <= c.discrepancy);
}

TEST_CASE("verify_factor: pass on OU, negative controls fail") {
  const auto& f = fixtures::ou_factor();
  const auto ok = verify_factor(f, fixtures::ou_model());
  CHECK(ok.all_pass());
  CHECK(ok.checks.size() >= 5);

  auto check_named = [](const FactorDiagnostics& d, const std::string& name) {
    for (const auto& c : d.checks)
      if (c.name == name) return c.pass;
    FAIL("missing check " << name);
    return true;
  };

  std::vector<cplx> zero(f.c_time_full().size(), 0.0);
  const auto z = verify_factor(f.with_kernel(zero), fixtures::ou_model());
  CHECK_FALSE(check_named(z, "plancherel"));
  CHECK_FALSE(z.all_pass());

  std::vector<cplx> rev(f.c_time_full().begin(), f.c_time_full().end());
  std::reverse(rev.begin(), rev.end());
  const auto r = verify_factor(f.with_kernel(rev), fixtures::ou_model());
  CHECK_FALSE(check_named(r, "support"));
}

TEST_CASE("rational non-Markov fixture factorizes cleanly") {
  const auto& f = fixtures::ou_sum_factor();
  const auto d = verify_factor(f, fixtures::ou_sum_model());
  CHECK(d.all_pass());
  CHECK(std::abs(f.total_energy() - 1.0) < 1e-5);
}

TEST_CASE("rotation is a pure phase") {
  const auto& f = fixtures::ou_factor();
  const auto g = f.rotated(0.7);
  CHECK(std::abs(g.c_freq()[100] - std::polar(1.0, 0.7) * f.c_freq()[100]) < 1e-15);
  CHECK(g.total_energy() == doctest::Approx(f.total_energy()).epsilon(1e-14));
}
