#include <cmath>
#include <vector>

#include "ctp/error.hpp"
#include "ctp/spectral_model.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace ctp;
using fixtures::kPi;

TEST_CASE("OU covariance from density") {
  const auto& m = fixtures::ou_model();
  CHECK(covariance_from_density(m, 0.0).real() == m.total_mass());
  CHECK(covariance_from_density(m, 0.0).imag() == 0.0);
  CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(covariance_from_density(m, 1.0).real() == doctest::Approx(0.367879441171).epsilon(1e-8));
  CHECK(std::abs(covariance_from_density(m, 2.5) - std::exp(-2.5)) < 1e-8);
}

TEST_CASE("band-limited covariance is a sinc") {
  // G' = 1 on [-1/2, 1/2]; r(1.5) = sin(1.5 pi) / (1.5 pi) = -0.21221.
  const auto m = SpectralModel::closed_form(Family::BandLimited, {1.0, 0.5});
  CHECK(covariance_from_density(m, 1.5).real() == doctest::Approx(-0.21221).epsilon(2e-3));
  CHECK(m.closed_form_covariance(1.5).real() == doctest::Approx(std::sin(1.5 * kPi) / (1.5 * kPi)));
}

TEST_CASE("covariance is Hermitian and bounded by r(0)") {
  std::vector<double> g(2 * 64 * 16 + 1);
  FrequencyGrid grid{16.0, 1.0 / 64};
  for (long j = -grid.half_count(); j <= grid.half_count(); ++j) {
    const double mu = grid.node(j);
    g[static_cast<std::size_t>(j + grid.half_count())] = std::exp(-(mu - 0.7) * (mu - 0.7)) + 0.1 / (1 + mu * mu);
  }
  const auto m = SpectralModel::sampled(grid, g);
  const double r0 = covariance_from_density(m, 0.0).real();
  for (double t : {0.1, 0.77, 3.0, 11.3}) {
    const cplx a = covariance_from_density(m, t), b = covariance_from_density(m, -t);
    CHECK(a.real() == b.real());
    CHECK(a.imag() == -b.imag());
    CHECK(std::abs(a) <= r0);
  }
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(FrequencyGrid({64.0, 0.0}).validate(), Error);
  try {
    FrequencyGrid{64.0, -1.0}.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Config);
  }
  FrequencyGrid grid{1.0, 0.25};
  try {
    (void)SpectralModel::sampled(grid, {1, 1, -0.5, 1, 1, 1, 1, 1, 1});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Validation);
  }
  try {
    (void)SpectralModel::sampled(grid, {1, 1, 1, 1, 1, 1, 1, 2, 1}, true);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Validation);
  }
  CHECK_THROWS_AS(parse_family("pink"), Error);
  CHECK(parse_family("ou") == Family::OrnsteinUhlenbeck);
}

TEST_CASE("Szego classification of the shipped families") {
  const auto ou = szego_integral(fixtures::ou_model());
  CHECK(ou.classification == Regularity::Regular);
  CHECK(std::isfinite(ou.szego_value));
  // Stable under grid refinement.
  const auto fine = SpectralModel::closed_form(Family::OrnsteinUhlenbeck, {1, 1}, {64.0, 1.0 / 512});
  CHECK(std::abs(szego_integral(fine).szego_value - ou.szego_value) < 1e-4);

  const auto band = szego_integral(SpectralModel::closed_form(Family::BandLimited, {1.0, 0.5}));
  CHECK(band.classification == Regularity::Deterministic);
  CHECK(std::isinf(band.szego_value));
  CHECK(band.szego_value < 0);

  const auto gauss = szego_integral(SpectralModel::closed_form(Family::Gaussian, {1.0}));
  CHECK(gauss.classification == Regularity::Deterministic);
}

TEST_CASE("floored Szego trajectories") {
  const std::vector<double> floors = {1e-12, 1e-24, 1e-48, 1e-96, 1e-192};
  const auto flat = szego_trajectory(fixtures::ou_model(), floors);
  for (double v : flat) CHECK(v == doctest::Approx(flat[0]).epsilon(1e-12));
  const auto band = szego_trajectory(SpectralModel::closed_form(Family::BandLimited, {1.0, 0.5}), floors);
  for (std::size_t k = 1; k < band.size(); ++k) {
    CHECK(band[k] < band[k - 1]);
    if (k >= 2) CHECK(band[k - 1] - band[k] >= band[k - 2] - band[k - 1]);
  }
}

TEST_CASE("scaling keeps regularity and shifts the Szego value by log k * int 1/(1+mu^2)") {
  const auto& m = fixtures::ou_model();
  const double k = 3.7;
  const auto a = szego_integral(m), b = szego_integral(m.scaled(k));
  CHECK(b.classification == Regularity::Regular);
  const double M = m.grid().cutoff;
  CHECK(b.szego_value - a.szego_value == doctest::Approx(std::log(k) * 2.0 * std::atan(M)).epsilon(1e-9));
}

TEST_CASE("density from covariance") {
  const auto& ou = fixtures::ou_model();
  FrequencyGrid grid{4.0, 1.0 / 256};
  const auto est = density_from_covariance(CovarianceFunction::closed_form(ou), grid);
  double err = 0.0;
  for (long j = -grid.half_count(); j <= grid.half_count(); ++j) {
    const double mu = grid.node(j);
    err = std::max(err, std::abs(est.model.sample(j) - 2.0 / (1.0 + 4 * kPi * kPi * mu * mu)));
  }
  CHECK(err < 1e-4);

  CovarianceFunction zero{[](double) { return cplx{}; }, 0.0};
  const auto z = density_from_covariance(zero, grid);
  for (double v : z.model.samples()) CHECK(v == 0.0);

  // Slowly decaying r: the window check must fire.
  CovarianceFunction slow{[](double t) { return cplx(1.0 / (1.0 + std::abs(t))); }, 1.0};
  try {
    (void)density_from_covariance(slow, grid);
    FAIL("expected truncation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Truncation);
  }

  // sin(pi t)/(pi t) -> indicator of [-1/2, 1/2], Gibbs ripple near the edges.
  CovarianceFunction sinc{[](double t) { return cplx(t == 0.0 ? 1.0 : std::sin(kPi * t) / (kPi * t)); }, 1.0};
  InverseTransformWindow w;
  w.half_length = 100.0;
  w.decay_tolerance = 1e-2;
  const auto s = density_from_covariance(sinc, {2.0, 1.0 / 256}, w);
  double ripple = 0.0;
  for (long j = -s.model.grid().half_count(); j <= s.model.grid().half_count(); ++j) {
    const double mu = std::abs(s.model.grid().node(j));
    if (mu <= 0.4) ripple = std::max(ripple, std::abs(s.model.sample(j) - 1.0));
    if (mu >= 0.6) ripple = std::max(ripple, std::abs(s.model.sample(j)));
  }
  CHECK(ripple < 1e-2);
}

TEST_CASE("density roundtrip error shrinks under refinement") {
  auto roundtrip = [](double step, double dmu) {
    const auto m = SpectralModel::closed_form(Family::OrnsteinUhlenbeck, {1, 1}, {64.0, dmu});
    CovarianceFunction r{[&m](double t) { return covariance_from_density(m, t); }, m.total_mass()};
    FrequencyGrid grid{2.0, dmu};
    InverseTransformWindow w;
    w.step = step;
    w.half_length = 24.0;
    const auto est = density_from_covariance(r, grid, w);
    double err = 0.0;
    for (long j = -grid.half_count(); j <= grid.half_count(); ++j)
      err = std::max(err, std::abs(est.model.sample(j) - m.density(grid.node(j))));
    return err;
  };
  const double coarse = roundtrip(1.0 / 32, 1.0 / 64), fine = roundtrip(1.0 / 64, 1.0 / 128);
  CHECK(fine < 0.5 * coarse);
}
