#include <cmath>
#include <numeric>

#include "ctp/error.hpp"
#include "ctp/simulate.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace ctp;
using fixtures::ou_factor;

namespace {

struct Estimate {
  double value;
  double std_error;
};

// Real part of the lag-m sample autocovariance, batch means over B batches.
Estimate lag_cov(const std::vector<cplx>& x, std::size_t m, std::size_t batches) {
  const std::size_t n = x.size() - m, per = n / batches;
  std::vector<double> b(batches);
  for (std::size_t i = 0; i < batches; ++i) {
    double s = 0.0;
    for (std::size_t k = i * per; k < (i + 1) * per; ++k) s += (x[k + m] * std::conj(x[k])).real();
    b[i] = s / static_cast<double>(per);
  }
  const auto [mean, se] = mc_summary(b, b.size());
  return {mean, se};
}

}  // namespace

TEST_CASE("MA path reproduces the OU covariance") {
  const auto& f = ou_factor();
  const auto path = simulate_ma(f, 1000000, f.step(), 2024);
  const auto v = lag_cov(path.values, 0, 100);
  const auto l1 = lag_cov(path.values, 256, 100);
  CHECK(std::abs(v.value - 1.0) < 3 * v.std_error);
  CHECK(std::abs(l1.value - std::exp(-1.0)) < 3 * l1.std_error);

  // Stationarity: disjoint halves agree.
  std::vector<cplx> a(path.values.begin(), path.values.begin() + 500000);
  std::vector<cplx> b(path.values.begin() + 500000, path.values.end());
  const auto ea = lag_cov(a, 256, 50), eb = lag_cov(b, 256, 50);
  CHECK(std::abs(ea.value - eb.value) < 3 * std::hypot(ea.std_error, eb.std_error));
}

TEST_CASE("spectral path reproduces the OU covariance and agrees with MA") {
  const auto& model = fixtures::ou_model();
  const double h = 1.0 / 256;
  std::vector<double> c0, c1, c2;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto p = simulate_spectral(model, 65536, h, 100 + s);
    c0.push_back(lag_cov(p.values, 0, 1).value);
    c1.push_back(lag_cov(p.values, 256, 1).value);
    c2.push_back(lag_cov(p.values, 512, 1).value);
  }
  const auto [m0, s0] = mc_summary(c0, c0.size());
  const auto [m1, s1] = mc_summary(c1, c1.size());
  const auto [m2, s2] = mc_summary(c2, c2.size());
  CHECK(std::abs(m0 - 1.0) < 3 * s0);
  CHECK(std::abs(m1 - std::exp(-1.0)) < 3 * s1);
  CHECK(std::abs(m2 - std::exp(-2.0)) < 3 * s2);

  const auto ma = lag_cov(simulate_ma(ou_factor(), 1000000, h, 7).values, 256, 100);
  CHECK(std::abs(ma.value - m1) < 3 * std::hypot(ma.std_error, s1));
}

TEST_CASE("single spectral line gives a random complex exponential") {
  FrequencyGrid grid{2.0, 1.0 / 16};
  std::vector<double> g(grid.size(), 0.0);
  g[static_cast<std::size_t>(grid.half_count() + 5)] = 3.0;
  const auto m = SpectralModel::sampled(grid, g);
  const auto p = simulate_spectral(m, 64, 0.25, 9);
  const double a = std::abs(p.values[0]);
  CHECK(a > 0.0);
  for (const auto& v : p.values) CHECK(std::abs(v) == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("reproducibility and real mode") {
  const auto& f = ou_factor();
  const auto a = simulate_ma(f, 5000, f.step(), 77), b = simulate_ma(f, 5000, f.step(), 77);
  CHECK(a.values == b.values);
  CHECK(simulate_ma(f, 5000, f.step(), 78).values != a.values);
  const auto r = simulate_ma(f, 5000, f.step(), 77, {true, false});
  for (const auto& v : r.values) CHECK(v.imag() == 0.0);
  const auto s = simulate_spectral(fixtures::ou_model(), 4096, f.step(), 3, true);
  for (const auto& v : s.values) CHECK(v.imag() == 0.0);
  CHECK(simulate_spectral(fixtures::ou_model(), 4096, f.step(), 3).values ==
        simulate_spectral(fixtures::ou_model(), 4096, f.step(), 3).values);
}

TEST_CASE("grid mismatch and aliasing") {
  const auto& f = ou_factor();
  try {
    (void)simulate_ma(f, 5000, 0.01, 1);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Config);
  }
  // h = 1/64: Nyquist 32 < M = 64.
  const auto p = simulate_spectral(fixtures::ou_model(), 1024, 1.0 / 64, 1);
  CHECK_FALSE(p.warnings.empty());
}

TEST_CASE("zero kernel gives a zero path") {
  const auto& f = ou_factor();
  std::vector<cplx> k(f.c_time_full().size(), 0.0);
  k[static_cast<std::size_t>(f.extent_count())] = 0.0;
  const auto z = f.with_kernel(k);
  const auto p = simulate_ma(z, 100, f.step(), 1);
  for (const auto& v : p.values) CHECK(v == cplx{});
}

TEST_CASE("Monte Carlo MSE matches the formulas") {
  const auto& f = ou_factor();
  McOptions opt;
  opt.threads = 1;
  const auto wp = monte_carlo_mse(f, PredictorSpec::whole_past(1.0), 600, 42, opt);
  CHECK(std::abs(wp.z) < 3.0);
  CHECK(std::abs(wp.pythagoras_z) < 3.0);
  CHECK_FALSE(wp.underpowered);
  for (const auto& o : wp.orthogonality) CHECK(std::abs(o.z) < 3.5);

  const auto fs = monte_carlo_mse(f, PredictorSpec::finite_section(1.0, 1.0), 600, 43, opt);
  CHECK(fs.theory == doctest::Approx(0.867144).epsilon(1e-4));
  // Smoke bound at N = 600; the 3-sigma test runs at N = 1e4 in the acceptance binary.
  CHECK(std::abs(fs.z) < 4.0);

  // Scaling of the standard error from nested subsets.
  const auto [m1, se1] = mc_summary(wp.squared_errors, 150);
  const auto [m4, se4] = mc_summary(wp.squared_errors, 600);
  (void)m1;
  (void)m4;
  CHECK(se1 / se4 == doctest::Approx(2.0).epsilon(0.35));

  const auto small = monte_carlo_mse(f, PredictorSpec::whole_past(1.0), 20, 42, opt);
  CHECK(small.underpowered);
  // Replicates are independent of the thread count.
  opt.threads = 3;
  const auto threaded = monte_carlo_mse(f, PredictorSpec::whole_past(1.0), 20, 42, opt);
  CHECK(threaded.squared_errors == small.squared_errors);
  CHECK(threaded.mse == small.mse);
}
