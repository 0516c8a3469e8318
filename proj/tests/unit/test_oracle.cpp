#include <cmath>

#include "ctp/error.hpp"
#include "ctp/oracle.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace ctp;

namespace {

CovarianceFunction ou_r() { return CovarianceFunction::closed_form(fixtures::ou_model()); }
CovarianceFunction ou_sum_r() { return CovarianceFunction::closed_form(fixtures::ou_sum_model()); }

OracleProblem single(double tau) {
  OracleProblem p;
  p.covariance = ou_r();
  p.spec = PredictorSpec::whole_past(tau);
  p.times = {0.0};
  return p;
}

}  // namespace

TEST_CASE("single observation") {
  const auto s = solve_projection(single(1.0));
  REQUIRE(s.weights.size() == 1);
  CHECK(std::abs(s.weights[0] - std::exp(-1.0)) < 1e-14);
  CHECK(s.error_variance == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
  const auto z = solve_projection(single(0.0));
  CHECK(std::abs(z.weights[0] - 1.0) < 1e-14);
  CHECK(std::abs(z.error_variance) < 1e-14);
}

TEST_CASE("whole-past oracle on OU") {
  const auto s = solve_projection(OracleProblem::whole_past(ou_r(), 1.0, 0.01, 20.0));
  CHECK(s.method == "levinson");
  CHECK(s.error_variance == doctest::Approx(0.864665).epsilon(1e-2));
  CHECK(s.jitter == 0.0);
  CHECK(s.weights.size() == 2001);
}

TEST_CASE("oracle converges on the rational fixture") {
  const double exact = fixtures::ou_sum_sigma2(1.0);
  const double g1 = solve_projection(OracleProblem::whole_past(ou_sum_r(), 1.0, 0.04, 5.0)).error_variance - exact;
  const double g2 = solve_projection(OracleProblem::whole_past(ou_sum_r(), 1.0, 0.02, 10.0)).error_variance - exact;
  CHECK(g1 > 0.0);
  CHECK(g2 > 0.0);
  CHECK(g2 <= 0.5 * g1);
}

TEST_CASE("Levinson and dense solvers agree") {
  for (const auto& r : {ou_r(), ou_sum_r()}) {
    const auto prob = OracleProblem::whole_past(r, 0.7, 0.05, 10.0);
    OracleOptions dense;
    dense.use_levinson = false;
    const auto a = solve_projection(prob), b = solve_projection(prob, dense);
    CHECK(a.method == "levinson");
    CHECK(b.method == "dense");
    CHECK(a.error_variance == doctest::Approx(b.error_variance).epsilon(1e-8));
    double wmax = 0.0, dw = 0.0;
    for (std::size_t k = 0; k < a.weights.size(); ++k) {
      wmax = std::max(wmax, std::abs(b.weights[k]));
      dw = std::max(dw, std::abs(a.weights[k] - b.weights[k]));
    }
    CHECK(dw <= 1e-8 * wmax);
  }
}

TEST_CASE("adding observations never hurts") {
  for (const auto& r : {ou_r(), ou_sum_r()}) {
    double prev = 1e300;
    for (double w : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const auto s = solve_projection(OracleProblem::whole_past(r, 1.0, 0.05, w));
      CHECK(s.error_variance <= prev + 1e-12);
      CHECK(s.error_variance >= -1e-10);
      prev = s.error_variance;
    }
  }
}

TEST_CASE("near-singular covariance escalates jitter or fails loudly") {
  // r of G' = e^{-mu^2}: sqrt(pi) e^{-pi^2 t^2}, numerically singular on a fine grid.
  CovarianceFunction g{[](double t) { return cplx(std::sqrt(fixtures::kPi) * std::exp(-fixtures::kPi * fixtures::kPi * t * t)); },
                       std::sqrt(fixtures::kPi)};
  auto prob = OracleProblem::whole_past(g, 0.5, 0.05, 3.0);
  OracleOptions dense;
  dense.use_levinson = false;
  try {
    const auto s = solve_projection(prob, dense);
    CHECK(s.jitter > 0.0);
    CHECK_FALSE(s.jitter_trace.empty());
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IllConditioned);
    CHECK(std::string(e.what()).find("jitter") != std::string::npos);
  }
  OracleOptions strict;
  strict.use_levinson = false;
  strict.jitter_max = 1e-15;
  strict.jitter_start = 1e-15;
  try {
    (void)solve_projection(prob, strict);
    FAIL("expected ill-conditioning");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IllConditioned);
  }
}

TEST_CASE("compare") {
  const auto& f = fixtures::ou_factor();
  const auto wp = predict_whole_past(f, 1.0);
  const auto o = solve_projection(OracleProblem::whole_past(ou_r(), 1.0, 0.01, 20.0));
  const auto c = compare(wp, o, 1e-2);
  CHECK(c.consistent);
  CHECK(std::string(c.verdict()) == "consistent");

  const auto fs = predict_finite_section(f, 1.0, 1.0);
  const auto of = solve_projection(OracleProblem::finite_section(ou_r(), 1.0, 1.0, 0.01));
  CHECK(of.error_variance == doctest::Approx(0.864665).epsilon(1e-2));
  const auto d = compare(fs, of, 1e-3);
  CHECK_FALSE(d.consistent);
  CHECK(std::string(d.verdict()) == "divergent");
  CHECK(d.sigma2_formula == fs.sigma2);
  CHECK(d.sigma2_oracle == of.error_variance);

  OracleSolution self = o;
  self.error_variance = wp.sigma2;
  const auto z = compare(wp, self);
  CHECK(z.absolute_gap == 0.0);
  CHECK(z.consistent);

  const auto other = predict_whole_past(f, 2.0);
  try {
    (void)compare(other, o);
    FAIL("expected a usage error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Usage);
  }
  try {
    (void)compare(fs, o);
    FAIL("expected a usage error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Usage);
  }
}
