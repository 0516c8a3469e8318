#include "ctp/oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctp/error.hpp"

namespace ctp {

namespace {

std::vector<double> uniform_times(double a, double b, double h) {
  const long n = std::lround((b - a) / h);
  std::vector<double> t(static_cast<std::size_t>(n + 1));
  for (long k = 0; k <= n; ++k) t[static_cast<std::size_t>(k)] = b - static_cast<double>(n - k) * h;
  return t;
}

std::string sci(double x) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << x;
  return s.str();
}

struct Attempt {
  bool ok = false;
  std::vector<cplx> w;
  double condition = 0.0;
  std::string reason;
};

// Levinson recursion for T x = y with T_{ij} = a_{i-j}, a_{-m} = conj(a_m).
Attempt levinson(const std::vector<cplx>& a, const std::vector<cplx>& y, double jitter,
                 double threshold) {
  const std::size_t n = y.size();
  Attempt out;
  auto at = [&](long m) -> cplx {
    const cplx v = m >= 0 ? a[static_cast<std::size_t>(m)] : std::conj(a[static_cast<std::size_t>(-m)]);
    return m == 0 ? v + jitter : v;
  };
  const double a0 = std::real(at(0));
  if (!(a0 > 0.0)) {
    out.reason = "non-positive diagonal";
    return out;
  }
  std::vector<cplx> f{1.0 / at(0)}, b{1.0 / at(0)}, x{y[0] / at(0)};
  double schur_min = a0;
  for (std::size_t k = 1; k < n; ++k) {
    cplx ef{}, eb{}, ex{};
    for (std::size_t i = 0; i < k; ++i) {
      ef += at(static_cast<long>(k - i)) * f[i];
      eb += at(-static_cast<long>(i + 1)) * b[i];
      ex += at(static_cast<long>(k - i)) * x[i];
    }
    const cplx den = 1.0 - ef * eb;
    std::vector<cplx> fn(k + 1), bn(k + 1);
    const cplx alpha = 1.0 / den, beta = -ef / den;
    const cplx gamma = -eb / den, delta = 1.0 / den;
    for (std::size_t i = 0; i <= k; ++i) {
      const cplx fo = i < k ? f[i] : cplx{};
      const cplx bo = i > 0 ? b[i - 1] : cplx{};
      fn[i] = alpha * fo + beta * bo;
      bn[i] = gamma * fo + delta * bo;
    }
    f.swap(fn);
    b.swap(bn);
    // 1 / f_0 is the Schur complement of the leading entry.
    const double schur = std::real(1.0 / f[0]);
    if (!(schur > 0.0) || !std::isfinite(schur)) {
      out.reason = "recursion lost positive definiteness at order " + std::to_string(k + 1);
      return out;
    }
    schur_min = std::min(schur_min, schur);
    const cplx step = y[k] - ex;
    x.push_back(0.0);
    for (std::size_t i = 0; i <= k; ++i) x[i] += step * b[i];
  }
  out.condition = a0 / schur_min;
  if (!(out.condition <= threshold)) {
    out.reason = "condition estimate " + sci(out.condition) + " above " + sci(threshold);
    return out;
  }
  out.ok = true;
  out.w = std::move(x);
  return out;
}

Attempt dense(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& y, double jitter, double threshold) {
  Attempt out;
  Eigen::MatrixXcd B = A;
  B.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXcd> llt(B);
  if (llt.info() != Eigen::Success) {
    out.reason = "Cholesky failed";
    return out;
  }
  const double rc = llt.rcond();
  out.condition = rc > 0.0 ? 1.0 / rc : HUGE_VAL;
  if (!(out.condition <= threshold)) {
    out.reason = "condition estimate " + sci(out.condition) + " above " + sci(threshold);
    return out;
  }
  Eigen::VectorXcd w = llt.solve(y);
  out.w.assign(w.data(), w.data() + w.size());
  out.ok = true;
  return out;
}

}  // namespace

OracleProblem OracleProblem::whole_past(CovarianceFunction r, double tau, double h, double window) {
  OracleProblem p;
  p.covariance = std::move(r);
  p.spec = PredictorSpec::whole_past(tau);
  p.step = h;
  p.times = uniform_times(-window, 0.0, h);
  return p;
}

OracleProblem OracleProblem::finite_section(CovarianceFunction r, double tau, double half_length,
                                            double h) {
  OracleProblem p;
  p.covariance = std::move(r);
  p.spec = PredictorSpec::finite_section(tau, half_length);
  p.step = h;
  p.times = uniform_times(-2.0 * half_length, 0.0, h);
  return p;
}

bool OracleProblem::uniform() const {
  if (!(step > 0.0) || times.size() < 2) return times.size() < 2;
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - times[k - 1] - step) > 1e-9 * step) return false;
  return true;
}

void OracleProblem::validate() const {
  if (!covariance.evaluate) throw Error(Errc::Validation, "oracle problem has no covariance");
  if (times.empty()) throw Error(Errc::Validation, "oracle window has no observation times");
  if (!(spec.tau >= 0.0) || !std::isfinite(spec.tau))
    throw Error(Errc::Domain, "oracle lag must be non-negative");
  if (step < 0.0) throw Error(Errc::Validation, "grid spacing must be positive");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw Error(Errc::Validation, "observation times must be distinct and increasing");
}

OracleSolution solve_projection(const OracleProblem& problem, const OracleOptions& options) {
  problem.validate();
  const std::size_t m = problem.times.size();
  const auto& r = problem.covariance;
  const double r0 = std::real(r(0.0));
  const double target = problem.t_obs + problem.spec.tau;

  std::vector<cplx> rho(m);
  for (std::size_t k = 0; k < m; ++k) rho[k] = r(target - problem.times[k]);

  const bool toeplitz = options.use_levinson && problem.step > 0.0 && problem.uniform();
  std::vector<cplx> a;  // a_m = r(-m h) = conj r(m h)
  Eigen::MatrixXcd A;
  if (toeplitz) {
    a.resize(m);
    for (std::size_t k = 0; k < m; ++k) a[k] = std::conj(r(static_cast<double>(k) * problem.step));
    a[0] = r0;
  } else {
    A.resize(static_cast<long>(m), static_cast<long>(m));
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t j = k; j < m; ++j) {
        const cplx v = j == k ? cplx(r0) : r(problem.times[j] - problem.times[k]);
        A(static_cast<long>(k), static_cast<long>(j)) = v;
        A(static_cast<long>(j), static_cast<long>(k)) = std::conj(v);
      }
  }
  Eigen::VectorXcd y = Eigen::Map<const Eigen::VectorXcd>(rho.data(), static_cast<long>(m));

  OracleSolution sol;
  sol.spec = problem.spec;
  sol.times = problem.times;
  sol.method = toeplitz ? "levinson" : "dense";
  double jitter = 0.0;
  for (;;) {
    Attempt at = toeplitz ? levinson(a, rho, jitter, options.condition_threshold)
                          : dense(A, y, jitter, options.condition_threshold);
    if (at.ok) {
      sol.weights = std::move(at.w);
      sol.condition = at.condition;
      sol.jitter = jitter;
      break;
    }
    sol.jitter_trace.push_back("jitter " + sci(jitter) + ": " + at.reason);
    const double next = jitter == 0.0 ? options.jitter_start * r0 : jitter * 10.0;
    if (next > options.jitter_max * r0 * (1.0 + 1e-9)) {
      std::string msg = "covariance matrix ill-conditioned after jitter escalation:";
      for (const auto& line : sol.jitter_trace) msg += "\n  " + line;
      throw Error(Errc::IllConditioned, msg);
    }
    jitter = next;
  }
  cplx acc{};
  for (std::size_t j = 0; j < m; ++j) acc += sol.weights[j] * std::conj(rho[j]);
  sol.error_variance = r0 - acc.real();
  return sol;
}

Comparison compare(const PredictionReport& report, const OracleSolution& oracle, double tolerance) {
  if (std::abs(report.spec.tau - oracle.spec.tau) > 1e-12 * std::max(1.0, report.spec.tau))
    throw Error(Errc::Usage, "compare: report and oracle use different lags");
  if (report.spec.finite() != oracle.spec.finite() ||
      (report.spec.finite() &&
       std::abs(*report.spec.half_length - *oracle.spec.half_length) > 1e-12 * *report.spec.half_length))
    throw Error(Errc::Usage, "compare: report and oracle windows differ");
  Comparison c;
  c.tau = report.spec.tau;
  c.half_length = report.spec.half_length;
  c.sigma2_formula = report.sigma2;
  c.sigma2_oracle = oracle.error_variance;
  c.absolute_gap = std::abs(c.sigma2_formula - c.sigma2_oracle);
  c.relative_gap = c.sigma2_formula != 0.0 ? c.absolute_gap / std::abs(c.sigma2_formula)
                                           : (c.absolute_gap == 0.0 ? 0.0 : HUGE_VAL);
  c.tolerance = tolerance;
  c.consistent = c.relative_gap <= tolerance;
  return c;
}

}  // namespace ctp
