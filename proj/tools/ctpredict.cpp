// ctpredict: command-line front end over the C interface.
//
// Exit codes: 0 ok, 1 usage or input error, 2 deterministic density,
// 3 verification failure.

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctp/ctp.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDeterministic = 2;
constexpr int kExitVerify = 3;

// Thrown to unwind with an exit code after the message has been printed.
struct Exit {
  int code;
};

int exit_for(ctp_status s) { return s == CTP_E_REGULARITY ? kExitDeterministic : kExitUsage; }

void check(ctp_status s, const char* what) {
  if (s == CTP_OK) return;
  std::fprintf(stderr, "ctpredict: %s: %s (%s)\n", what, ctp_last_error(), ctp_status_name(s));
  throw Exit{exit_for(s)};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Config = std::unique_ptr<ctp_config, Deleter<ctp_config, ctp_config_free>>;
using Model = std::unique_ptr<ctp_model, Deleter<ctp_model, ctp_model_free>>;
using Factor = std::unique_ptr<ctp_factor, Deleter<ctp_factor, ctp_factor_free>>;
using Prediction = std::unique_ptr<ctp_prediction, Deleter<ctp_prediction, ctp_prediction_free>>;
using Path = std::unique_ptr<ctp_path, Deleter<ctp_path, ctp_path_free>>;
using Oracle = std::unique_ptr<ctp_oracle, Deleter<ctp_oracle, ctp_oracle_free>>;
using Mc = std::unique_ptr<ctp_mc, Deleter<ctp_mc, ctp_mc_free>>;

struct Globals {
  std::string config_path;
  std::string out_dir = "ctp_out";
  std::string seed;
};

std::string hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string num(double v) {
  // Shortest representation that round-trips.
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Config load(const Globals& g) {
  if (g.config_path.empty()) {
    std::fprintf(stderr, "ctpredict: --config is required\n");
    throw Exit{kExitUsage};
  }
  ctp_config* raw = nullptr;
  check(ctp_config_load(g.config_path.c_str(), &raw), "config");
  Config cfg(raw);
  if (!g.seed.empty()) check(ctp_config_set(cfg.get(), "sim.seed", g.seed.c_str()), "--seed");
  check(ctp_config_validate(cfg.get()), "config");
  return cfg;
}

double number(const Config& cfg, const char* key) {
  double v = 0.0;
  check(ctp_config_number(cfg.get(), key, &v), key);
  return v;
}

std::vector<double> list(const Config& cfg, const char* key) {
  size_t n = 0;
  check(ctp_config_list(cfg.get(), key, nullptr, 0, &n), key);
  std::vector<double> v(n);
  if (n) check(ctp_config_list(cfg.get(), key, v.data(), n, &n), key);
  return v;
}

std::string text(const Config& cfg, const char* key) {
  size_t n = 0;
  check(ctp_config_string(cfg.get(), key, nullptr, 0, &n), key);
  std::string s(n + 1, '\0');
  check(ctp_config_string(cfg.get(), key, s.data(), s.size(), &n), key);
  s.resize(n);
  return s;
}

Model model_of(const Config& cfg) {
  ctp_model* m = nullptr;
  check(ctp_model_from_config(cfg.get(), &m), "model");
  return Model(m);
}

Factor factor_of(const Config& cfg, const Model& model) {
  ctp_factor* f = nullptr;
  check(ctp_factorize(model.get(), cfg.get(), &f), "factorize");
  return Factor(f);
}

std::ofstream open_csv(const std::string& file, uint64_t hash, const char* columns) {
  std::filesystem::create_directories(std::filesystem::path(file).parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "ctpredict: cannot write %s\n", file.c_str());
    throw Exit{kExitUsage};
  }
  out << "# ctpredict " << ctp_version() << " config=" << hex(hash) << "\n" << columns << "\n";
  return out;
}

uint64_t seed_of(const Config& cfg) {
  uint64_t seed = 0;
  if (ctp_config_u64(cfg.get(), "sim.seed", &seed) != CTP_OK) {
    std::fprintf(stderr, "ctpredict: simulation needs a seed (sim.seed or --seed)\n");
    throw Exit{kExitUsage};
  }
  return seed;
}

int cmd_check(const Globals& g) {
  Config cfg = load(g);
  Model model = model_of(cfg);
  ctp_regularity r{};
  check(ctp_model_szego(model.get(), cfg.get(), &r), "szego");
  std::printf("classification %s\n", r.regular ? "regular" : "deterministic");
  std::printf("szego_value %s\n", num(r.szego_value).c_str());
  std::printf("floored_value %s\n", num(r.floored_value).c_str());
  std::printf("subfloor_fraction %s\n", num(r.subfloor_fraction).c_str());
  return r.regular ? kExitOk : kExitDeterministic;
}

int cmd_factorize(const Globals& g) {
  Config cfg = load(g);
  const uint64_t hash = ctp_config_hash(cfg.get());
  Model model = model_of(cfg);
  Factor factor = factor_of(cfg, model);
  check(ctp_factor_write(factor.get(), model.get(), cfg.get(), g.out_dir.c_str(), hash), "write");
  ctp_factor_diagnostics d{};
  check(ctp_factor_verify(factor.get(), model.get(), cfg.get(), &d), "verify");
  std::printf("leak_energy %s\nplancherel_gap %s\nlog_integral_gap %s\nmodulus_error %s\n",
              num(d.leak_energy).c_str(), num(d.plancherel_gap).c_str(), num(d.log_integral_gap).c_str(),
              num(d.modulus_error).c_str());
  if (!d.all_pass) {
    std::fprintf(stderr, "ctpredict: factor invariants failed, see %s/diagnostics.json\n", g.out_dir.c_str());
    return kExitVerify;
  }
  return kExitOk;
}

int cmd_predict(const Globals& g) {
  Config cfg = load(g);
  const uint64_t hash = ctp_config_hash(cfg.get());
  const auto taus = list(cfg, "predict.tau");
  if (taus.empty()) {
    std::fprintf(stderr, "ctpredict: config key 'predict.tau' is empty\n");
    return kExitUsage;
  }
  const auto halves = list(cfg, "predict.T");
  const bool whole = number(cfg, "predict.whole_past") != 0.0;
  const bool oracle = number(cfg, "predict.oracle") != 0.0;
  const bool psi = number(cfg, "predict.psi") != 0.0;
  const double tol = number(cfg, "tol.compare");
  const double oh = number(cfg, "oracle.h"), window = number(cfg, "oracle.window");

  Model model = model_of(cfg);
  Factor factor = factor_of(cfg, model);
  auto summary = open_csv(g.out_dir + "/summary.csv", hash, "tau,T,sigma2_formula,sigma2_oracle,gap,verdict");

  auto emit = [&](double tau, double T, bool with_oracle) {
    ctp_prediction* raw = nullptr;
    if (T > 0.0)
      check(ctp_predict_finite_section(factor.get(), tau, T, &raw), "predict");
    else
      check(ctp_predict_whole_past(factor.get(), tau, psi ? 1 : 0, &raw), "predict");
    Prediction p(raw);
    const std::string stem = T > 0.0 ? "fs_tau" + tag(tau) + "_T" + tag(T) : "wp_tau" + tag(tau);
    check(ctp_prediction_write(p.get(), factor.get(), g.out_dir.c_str(), stem.c_str(), hash), "write");
    const std::string Tcol = T > 0.0 ? num(T) : "";
    if (!with_oracle) {
      summary << num(tau) << ',' << Tcol << ',' << num(ctp_prediction_sigma2(p.get())) << ",,,none\n";
      std::printf("%s sigma2 %s\n", stem.c_str(), num(ctp_prediction_sigma2(p.get())).c_str());
      return;
    }
    ctp_oracle* oraw = nullptr;
    check(ctp_oracle_solve(model.get(), cfg.get(), tau, T, oh, window, &oraw), "oracle");
    Oracle o(oraw);
    check(ctp_oracle_write(o.get(), g.out_dir.c_str(), ("oracle_" + stem).c_str(), hash), "write");
    ctp_comparison c{};
    check(ctp_compare(p.get(), o.get(), tol, &c), "compare");
    const char* verdict = c.consistent ? "consistent" : "divergent";
    summary << num(tau) << ',' << Tcol << ',' << num(c.sigma2_formula) << ',' << num(c.sigma2_oracle) << ','
            << num(c.relative_gap) << ',' << verdict << '\n';
    std::printf("%s sigma2 %s oracle %s gap %s %s\n", stem.c_str(), num(c.sigma2_formula).c_str(),
                num(c.sigma2_oracle).c_str(), num(c.relative_gap).c_str(), verdict);
  };
  for (double tau : taus) {
    if (whole) emit(tau, 0.0, oracle);
    // Finite sections always carry the observation-span oracle alongside.
    for (double T : halves) emit(tau, T, true);
  }
  return kExitOk;
}

int cmd_simulate(const Globals& g) {
  Config cfg = load(g);
  const uint64_t hash = ctp_config_hash(cfg.get());
  const uint64_t seed = seed_of(cfg);
  const auto n = static_cast<size_t>(number(cfg, "sim.length"));
  const int real = number(cfg, "mode") != 0.0;
  const double h = number(cfg, "time.h");
  Model model = model_of(cfg);
  ctp_path* raw = nullptr;
  if (text(cfg, "sim.method") == "spectral") {
    check(ctp_simulate_spectral(model.get(), n, h, seed, real, &raw), "simulate");
  } else {
    Factor factor = factor_of(cfg, model);
    check(ctp_simulate_ma(factor.get(), n, h, seed, real, 0, &raw), "simulate");
  }
  Path path(raw);
  for (size_t i = 0; i < ctp_path_warning_count(path.get()); ++i)
    std::fprintf(stderr, "ctpredict: warning: %s\n", ctp_path_warning(path.get(), i));
  const std::string file = g.out_dir + "/path.csv";
  check(ctp_path_write(path.get(), file.c_str(), hash), "write");
  std::printf("wrote %zu samples to %s\n", ctp_path_length(path.get()), file.c_str());
  return kExitOk;
}

int cmd_verify(const Globals& g) {
  Config cfg = load(g);
  const uint64_t hash = ctp_config_hash(cfg.get());
  const uint64_t seed = seed_of(cfg);
  const auto taus = list(cfg, "predict.tau");
  if (taus.empty()) {
    std::fprintf(stderr, "ctpredict: config key 'predict.tau' is empty\n");
    return kExitUsage;
  }
  const auto halves = list(cfg, "predict.T");
  const bool whole = number(cfg, "predict.whole_past") != 0.0;
  const auto N = static_cast<size_t>(number(cfg, "sim.N"));
  const auto threads = static_cast<unsigned>(number(cfg, "sim.threads"));
  const int real = number(cfg, "mode") != 0.0;
  const double zmax = number(cfg, "tol.z");
  double theory = NAN;
  (void)ctp_config_number(cfg.get(), "verify.theory_override", &theory);

  Model model = model_of(cfg);
  Factor factor = factor_of(cfg, model);
  auto summary = open_csv(g.out_dir + "/verify_summary.csv", hash, "tau,T,n,mse,stderr,theory,z,verdict");
  std::vector<std::string> failures;
  auto run = [&](double tau, double T) {
    ctp_mc* raw = nullptr;
    check(ctp_monte_carlo(factor.get(), tau, T, N, seed, threads, theory, real, &raw), "monte carlo");
    Mc mc(raw);
    ctp_mc_summary s{};
    check(ctp_mc_summary_get(mc.get(), &s), "monte carlo");
    const std::string stem = T > 0.0 ? "mc_fs_tau" + tag(tau) + "_T" + tag(T) : "mc_wp_tau" + tag(tau);
    check(ctp_mc_write(mc.get(), (g.out_dir + "/" + stem + ".json").c_str(), hash), "write");
    const bool pass = std::abs(s.z) <= zmax;
    const std::string line = num(tau) + ',' + (T > 0.0 ? num(T) : "") + ',' + std::to_string(s.n) + ',' +
                             num(s.mse) + ',' + num(s.std_error) + ',' + num(s.theory) + ',' + num(s.z) + ',' +
                             (pass ? "pass" : "fail");
    summary << line << '\n';
    std::printf("%s n %zu mse %.6f stderr %.6f theory %.6f z %.3f%s\n", stem.c_str(), s.n, s.mse, s.std_error,
                s.theory, s.z, s.underpowered ? " (underpowered)" : "");
    if (!pass) failures.push_back(line);
  };
  for (double tau : taus) {
    if (whole) run(tau, 0.0);
    for (double T : halves) run(tau, T);
  }
  if (!failures.empty()) {
    std::fprintf(stderr, "ctpredict: %zu Monte Carlo row(s) outside |z| <= %g:\n", failures.size(), zmax);
    for (const auto& f : failures) std::fprintf(stderr, "  %s\n", f.c_str());
    return kExitVerify;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least-squares prediction of stationary continuous-time processes"};
  app.set_version_flag("--version", std::string(ctp_version()));
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "configuration file (key = value lines)");
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "simulation seed (overrides sim.seed)");
  app.fallthrough();

  int code = kExitOk;
  auto* check_cmd = app.add_subcommand("check", "classify the density by the Szego condition");
  auto* fact_cmd = app.add_subcommand("factorize", "outer factor, kernel and diagnostics");
  auto* pred_cmd = app.add_subcommand("predict", "whole-past and finite-section predictors");
  auto* sim_cmd = app.add_subcommand("simulate", "sample path by moving average or spectral synthesis");
  auto* ver_cmd = app.add_subcommand("verify", "Monte Carlo check of the error variances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  if (!g.seed.empty() && g.seed.find_first_not_of("0123456789") != std::string::npos) {
    std::fprintf(stderr, "ctpredict: --seed must be a non-negative integer\n");
    return kExitUsage;
  }
  try {
    if (check_cmd->parsed()) code = cmd_check(g);
    else if (fact_cmd->parsed()) code = cmd_factorize(g);
    else if (pred_cmd->parsed()) code = cmd_predict(g);
    else if (sim_cmd->parsed()) code = cmd_simulate(g);
    else if (ver_cmd->parsed()) code = cmd_verify(g);
  } catch (const Exit& e) {
    code = e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ctpredict: %s\n", e.what());
    code = kExitUsage;
  }
  return code;
}
