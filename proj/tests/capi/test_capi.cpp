#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "ctp/ctp.h"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Ou {
  ctp_model* model = nullptr;
  ctp_factor* factor = nullptr;
  Ou() {
    const double p[2] = {1.0, 1.0};
    REQUIRE(ctp_model_closed_form("ou", p, 2, 64.0, 1.0 / 256, 0, &model) == CTP_OK);
    REQUIRE(ctp_factorize(model, nullptr, &factor) == CTP_OK);
  }
  ~Ou() {
    ctp_factor_free(factor);
    ctp_model_free(model);
  }
};

Ou& ou() {
  static Ou o;
  return o;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(ctp_version()) == "0.1.0");
  for (int s = CTP_OK; s <= CTP_E_INTERNAL; ++s) CHECK(std::string(ctp_status_name(static_cast<ctp_status>(s))).size() > 0);
}

TEST_CASE("config through the C API") {
  ctp_config* cfg = nullptr;
  REQUIRE(ctp_config_parse("family = ou\nparams = 1, 1\npredict.tau = 0.5, 1\n", &cfg) == CTP_OK);
  CHECK(ctp_config_validate(cfg) == CTP_OK);
  double v = 0.0;
  CHECK(ctp_config_number(cfg, "grid.M", &v) == CTP_OK);
  CHECK(v == 64.0);
  double taus[4];
  size_t n = 0;
  CHECK(ctp_config_list(cfg, "predict.tau", taus, 4, &n) == CTP_OK);
  CHECK(n == 2);
  CHECK(taus[1] == 1.0);
  char buf[16];
  size_t need = 0;
  CHECK(ctp_config_string(cfg, "family", buf, sizeof buf, &need) == CTP_OK);
  CHECK(std::string(buf) == "ou");
  const auto h0 = ctp_config_hash(cfg);
  CHECK(ctp_config_set(cfg, "grid.M", "-3") == CTP_OK);
  CHECK(ctp_config_validate(cfg) == CTP_E_CONFIG);
  CHECK(std::string(ctp_last_error()).find("grid.M") != std::string::npos);
  CHECK(ctp_config_hash(cfg) != h0);
  CHECK(ctp_config_set(cfg, "bogus.key", "1") == CTP_E_CONFIG);
  ctp_config_free(cfg);
  CHECK(ctp_config_load("/nonexistent.cfg", &cfg) == CTP_E_IO);
}

TEST_CASE("model, regularity and factor") {
  auto& o = ou();
  double re = 0, im = 0;
  CHECK(ctp_model_covariance(o.model, 1.0, &re, &im) == CTP_OK);
  CHECK(re == doctest::Approx(std::exp(-1.0)).epsilon(1e-8));
  ctp_regularity reg{};
  CHECK(ctp_model_szego(o.model, nullptr, &reg) == CTP_OK);
  CHECK(reg.regular == 1);

  const double band[2] = {1.0, 0.5};
  ctp_model* b = nullptr;
  REQUIRE(ctp_model_closed_form("band", band, 2, 64.0, 1.0 / 256, 0, &b) == CTP_OK);
  CHECK(ctp_model_szego(b, nullptr, &reg) == CTP_OK);
  CHECK(reg.regular == 0);
  ctp_factor* bf = nullptr;
  CHECK(ctp_factorize(b, nullptr, &bf) == CTP_E_REGULARITY);
  CHECK(bf == nullptr);
  ctp_model_free(b);

  ctp_factor_diagnostics d{};
  CHECK(ctp_factor_verify(o.factor, o.model, nullptr, &d) == CTP_OK);
  CHECK(d.all_pass == 1);
  CHECK(d.leak_energy < 1e-6);
  const size_t n = ctp_factor_frequency_count(o.factor);
  std::vector<double> cr(n), ci(n);
  CHECK(ctp_factor_c(o.factor, cr.data(), ci.data(), n) == CTP_OK);
  CHECK(ctp_factor_c(o.factor, cr.data(), ci.data(), n - 1) != CTP_OK);
  const size_t kn = ctp_factor_kernel_count(o.factor);
  std::vector<double> kr(kn), ki(kn);
  CHECK(ctp_factor_kernel(o.factor, kr.data(), ki.data(), kn) == CTP_OK);
  CHECK(kr.back() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));

  CHECK(ctp_model_closed_form("nope", band, 2, 64.0, 1.0 / 256, 0, &b) == CTP_E_CONFIG);
  const double neg[5] = {1, 1, -1, 1, 1};
  CHECK(ctp_model_sampled(neg, 5, 1.0, 0.5, 0, &b) == CTP_E_VALIDATION);
}

TEST_CASE("predictions, oracle and comparison") {
  auto& o = ou();
  ctp_prediction* p = nullptr;
  REQUIRE(ctp_predict_whole_past(o.factor, 1.0, 1, &p) == CTP_OK);
  CHECK(ctp_prediction_sigma2(p) == doctest::Approx(0.864665).epsilon(1e-4));
  const size_t np = ctp_prediction_psi_count(p);
  REQUIRE(np > 0);
  std::vector<double> pr(np), pi(np);
  std::vector<unsigned char> mk(np);
  CHECK(ctp_prediction_psi(p, pr.data(), pi.data(), mk.data(), np) == CTP_OK);
  CHECK(pr[np / 2] == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));

  ctp_oracle* orc = nullptr;
  REQUIRE(ctp_oracle_solve(o.model, nullptr, 1.0, 0.0, 0.01, 20.0, &orc) == CTP_OK);
  ctp_comparison c{};
  CHECK(ctp_compare(p, orc, 1e-2, &c) == CTP_OK);
  CHECK(c.consistent == 1);

  ctp_prediction* fsec = nullptr;
  REQUIRE(ctp_predict_finite_section(o.factor, 1.0, 1.0, &fsec) == CTP_OK);
  CHECK(ctp_prediction_sigma2(fsec) == doctest::Approx(0.867144).epsilon(1e-4));
  CHECK(ctp_compare(fsec, orc, 1e-3, &c) == CTP_E_USAGE);
  ctp_oracle* of = nullptr;
  REQUIRE(ctp_oracle_solve(o.model, nullptr, 1.0, 1.0, 0.01, 0.0, &of) == CTP_OK);
  CHECK(ctp_compare(fsec, of, 1e-3, &c) == CTP_OK);
  CHECK(c.consistent == 0);
  CHECK(c.sigma2_oracle == doctest::Approx(0.864665).epsilon(1e-2));

  const auto dir = fs::temp_directory_path() / "ctp_capi_out";
  fs::remove_all(dir);
  fs::create_directories(dir);
  CHECK(ctp_prediction_write(p, o.factor, dir.c_str(), "wp", 1) == CTP_OK);
  CHECK(ctp_oracle_write(of, dir.c_str(), "oracle", 1) == CTP_OK);
  CHECK(fs::exists(dir / "wp_kernel.csv"));
  CHECK(fs::exists(dir / "oracle.csv"));
  CHECK(ctp_prediction_write(p, o.factor, (dir / "wp_kernel.csv" / "sub").c_str(), "wp", 1) == CTP_E_IO);

  ctp_oracle_free(of);
  ctp_oracle_free(orc);
  ctp_prediction_free(fsec);
  ctp_prediction_free(p);
}

TEST_CASE("simulation, whitening and Monte Carlo") {
  auto& o = ou();
  ctp_path* path = nullptr;
  REQUIRE(ctp_simulate_ma(o.factor, 30000, 1.0 / 256, 3, 0, 1, &path) == CTP_OK);
  CHECK(ctp_path_length(path) == 30000);
  ctp_innovations* w = nullptr;
  ctp_innovations* z = nullptr;
  REQUIRE(ctp_whiten(path, o.factor, &w) == CTP_OK);
  REQUIRE(ctp_innovations_from_noise(path, &z) == CTP_OK);
  const size_t nw = ctp_innovations_count(w);
  std::vector<double> wr(nw), wi(nw);
  CHECK(ctp_innovations_values(w, wr.data(), wi.data(), nw) == CTP_OK);
  const size_t nz = ctp_innovations_count(z);
  std::vector<double> zr(nz), zi(nz);
  CHECK(ctp_innovations_values(z, zr.data(), zi.data(), nz) == CTP_OK);
  const long off = ctp_innovations_first_index(w) - ctp_innovations_first_index(z);
  double num = 0, den = 0;
  for (size_t k = 0; k < nw; ++k) {
    const size_t j = k + static_cast<size_t>(off);
    num += std::pow(wr[k] - zr[j], 2) + std::pow(wi[k] - zi[j], 2);
    den += zr[j] * zr[j] + zi[j] * zi[j];
  }
  CHECK(std::sqrt(num / den) < 5e-2);

  ctp_prediction* p = nullptr;
  REQUIRE(ctp_predict_whole_past(o.factor, 1.0, 0, &p) == CTP_OK);
  double re = 0, im = 0;
  CHECK(ctp_apply_predictor(z, p, 20000.0 / 256, &re, &im) == CTP_OK);
  CHECK(ctp_apply_predictor(z, p, -5000.0 / 256, &re, &im) == CTP_E_WINDOW);
  CHECK(std::string(ctp_last_error()).size() > 0);

  ctp_path* short_path = nullptr;
  REQUIRE(ctp_simulate_ma(o.factor, 3000, 1.0 / 256, 3, 0, 0, &short_path) == CTP_OK);
  ctp_innovations* bad = nullptr;
  CHECK(ctp_whiten(short_path, o.factor, &bad) == CTP_E_INSUFFICIENT_DATA);
  ctp_path* mismatched = nullptr;
  CHECK(ctp_simulate_ma(o.factor, 3000, 0.01, 3, 0, 0, &mismatched) == CTP_E_CONFIG);

  ctp_mc* mc = nullptr;
  REQUIRE(ctp_monte_carlo(o.factor, 1.0, 0.0, 200, 9, 1, NAN, 0, &mc) == CTP_OK);
  ctp_mc_summary s{};
  CHECK(ctp_mc_summary_get(mc, &s) == CTP_OK);
  CHECK(s.n == 200);
  CHECK(s.theory == doctest::Approx(0.864665).epsilon(1e-4));
  CHECK(std::abs(s.z) < 3.5);
  CHECK(s.underpowered == 0);
  ctp_mc_free(mc);

  REQUIRE(ctp_monte_carlo(o.factor, 1.0, 0.0, 20, 9, 1, 0.5, 0, &mc) == CTP_OK);
  CHECK(ctp_mc_summary_get(mc, &s) == CTP_OK);
  CHECK(s.theory == 0.5);
  CHECK(s.underpowered == 1);
  ctp_mc_free(mc);

  ctp_prediction_free(p);
  ctp_innovations_free(w);
  ctp_innovations_free(z);
  ctp_path_free(short_path);
  ctp_path_free(path);
}
