#include "ctp/ctp.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "ctp/config.hpp"
#include "ctp/error.hpp"
#include "ctp/io.hpp"
#include "ctp/oracle.hpp"
#include "ctp/predictor.hpp"
#include "ctp/simulate.hpp"
#include "ctp/szego.hpp"

struct ctp_config {
  ctp::Config cfg;
};
struct ctp_model {
  ctp::SpectralModel m;
};
struct ctp_factor {
  ctp::SzegoFactor f;
};
struct ctp_prediction {
  ctp::PredictionReport r;
};
struct ctp_path {
  ctp::SamplePath p;
};
struct ctp_innovations {
  ctp::InnovationSeries s;
};
struct ctp_oracle {
  ctp::OracleSolution s;
};
struct ctp_mc {
  ctp::McReport r;
};

namespace {

thread_local std::string last_error;

ctp_status to_status(ctp::Errc code) {
  switch (code) {
    case ctp::Errc::Config: return CTP_E_CONFIG;
    case ctp::Errc::Validation: return CTP_E_VALIDATION;
    case ctp::Errc::Regularity: return CTP_E_REGULARITY;
    case ctp::Errc::Factorization: return CTP_E_FACTORIZATION;
    case ctp::Errc::Domain: return CTP_E_DOMAIN;
    case ctp::Errc::Degenerate: return CTP_E_DEGENERATE;
    case ctp::Errc::InsufficientData: return CTP_E_INSUFFICIENT_DATA;
    case ctp::Errc::Window: return CTP_E_WINDOW;
    case ctp::Errc::IllConditioned: return CTP_E_ILL_CONDITIONED;
    case ctp::Errc::Usage: return CTP_E_USAGE;
    case ctp::Errc::Truncation: return CTP_E_TRUNCATION;
    case ctp::Errc::Io: return CTP_E_IO;
  }
  return CTP_E_INTERNAL;
}

template <class F>
ctp_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return CTP_OK;
  } catch (const ctp::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return CTP_E_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return CTP_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw ctp::Error(ctp::Errc::Usage, std::string(what) + " is null");
}

void need_room(std::size_t have, std::size_t want) {
  if (have < want)
    throw ctp::Error(ctp::Errc::Usage, "output buffer holds " + std::to_string(have) + " values, " +
                                           std::to_string(want) + " needed");
}

template <class Span>
void split(const Span& values, double* re, double* im, std::size_t n) {
  need_room(n, values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (re) re[i] = values[i].real();
    if (im) im[i] = values[i].imag();
  }
}

ctp::RunSettings settings_or_default(const ctp_config* cfg) {
  if (cfg) return ctp::RunSettings::from(cfg->cfg);
  return ctp::RunSettings{};
}

}  // namespace

extern "C" {

const char* ctp_version(void) { return ctp::kVersion; }
const char* ctp_last_error(void) { return last_error.c_str(); }

const char* ctp_status_name(ctp_status status) {
  switch (status) {
    case CTP_OK: return "ok";
    case CTP_E_CONFIG: return ctp::errc_name(ctp::Errc::Config);
    case CTP_E_VALIDATION: return ctp::errc_name(ctp::Errc::Validation);
    case CTP_E_REGULARITY: return ctp::errc_name(ctp::Errc::Regularity);
    case CTP_E_FACTORIZATION: return ctp::errc_name(ctp::Errc::Factorization);
    case CTP_E_DOMAIN: return ctp::errc_name(ctp::Errc::Domain);
    case CTP_E_DEGENERATE: return ctp::errc_name(ctp::Errc::Degenerate);
    case CTP_E_INSUFFICIENT_DATA: return ctp::errc_name(ctp::Errc::InsufficientData);
    case CTP_E_WINDOW: return ctp::errc_name(ctp::Errc::Window);
    case CTP_E_ILL_CONDITIONED: return ctp::errc_name(ctp::Errc::IllConditioned);
    case CTP_E_USAGE: return ctp::errc_name(ctp::Errc::Usage);
    case CTP_E_TRUNCATION: return ctp::errc_name(ctp::Errc::Truncation);
    case CTP_E_IO: return ctp::errc_name(ctp::Errc::Io);
    case CTP_E_INTERNAL: return "internal";
  }
  return "unknown";
}

/* configuration */

ctp_status ctp_config_load(const char* path, ctp_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new ctp_config{ctp::Config::load(path)};
  });
}

ctp_status ctp_config_parse(const char* text, ctp_config** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new ctp_config{ctp::Config::parse(text)};
  });
}

ctp_status ctp_config_set(ctp_config* cfg, const char* key, const char* value) {
  return guard([&] {
    need(cfg, "config");
    need(key, "key");
    need(value, "value");
    cfg->cfg.set(key, value);
  });
}

ctp_status ctp_config_validate(const ctp_config* cfg) {
  return guard([&] {
    need(cfg, "config");
    (void)ctp::RunSettings::from(cfg->cfg);
  });
}

uint64_t ctp_config_hash(const ctp_config* cfg) { return cfg ? cfg->cfg.hash() : 0; }

ctp_status ctp_config_number(const ctp_config* cfg, const char* key, double* out) {
  return guard([&] {
    need(cfg, "config");
    need(key, "key");
    need(out, "out");
    const auto s = ctp::RunSettings::from(cfg->cfg);
    const std::string k = key;
    if (k == "grid.M") *out = s.grid.cutoff;
    else if (k == "grid.dmu") *out = s.grid.spacing;
    else if (k == "time.h") *out = s.time.step;
    else if (k == "time.L") *out = s.time.extent;
    else if (k == "floor") *out = s.regularity.floor;
    else if (k == "mode") *out = s.real_mode ? 1.0 : 0.0;
    else if (k == "regularity.divergence_threshold") *out = s.regularity.divergence_threshold;
    else if (k == "regularity.max_subfloor_fraction") *out = s.regularity.max_subfloor_fraction;
    else if (k == "tol.modulus") *out = s.tolerances.modulus;
    else if (k == "tol.support") *out = s.tolerances.support;
    else if (k == "tol.plancherel") *out = s.tolerances.plancherel;
    else if (k == "tol.tail") *out = s.tolerances.tail;
    else if (k == "tol.log_integral") *out = s.tolerances.log_integral;
    else if (k == "tol.compare") *out = s.compare_tolerance;
    else if (k == "tol.z") *out = s.z_threshold;
    else if (k == "predict.whole_past") *out = s.whole_past;
    else if (k == "predict.oracle") *out = s.oracle;
    else if (k == "predict.psi") *out = s.write_psi;
    else if (k == "oracle.h") *out = s.oracle_step;
    else if (k == "oracle.window") *out = s.oracle_window;
    else if (k == "sim.N") *out = static_cast<double>(s.sim_replicates);
    else if (k == "sim.length") *out = static_cast<double>(s.sim_length);
    else if (k == "sim.threads") *out = s.sim_threads;
    else if (k == "sim.seed" && s.sim_seed) *out = static_cast<double>(*s.sim_seed);
    else if (k == "verify.theory_override" && s.theory_override) *out = *s.theory_override;
    else throw ctp::Error(ctp::Errc::Config, "config key '" + k + "' has no numeric value");
  });
}

ctp_status ctp_config_u64(const ctp_config* cfg, const char* key, uint64_t* out) {
  return guard([&] {
    need(cfg, "config");
    need(key, "key");
    need(out, "out");
    if (!cfg->cfg.has(key)) throw ctp::Error(ctp::Errc::Config, std::string("config key '") + key + "' is not set");
    *out = cfg->cfg.get_u64(key, 0);
  });
}

ctp_status ctp_config_list(const ctp_config* cfg, const char* key, double* out, size_t capacity,
                           size_t* count) {
  return guard([&] {
    need(cfg, "config");
    need(key, "key");
    const auto v = cfg->cfg.get_list(key);
    if (count) *count = v.size();
    if (out) {
      need_room(capacity, v.size());
      std::copy(v.begin(), v.end(), out);
    }
  });
}

ctp_status ctp_config_string(const ctp_config* cfg, const char* key, char* out, size_t capacity,
                             size_t* needed) {
  return guard([&] {
    need(cfg, "config");
    need(key, "key");
    const std::string k = key;
    std::string v;
    if (k == "density.csv" || k == "oracle.covariance" || k == "sim.method" || k == "mode" ||
        k == "family") {
      const auto s = ctp::RunSettings::from(cfg->cfg);
      if (k == "density.csv") v = s.density_csv;
      else if (k == "oracle.covariance") v = s.oracle_covariance;
      else if (k == "sim.method") v = s.sim_method;
      else if (k == "mode") v = s.real_mode ? "real" : "complex";
      else v = s.family ? ctp::family_name(*s.family) : "";
    } else {
      auto raw = cfg->cfg.raw(k);
      if (!raw) throw ctp::Error(ctp::Errc::Config, "config key '" + k + "' is not set");
      v = *raw;
    }
    if (needed) *needed = v.size();
    if (out && capacity > 0) {
      const std::size_t n = std::min(capacity - 1, v.size());
      std::memcpy(out, v.data(), n);
      out[n] = '\0';
    }
  });
}

void ctp_config_free(ctp_config* cfg) { delete cfg; }

/* spectral model */

ctp_status ctp_model_from_config(const ctp_config* cfg, ctp_model** out) {
  return guard([&] {
    need(cfg, "config");
    need(out, "out");
    *out = new ctp_model{ctp::build_model(ctp::RunSettings::from(cfg->cfg))};
  });
}

ctp_status ctp_model_closed_form(const char* family, const double* params, size_t n_params,
                                 double cutoff, double spacing, int real_mode, ctp_model** out) {
  return guard([&] {
    need(family, "family");
    need(out, "out");
    if (n_params) need(params, "params");
    std::vector<double> p(params, params + n_params);
    *out = new ctp_model{ctp::SpectralModel::closed_form(ctp::parse_family(family), std::move(p),
                                                         {cutoff, spacing}, real_mode != 0)};
  });
}

ctp_status ctp_model_sampled(const double* density, size_t n, double cutoff, double spacing,
                             int real_mode, ctp_model** out) {
  return guard([&] {
    need(density, "density");
    need(out, "out");
    ctp::FrequencyGrid grid{cutoff, spacing};
    grid.validate();
    if (n != grid.size())
      throw ctp::Error(ctp::Errc::Validation, "density has " + std::to_string(n) + " samples, grid needs " +
                                                  std::to_string(grid.size()));
    *out = new ctp_model{ctp::SpectralModel::sampled(grid, std::vector<double>(density, density + n),
                                                     real_mode != 0)};
  });
}

double ctp_model_total_mass(const ctp_model* model) {
  return model ? model->m.total_mass() : std::numeric_limits<double>::quiet_NaN();
}

ctp_status ctp_model_covariance(const ctp_model* model, double t, double* re, double* im) {
  return guard([&] {
    need(model, "model");
    const auto v = ctp::covariance_from_density(model->m, t);
    if (re) *re = v.real();
    if (im) *im = v.imag();
  });
}

ctp_status ctp_model_szego(const ctp_model* model, const ctp_config* cfg, ctp_regularity* out) {
  return guard([&] {
    need(model, "model");
    need(out, "out");
    const auto rep = ctp::szego_integral(model->m, settings_or_default(cfg).regularity);
    out->regular = rep.classification == ctp::Regularity::Regular;
    out->szego_value = rep.szego_value;
    out->floored_value = rep.floored_value;
    out->subfloor_fraction = rep.subfloor_fraction;
  });
}

void ctp_model_free(ctp_model* model) { delete model; }

/* factor */

ctp_status ctp_factorize(const ctp_model* model, const ctp_config* cfg, ctp_factor** out) {
  return guard([&] {
    need(model, "model");
    need(out, "out");
    const auto s = settings_or_default(cfg);
    *out = new ctp_factor{ctp::factorize(model->m, s.time, s.tolerances)};
  });
}

ctp_status ctp_factor_verify(const ctp_factor* factor, const ctp_model* model, const ctp_config* cfg,
                             ctp_factor_diagnostics* out) {
  return guard([&] {
    need(factor, "factor");
    need(model, "model");
    need(out, "out");
    const auto d = ctp::verify_factor(factor->f, model->m, settings_or_default(cfg).tolerances);
    out->leak_energy = d.leak_energy;
    out->plancherel_gap = d.plancherel_gap;
    out->log_integral_gap = d.log_integral_gap;
    out->modulus_error = d.modulus_error;
    out->tail_level = d.tail_level;
    out->truncated_energy = d.truncated_energy;
    out->all_pass = d.all_pass();
  });
}

double ctp_factor_step(const ctp_factor* factor) {
  return factor ? factor->f.step() : std::numeric_limits<double>::quiet_NaN();
}

size_t ctp_factor_frequency_count(const ctp_factor* factor) {
  return factor ? factor->f.c_freq().size() : 0;
}

ctp_status ctp_factor_c(const ctp_factor* factor, double* re, double* im, size_t n) {
  return guard([&] {
    need(factor, "factor");
    split(factor->f.c_freq(), re, im, n);
  });
}

size_t ctp_factor_kernel_count(const ctp_factor* factor) { return factor ? factor->f.kernel().size() : 0; }

ctp_status ctp_factor_kernel(const ctp_factor* factor, double* re, double* im, size_t n) {
  return guard([&] {
    need(factor, "factor");
    split(factor->f.kernel(), re, im, n);
  });
}

ctp_status ctp_factor_write(const ctp_factor* factor, const ctp_model* model, const ctp_config* cfg,
                            const char* dir, uint64_t config_hash) {
  return guard([&] {
    need(factor, "factor");
    need(model, "model");
    need(dir, "dir");
    ctp::write_factor(factor->f, dir, config_hash);
    const auto d = ctp::verify_factor(factor->f, model->m, settings_or_default(cfg).tolerances);
    ctp::write_factor_diagnostics(d, std::string(dir) + "/diagnostics.json", config_hash);
  });
}

void ctp_factor_free(ctp_factor* factor) { delete factor; }

/* prediction */

ctp_status ctp_predict_whole_past(const ctp_factor* factor, double tau, int with_psi, ctp_prediction** out) {
  return guard([&] {
    need(factor, "factor");
    need(out, "out");
    *out = new ctp_prediction{ctp::predict_whole_past(factor->f, tau, with_psi != 0)};
  });
}

ctp_status ctp_predict_finite_section(const ctp_factor* factor, double tau, double half_length,
                                      ctp_prediction** out) {
  return guard([&] {
    need(factor, "factor");
    need(out, "out");
    *out = new ctp_prediction{ctp::predict_finite_section(factor->f, tau, half_length)};
  });
}

double ctp_prediction_tau(const ctp_prediction* p) { return p ? p->r.spec.tau : 0.0; }
double ctp_prediction_half_length(const ctp_prediction* p) {
  return p && p->r.spec.finite() ? *p->r.spec.half_length : 0.0;
}
double ctp_prediction_sigma2(const ctp_prediction* p) {
  return p ? p->r.sigma2 : std::numeric_limits<double>::quiet_NaN();
}
double ctp_prediction_masked_fraction(const ctp_prediction* p) { return p ? p->r.masked_fraction() : 0.0; }
size_t ctp_prediction_kernel_count(const ctp_prediction* p) { return p ? p->r.kernel.size() : 0; }

ctp_status ctp_prediction_kernel(const ctp_prediction* p, double* re, double* im, size_t n) {
  return guard([&] {
    need(p, "prediction");
    split(p->r.kernel, re, im, n);
  });
}

size_t ctp_prediction_psi_count(const ctp_prediction* p) {
  return p && p->r.psi ? p->r.psi->psi.size() : 0;
}

ctp_status ctp_prediction_psi(const ctp_prediction* p, double* re, double* im, unsigned char* masked,
                              size_t n) {
  return guard([&] {
    need(p, "prediction");
    if (!p->r.psi) throw ctp::Error(ctp::Errc::Usage, "prediction function was not requested");
    const auto& f = *p->r.psi;
    need_room(n, f.psi.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < f.psi.size(); ++i) {
      if (re) re[i] = f.masked[i] ? nan : f.psi[i].real();
      if (im) im[i] = f.masked[i] ? nan : f.psi[i].imag();
      if (masked) masked[i] = f.masked[i];
    }
  });
}

ctp_status ctp_prediction_write(const ctp_prediction* p, const ctp_factor* factor, const char* dir,
                                const char* stem, uint64_t config_hash) {
  return guard([&] {
    need(p, "prediction");
    need(factor, "factor");
    need(dir, "dir");
    need(stem, "stem");
    ctp::write_prediction(p->r, factor->f, dir, stem, config_hash);
  });
}

void ctp_prediction_free(ctp_prediction* p) { delete p; }

/* simulation */

ctp_status ctp_simulate_ma(const ctp_factor* factor, size_t n_points, double h, uint64_t seed,
                           int real_mode, int keep_noise, ctp_path** out) {
  return guard([&] {
    need(factor, "factor");
    need(out, "out");
    *out = new ctp_path{ctp::simulate_ma(factor->f, n_points, h, seed, {real_mode != 0, keep_noise != 0})};
  });
}

ctp_status ctp_simulate_spectral(const ctp_model* model, size_t n_points, double h, uint64_t seed,
                                 int real_mode, ctp_path** out) {
  return guard([&] {
    need(model, "model");
    need(out, "out");
    *out = new ctp_path{ctp::simulate_spectral(model->m, n_points, h, seed, real_mode != 0)};
  });
}

size_t ctp_path_length(const ctp_path* path) { return path ? path->p.values.size() : 0; }

ctp_status ctp_path_values(const ctp_path* path, double* re, double* im, size_t n) {
  return guard([&] {
    need(path, "path");
    split(path->p.values, re, im, n);
  });
}

size_t ctp_path_warning_count(const ctp_path* path) { return path ? path->p.warnings.size() : 0; }

const char* ctp_path_warning(const ctp_path* path, size_t i) {
  if (!path || i >= path->p.warnings.size()) return nullptr;
  return path->p.warnings[i].c_str();
}

ctp_status ctp_path_write(const ctp_path* path, const char* file, uint64_t config_hash) {
  return guard([&] {
    need(path, "path");
    need(file, "file");
    ctp::write_path(path->p, file, config_hash);
  });
}

void ctp_path_free(ctp_path* path) { delete path; }

ctp_status ctp_whiten(const ctp_path* path, const ctp_factor* factor, ctp_innovations** out) {
  return guard([&] {
    need(path, "path");
    need(factor, "factor");
    need(out, "out");
    *out = new ctp_innovations{ctp::whiten_path(path->p, factor->f)};
  });
}

ctp_status ctp_innovations_from_noise(const ctp_path* path, ctp_innovations** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new ctp_innovations{ctp::InnovationSeries::from_noise(path->p)};
  });
}

size_t ctp_innovations_count(const ctp_innovations* innov) { return innov ? innov->s.increments.size() : 0; }
long ctp_innovations_first_index(const ctp_innovations* innov) { return innov ? innov->s.first_index : 0; }

ctp_status ctp_innovations_values(const ctp_innovations* innov, double* re, double* im, size_t n) {
  return guard([&] {
    need(innov, "innovations");
    split(innov->s.increments, re, im, n);
  });
}

ctp_status ctp_apply_predictor(const ctp_innovations* innov, const ctp_prediction* p, double t,
                               double* re, double* im) {
  return guard([&] {
    need(innov, "innovations");
    need(p, "prediction");
    const auto v = ctp::apply_predictor(innov->s, p->r, t);
    if (re) *re = v.real();
    if (im) *im = v.imag();
  });
}

void ctp_innovations_free(ctp_innovations* innov) { delete innov; }

ctp_status ctp_monte_carlo(const ctp_factor* factor, double tau, double half_length, size_t replicates,
                           uint64_t seed, unsigned threads, double theory_override, int real_mode,
                           ctp_mc** out) {
  return guard([&] {
    need(factor, "factor");
    need(out, "out");
    const auto spec = half_length > 0.0 ? ctp::PredictorSpec::finite_section(tau, half_length)
                                        : ctp::PredictorSpec::whole_past(tau);
    ctp::McOptions opt;
    opt.threads = threads;
    opt.real_mode = real_mode != 0;
    if (std::isfinite(theory_override)) opt.theory = theory_override;
    *out = new ctp_mc{ctp::monte_carlo_mse(factor->f, spec, replicates, seed, opt)};
  });
}

ctp_status ctp_mc_summary_get(const ctp_mc* mc, ctp_mc_summary* out) {
  return guard([&] {
    need(mc, "mc");
    need(out, "out");
    const auto& r = mc->r;
    out->n = r.n;
    out->mse = r.mse;
    out->std_error = r.std_error;
    out->theory = r.theory;
    out->z = r.z;
    out->pythagoras_gap = r.pythagoras_gap;
    out->pythagoras_z = r.pythagoras_z;
    out->max_orthogonality_z = 0.0;
    for (const auto& c : r.orthogonality) out->max_orthogonality_z = std::max(out->max_orthogonality_z, c.z);
    out->underpowered = r.underpowered;
  });
}

ctp_status ctp_mc_write(const ctp_mc* mc, const char* file, uint64_t config_hash) {
  return guard([&] {
    need(mc, "mc");
    need(file, "file");
    ctp::write_mc_report(mc->r, file, config_hash);
  });
}

void ctp_mc_free(ctp_mc* mc) { delete mc; }

/* oracle */

ctp_status ctp_oracle_solve(const ctp_model* model, const ctp_config* cfg, double tau, double half_length,
                            double h, double window, ctp_oracle** out) {
  return guard([&] {
    need(model, "model");
    need(out, "out");
    ctp::RunSettings s = settings_or_default(cfg);
    if (!cfg) s.oracle_covariance = "auto";
    auto r = ctp::build_covariance(s, model->m);
    auto problem = half_length > 0.0
                       ? ctp::OracleProblem::finite_section(std::move(r), tau, half_length, h)
                       : ctp::OracleProblem::whole_past(std::move(r), tau, h, window);
    *out = new ctp_oracle{ctp::solve_projection(problem)};
  });
}

double ctp_oracle_sigma2(const ctp_oracle* oracle) {
  return oracle ? oracle->s.error_variance : std::numeric_limits<double>::quiet_NaN();
}
double ctp_oracle_condition(const ctp_oracle* oracle) { return oracle ? oracle->s.condition : 0.0; }
double ctp_oracle_jitter(const ctp_oracle* oracle) { return oracle ? oracle->s.jitter : 0.0; }
size_t ctp_oracle_count(const ctp_oracle* oracle) { return oracle ? oracle->s.weights.size() : 0; }

ctp_status ctp_oracle_weights(const ctp_oracle* oracle, double* u, double* re, double* im, size_t n) {
  return guard([&] {
    need(oracle, "oracle");
    split(oracle->s.weights, re, im, n);
    if (u) std::copy(oracle->s.times.begin(), oracle->s.times.end(), u);
  });
}

ctp_status ctp_oracle_write(const ctp_oracle* oracle, const char* dir, const char* stem, uint64_t config_hash) {
  return guard([&] {
    need(oracle, "oracle");
    need(dir, "dir");
    need(stem, "stem");
    ctp::write_oracle(oracle->s, dir, stem, config_hash);
  });
}

ctp_status ctp_compare(const ctp_prediction* p, const ctp_oracle* oracle, double tolerance, ctp_comparison* out) {
  return guard([&] {
    need(p, "prediction");
    need(oracle, "oracle");
    need(out, "out");
    const auto c = ctp::compare(p->r, oracle->s, tolerance);
    out->sigma2_formula = c.sigma2_formula;
    out->sigma2_oracle = c.sigma2_oracle;
    out->absolute_gap = c.absolute_gap;
    out->relative_gap = c.relative_gap;
    out->tolerance = c.tolerance;
    out->consistent = c.consistent;
  });
}

void ctp_oracle_free(ctp_oracle* oracle) { delete oracle; }

}  // extern "C"
