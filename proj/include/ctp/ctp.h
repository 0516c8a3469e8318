#ifndef CTP_CTP_H
#define CTP_CTP_H

/* C interface to the continuous-time prediction engine.
 *
 * Every object is an opaque handle released with its _free function.
 * Functions returning ctp_status leave a message in ctp_last_error() on
 * failure (per thread). Output arrays are caller-allocated; the _count
 * functions give the required length. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CTP_API __declspec(dllexport)
#else
#define CTP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ctp_status {
  CTP_OK = 0,
  CTP_E_CONFIG = 1,
  CTP_E_VALIDATION = 2,
  CTP_E_REGULARITY = 3,
  CTP_E_FACTORIZATION = 4,
  CTP_E_DOMAIN = 5,
  CTP_E_DEGENERATE = 6,
  CTP_E_INSUFFICIENT_DATA = 7,
  CTP_E_WINDOW = 8,
  CTP_E_ILL_CONDITIONED = 9,
  CTP_E_USAGE = 10,
  CTP_E_TRUNCATION = 11,
  CTP_E_IO = 12,
  CTP_E_INTERNAL = 13
} ctp_status;

typedef struct ctp_config ctp_config;
typedef struct ctp_model ctp_model;
typedef struct ctp_factor ctp_factor;
typedef struct ctp_prediction ctp_prediction;
typedef struct ctp_path ctp_path;
typedef struct ctp_innovations ctp_innovations;
typedef struct ctp_oracle ctp_oracle;
typedef struct ctp_mc ctp_mc;

CTP_API const char* ctp_version(void);
CTP_API const char* ctp_last_error(void);
CTP_API const char* ctp_status_name(ctp_status status);

/* ---- configuration ---------------------------------------------------- */

CTP_API ctp_status ctp_config_load(const char* path, ctp_config** out);
CTP_API ctp_status ctp_config_parse(const char* text, ctp_config** out);
CTP_API ctp_status ctp_config_set(ctp_config* cfg, const char* key, const char* value);
/* Checks every value; fails with CTP_E_CONFIG naming the offending key. */
CTP_API ctp_status ctp_config_validate(const ctp_config* cfg);
CTP_API uint64_t ctp_config_hash(const ctp_config* cfg);
/* Effective numeric value of a key (defaults applied). Booleans read as 0/1,
 * mode as 1 for real. An unset key without a default gives CTP_E_CONFIG. */
CTP_API ctp_status ctp_config_number(const ctp_config* cfg, const char* key, double* out);
CTP_API ctp_status ctp_config_u64(const ctp_config* cfg, const char* key, uint64_t* out);
/* List value (predict.tau, predict.T); *count receives the list length. */
CTP_API ctp_status ctp_config_list(const ctp_config* cfg, const char* key, double* out,
                                   size_t capacity, size_t* count);
/* Effective string value; *needed receives the length without terminator. */
CTP_API ctp_status ctp_config_string(const ctp_config* cfg, const char* key, char* out,
                                     size_t capacity, size_t* needed);
CTP_API void ctp_config_free(ctp_config* cfg);

/* ---- spectral model --------------------------------------------------- */

typedef struct ctp_regularity {
  int regular;               /* 1 regular, 0 deterministic */
  double szego_value;        /* -inf when deterministic */
  double floored_value;
  double subfloor_fraction;
} ctp_regularity;

CTP_API ctp_status ctp_model_from_config(const ctp_config* cfg, ctp_model** out);
CTP_API ctp_status ctp_model_closed_form(const char* family, const double* params, size_t n_params,
                                         double cutoff, double spacing, int real_mode,
                                         ctp_model** out);
/* density holds 2K+1 samples on mu_j = j*spacing, j = -K..K, K = cutoff/spacing. */
CTP_API ctp_status ctp_model_sampled(const double* density, size_t n, double cutoff,
                                     double spacing, int real_mode, ctp_model** out);
CTP_API double ctp_model_total_mass(const ctp_model* model);
CTP_API ctp_status ctp_model_covariance(const ctp_model* model, double t, double* re, double* im);
/* cfg may be NULL for the default regularity settings. */
CTP_API ctp_status ctp_model_szego(const ctp_model* model, const ctp_config* cfg,
                                   ctp_regularity* out);
CTP_API void ctp_model_free(ctp_model* model);

/* ---- factor ----------------------------------------------------------- */

typedef struct ctp_factor_diagnostics {
  double leak_energy;
  double plancherel_gap;
  double log_integral_gap;
  double modulus_error;
  double tail_level;
  double truncated_energy;
  int all_pass;
} ctp_factor_diagnostics;

/* Time grid and tolerances come from cfg (NULL: defaults). */
CTP_API ctp_status ctp_factorize(const ctp_model* model, const ctp_config* cfg, ctp_factor** out);
CTP_API ctp_status ctp_factor_verify(const ctp_factor* factor, const ctp_model* model,
                                     const ctp_config* cfg, ctp_factor_diagnostics* out);
CTP_API double ctp_factor_step(const ctp_factor* factor);
CTP_API size_t ctp_factor_frequency_count(const ctp_factor* factor);
CTP_API ctp_status ctp_factor_c(const ctp_factor* factor, double* re, double* im, size_t n);
/* Kernel samples on [-L, 0]; the last one is c*(0-). */
CTP_API size_t ctp_factor_kernel_count(const ctp_factor* factor);
CTP_API ctp_status ctp_factor_kernel(const ctp_factor* factor, double* re, double* im, size_t n);
CTP_API ctp_status ctp_factor_write(const ctp_factor* factor, const ctp_model* model,
                                    const ctp_config* cfg, const char* dir, uint64_t config_hash);
CTP_API void ctp_factor_free(ctp_factor* factor);

/* ---- prediction ------------------------------------------------------- */

CTP_API ctp_status ctp_predict_whole_past(const ctp_factor* factor, double tau, int with_psi,
                                          ctp_prediction** out);
CTP_API ctp_status ctp_predict_finite_section(const ctp_factor* factor, double tau,
                                              double half_length, ctp_prediction** out);
CTP_API double ctp_prediction_tau(const ctp_prediction* p);
/* 0 for a whole-past prediction. */
CTP_API double ctp_prediction_half_length(const ctp_prediction* p);
CTP_API double ctp_prediction_sigma2(const ctp_prediction* p);
CTP_API double ctp_prediction_masked_fraction(const ctp_prediction* p);
CTP_API size_t ctp_prediction_kernel_count(const ctp_prediction* p);
CTP_API ctp_status ctp_prediction_kernel(const ctp_prediction* p, double* re, double* im, size_t n);
/* 0 when the prediction function was not requested. */
CTP_API size_t ctp_prediction_psi_count(const ctp_prediction* p);
/* masked[i] = 1 marks samples excluded by the floor (re, im set to NaN). */
CTP_API ctp_status ctp_prediction_psi(const ctp_prediction* p, double* re, double* im,
                                      unsigned char* masked, size_t n);
CTP_API ctp_status ctp_prediction_write(const ctp_prediction* p, const ctp_factor* factor,
                                        const char* dir, const char* stem, uint64_t config_hash);
CTP_API void ctp_prediction_free(ctp_prediction* p);

/* ---- simulation ------------------------------------------------------- */

CTP_API ctp_status ctp_simulate_ma(const ctp_factor* factor, size_t n_points, double h,
                                   uint64_t seed, int real_mode, int keep_noise, ctp_path** out);
CTP_API ctp_status ctp_simulate_spectral(const ctp_model* model, size_t n_points, double h,
                                         uint64_t seed, int real_mode, ctp_path** out);
CTP_API size_t ctp_path_length(const ctp_path* path);
CTP_API ctp_status ctp_path_values(const ctp_path* path, double* re, double* im, size_t n);
CTP_API size_t ctp_path_warning_count(const ctp_path* path);
CTP_API const char* ctp_path_warning(const ctp_path* path, size_t i);
CTP_API ctp_status ctp_path_write(const ctp_path* path, const char* file, uint64_t config_hash);
CTP_API void ctp_path_free(ctp_path* path);

CTP_API ctp_status ctp_whiten(const ctp_path* path, const ctp_factor* factor, ctp_innovations** out);
CTP_API ctp_status ctp_innovations_from_noise(const ctp_path* path, ctp_innovations** out);
CTP_API size_t ctp_innovations_count(const ctp_innovations* innov);
/* Path index of the cell ending at the first increment. */
CTP_API long ctp_innovations_first_index(const ctp_innovations* innov);
CTP_API ctp_status ctp_innovations_values(const ctp_innovations* innov, double* re, double* im,
                                          size_t n);
CTP_API ctp_status ctp_apply_predictor(const ctp_innovations* innov, const ctp_prediction* p,
                                       double t, double* re, double* im);
CTP_API void ctp_innovations_free(ctp_innovations* innov);

typedef struct ctp_mc_summary {
  size_t n;
  double mse;
  double std_error;
  double theory;
  double z;
  double pythagoras_gap;
  double pythagoras_z;
  double max_orthogonality_z; /* 0 for finite sections */
  int underpowered;
} ctp_mc_summary;

/* half_length <= 0 selects the whole past. theory_override is used when
 * finite. threads = 0 uses every core. */
CTP_API ctp_status ctp_monte_carlo(const ctp_factor* factor, double tau, double half_length,
                                   size_t replicates, uint64_t seed, unsigned threads,
                                   double theory_override, int real_mode, ctp_mc** out);
CTP_API ctp_status ctp_mc_summary_get(const ctp_mc* mc, ctp_mc_summary* out);
CTP_API ctp_status ctp_mc_write(const ctp_mc* mc, const char* file, uint64_t config_hash);
CTP_API void ctp_mc_free(ctp_mc* mc);

/* ---- oracle ----------------------------------------------------------- */

typedef struct ctp_comparison {
  double sigma2_formula;
  double sigma2_oracle;
  double absolute_gap;
  double relative_gap;
  double tolerance;
  int consistent; /* 0: divergent */
} ctp_comparison;

/* Uniform observation grid: [-window, 0] for the whole past (half_length <= 0)
 * or [-2T, 0] for a finite section. Covariance choice from cfg (NULL: closed
 * form when available). */
CTP_API ctp_status ctp_oracle_solve(const ctp_model* model, const ctp_config* cfg, double tau,
                                    double half_length, double h, double window, ctp_oracle** out);
CTP_API double ctp_oracle_sigma2(const ctp_oracle* oracle);
CTP_API double ctp_oracle_condition(const ctp_oracle* oracle);
CTP_API double ctp_oracle_jitter(const ctp_oracle* oracle);
CTP_API size_t ctp_oracle_count(const ctp_oracle* oracle);
CTP_API ctp_status ctp_oracle_weights(const ctp_oracle* oracle, double* u, double* re, double* im,
                                      size_t n);
CTP_API ctp_status ctp_oracle_write(const ctp_oracle* oracle, const char* dir, const char* stem,
                                    uint64_t config_hash);
CTP_API ctp_status ctp_compare(const ctp_prediction* p, const ctp_oracle* oracle, double tolerance,
                               ctp_comparison* out);
CTP_API void ctp_oracle_free(ctp_oracle* oracle);

#ifdef __cplusplus
}
#endif

#endif
