#pragma once

#include <cstdint>
#include <string>

#include "ctp/oracle.hpp"
#include "ctp/predictor.hpp"
#include "ctp/simulate.hpp"
#include "ctp/szego.hpp"

namespace ctp {

inline constexpr const char* kVersion = "0.1.0";

/// First line of every CSV the tool writes.
std::string csv_header(std::uint64_t config_hash);

/// factor_freq.csv (mu,re_c,im_c) and factor_time.csv (s,re_cstar,im_cstar) on [-L, 0].
void write_factor(const SzegoFactor& factor, const std::string& dir, std::uint64_t config_hash);
void write_factor_diagnostics(const FactorDiagnostics& diag, const std::string& path,
                              std::uint64_t config_hash);

/// <stem>.json plus <stem>_kernel.csv and, when present, <stem>_psi.csv.
/// Kernel rows are (s,re,im) with s the right end of the innovation cell.
void write_prediction(const PredictionReport& report, const SzegoFactor& factor,
                      const std::string& dir, const std::string& stem, std::uint64_t config_hash);

void write_path(const SamplePath& path, const std::string& file, std::uint64_t config_hash);
void write_mc_report(const McReport& report, const std::string& file, std::uint64_t config_hash);
/// <stem>.csv (u,re_w,im_w) and <stem>.json (sigma2, cond, jitter, trace).
void write_oracle(const OracleSolution& sol, const std::string& dir, const std::string& stem,
                  std::uint64_t config_hash);

}  // namespace ctp
