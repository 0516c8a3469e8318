#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctp/oracle.hpp"
#include "ctp/spectral_model.hpp"
#include "ctp/szego.hpp"

namespace ctp {

/// Flat key-value configuration. One `key = value` per line, dotted keys,
/// `#` starts a comment, lists are comma separated.
class Config {
 public:
  static Config parse(std::string_view text, std::string base_dir = ".");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> raw(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
  void erase(const std::string& key) { values_.erase(key); }
  const std::map<std::string, std::string>& values() const { return values_; }
  const std::string& base_dir() const { return base_dir_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;

  /// Sorted `key = value` lines; the hash is FNV-1a of this text.
  std::string canonical() const;
  std::uint64_t hash() const;

 private:
  std::map<std::string, std::string> values_;
  std::string base_dir_ = ".";
};

/// Every key the engine understands.
const std::vector<std::string>& known_keys();

/// Typed view of a Config; construction validates values and names the
/// offending key in errors.
struct RunSettings {
  FrequencyGrid grid;
  TimeGrid time;
  bool real_mode = false;
  RegularityConfig regularity;
  FactorTolerances tolerances;

  std::optional<Family> family;
  std::vector<double> params;
  std::string density_csv;  // resolved path

  std::vector<double> taus;
  std::vector<double> half_lengths;
  bool whole_past = true;
  bool oracle = false;
  bool write_psi = true;
  double oracle_step = 0.01;
  double oracle_window = 20.0;
  std::string oracle_covariance = "auto";  // auto | closed_form | quadrature
  double compare_tolerance = 1e-3;

  std::size_t sim_replicates = 10000;
  std::optional<std::uint64_t> sim_seed;
  std::size_t sim_length = 65536;
  std::string sim_method = "ma";  // ma | spectral
  unsigned sim_threads = 0;
  std::optional<double> theory_override;
  double z_threshold = 3.0;

  static RunSettings from(const Config& config);
};

SpectralModel build_model(const RunSettings& settings);
/// Covariance for the oracle: the closed form when the family has one (or
/// when requested), otherwise quadrature of the model density.
CovarianceFunction build_covariance(const RunSettings& settings, const SpectralModel& model);

/// Density samples from a CSV with columns mu,density on a symmetric uniform grid.
SpectralModel read_density_csv(const std::string& path, bool real_mode, double floor);

}  // namespace ctp
