#include "ctp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctp/error.hpp"
#include "numerics.hpp"

namespace ctp {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  auto [p, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || p != end || t.empty())
    throw Error(Errc::Config, "config key '" + key + "': expected a number, got '" + t + "'");
  if (!std::isfinite(v)) throw Error(Errc::Config, "config key '" + key + "': value is not finite");
  return v;
}

double positive(const Config& c, const std::string& key, double fallback) {
  const double v = c.get_double(key, fallback);
  if (!(v > 0.0)) throw Error(Errc::Config, "config key '" + key + "' must be positive");
  return v;
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "family", "params", "density.csv", "mode", "floor",
      "grid.M", "grid.dmu", "time.h", "time.L",
      "regularity.divergence_threshold", "regularity.max_subfloor_fraction",
      "tol.modulus", "tol.support", "tol.plancherel", "tol.tail", "tol.log_integral",
      "tol.compare", "tol.z",
      "predict.tau", "predict.T", "predict.whole_past", "predict.oracle", "predict.psi",
      "oracle.h", "oracle.window", "oracle.covariance",
      "sim.N", "sim.seed", "sim.length", "sim.method", "sim.threads",
      "verify.theory_override"};
  return keys;
}

Config Config::parse(std::string_view text, std::string base_dir) {
  Config c;
  c.base_dir_ = std::move(base_dir);
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::Config, "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw Error(Errc::Config, "config line " + std::to_string(lineno) + ": empty key");
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw Error(Errc::Config, "config key '" + key + "' is not recognized (line " + std::to_string(lineno) + ")");
    if (c.values_.count(key))
      throw Error(Errc::Config, "config key '" + key + "' given twice");
    c.values_[key] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse(buf.str(), dir.empty() ? "." : dir);
}

std::optional<std::string> Config::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void Config::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    throw Error(Errc::Config, "config key '" + key + "' is not recognized");
  values_[key] = trim(value);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return raw(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
  auto v = raw(key);
  return v ? parse_double(key, *v) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto v = raw(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const auto* end = v->data() + v->size();
  auto [p, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || p != end || v->empty())
    throw Error(Errc::Config, "config key '" + key + "': expected a non-negative integer, got '" + *v + "'");
  return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto v = raw(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw Error(Errc::Config, "config key '" + key + "': expected true or false, got '" + *v + "'");
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::vector<double> out;
  auto v = raw(key);
  if (!v) return out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

std::string Config::canonical() const {
  std::string s;
  for (const auto& [k, v] : values_) s += k + " = " + v + "\n";
  return s;
}

std::uint64_t Config::hash() const { return detail::fnv1a(canonical()); }

RunSettings RunSettings::from(const Config& c) {
  RunSettings s;
  s.grid.cutoff = positive(c, "grid.M", s.grid.cutoff);
  s.grid.spacing = positive(c, "grid.dmu", s.grid.spacing);
  s.time.step = positive(c, "time.h", s.time.step);
  s.time.extent = positive(c, "time.L", s.time.extent);

  const std::string mode = c.get_string("mode", "complex");
  if (mode != "complex" && mode != "real")
    throw Error(Errc::Config, "config key 'mode' must be complex or real");
  s.real_mode = mode == "real";

  s.regularity.floor = positive(c, "floor", s.regularity.floor);
  s.regularity.divergence_threshold =
      c.get_double("regularity.divergence_threshold", s.regularity.divergence_threshold);
  s.regularity.max_subfloor_fraction =
      c.get_double("regularity.max_subfloor_fraction", s.regularity.max_subfloor_fraction);
  s.tolerances.modulus = positive(c, "tol.modulus", s.tolerances.modulus);
  s.tolerances.support = positive(c, "tol.support", s.tolerances.support);
  s.tolerances.plancherel = positive(c, "tol.plancherel", s.tolerances.plancherel);
  s.tolerances.tail = positive(c, "tol.tail", s.tolerances.tail);
  s.tolerances.log_integral = positive(c, "tol.log_integral", s.tolerances.log_integral);
  s.compare_tolerance = positive(c, "tol.compare", s.compare_tolerance);
  s.z_threshold = positive(c, "tol.z", s.z_threshold);

  const bool has_family = c.has("family"), has_csv = c.has("density.csv");
  if (has_family == has_csv)
    throw Error(Errc::Config, "config needs exactly one of 'family' or 'density.csv'");
  if (has_family) {
    try {
      s.family = parse_family(c.get_string("family", ""));
    } catch (const Error& e) {
      throw Error(Errc::Config, "config key 'family': " + std::string(e.what()));
    }
    s.params = c.get_list("params");
  } else {
    std::filesystem::path p = c.get_string("density.csv", "");
    if (p.is_relative()) p = std::filesystem::path(c.base_dir()) / p;
    if (!std::filesystem::exists(p))
      throw Error(Errc::Config, "config key 'density.csv': file '" + p.string() + "' not found");
    s.density_csv = p.string();
  }

  s.taus = c.get_list("predict.tau");
  s.half_lengths = c.get_list("predict.T");
  for (double t : s.taus)
    if (!(t > 0.0)) throw Error(Errc::Config, "config key 'predict.tau': lags must be positive");
  for (double t : s.half_lengths)
    if (!(t > 0.0)) throw Error(Errc::Config, "config key 'predict.T': half-lengths must be positive");
  s.whole_past = c.get_bool("predict.whole_past", true);
  s.oracle = c.get_bool("predict.oracle", false);
  s.write_psi = c.get_bool("predict.psi", true);
  s.oracle_step = positive(c, "oracle.h", s.oracle_step);
  s.oracle_window = positive(c, "oracle.window", s.oracle_window);
  s.oracle_covariance = c.get_string("oracle.covariance", s.oracle_covariance);
  if (s.oracle_covariance != "auto" && s.oracle_covariance != "closed_form" &&
      s.oracle_covariance != "quadrature")
    throw Error(Errc::Config, "config key 'oracle.covariance' must be auto, closed_form or quadrature");

  s.sim_replicates = static_cast<std::size_t>(c.get_u64("sim.N", s.sim_replicates));
  if (s.sim_replicates < 2) throw Error(Errc::Config, "config key 'sim.N' must be at least 2");
  if (c.has("sim.seed")) s.sim_seed = c.get_u64("sim.seed", 0);
  s.sim_length = static_cast<std::size_t>(c.get_u64("sim.length", s.sim_length));
  if (s.sim_length < 2) throw Error(Errc::Config, "config key 'sim.length' must be at least 2");
  s.sim_method = c.get_string("sim.method", s.sim_method);
  if (s.sim_method != "ma" && s.sim_method != "spectral")
    throw Error(Errc::Config, "config key 'sim.method' must be ma or spectral");
  s.sim_threads = static_cast<unsigned>(c.get_u64("sim.threads", 0));
  if (c.has("verify.theory_override")) s.theory_override = c.get_double("verify.theory_override", 0.0);
  return s;
}

SpectralModel read_density_csv(const std::string& path, bool real_mode, double floor) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read density file '" + path + "'");
  std::vector<double> mu, g;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!std::isdigit(static_cast<unsigned char>(t[0])) && t[0] != '-' && t[0] != '+' && t[0] != '.')
      continue;  // header row
    const auto comma = t.find(',');
    if (comma == std::string::npos)
      throw Error(Errc::Validation, path + ":" + std::to_string(lineno) + ": expected mu,density");
    mu.push_back(parse_double("density.csv", t.substr(0, comma)));
    g.push_back(parse_double("density.csv", t.substr(comma + 1)));
  }
  if (mu.size() < 5 || mu.size() % 2 == 0)
    throw Error(Errc::Validation, path + ": need an odd number (>= 5) of samples on a symmetric grid");
  const double dmu = (mu.back() - mu.front()) / static_cast<double>(mu.size() - 1);
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double expect = mu.front() + static_cast<double>(k) * dmu;
    if (std::abs(mu[k] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      throw Error(Errc::Validation, path + ": frequency grid is not uniform");
  }
  if (std::abs(mu.front() + mu.back()) > 1e-9 * mu.back())
    throw Error(Errc::Validation, path + ": frequency grid is not symmetric about 0");
  FrequencyGrid grid{mu.back(), dmu};
  return SpectralModel::sampled(grid, std::move(g), real_mode, floor);
}

SpectralModel build_model(const RunSettings& s) {
  if (s.family) return SpectralModel::closed_form(*s.family, s.params, s.grid, s.real_mode, s.regularity.floor);
  return read_density_csv(s.density_csv, s.real_mode, s.regularity.floor);
}

CovarianceFunction build_covariance(const RunSettings& s, const SpectralModel& model) {
  const bool closed = s.oracle_covariance == "closed_form" ||
                      (s.oracle_covariance == "auto" && model.has_closed_form_covariance());
  if (closed) {
    if (!model.has_closed_form_covariance())
      throw Error(Errc::Config, "config key 'oracle.covariance': model has no closed-form covariance");
    return CovarianceFunction::closed_form(model);
  }
  return CovarianceFunction::from_model(model);
}

}  // namespace ctp
