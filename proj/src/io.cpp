#include "ctp/io.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ctp/error.hpp"
#include "json.hpp"

namespace ctp {

namespace {

using nlohmann::ordered_json;

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::ofstream open(const std::string& file) {
  const auto parent = std::filesystem::path(file).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write '" + file + "'");
  return out;
}

std::string num(double v) {
  // Shortest representation that round-trips.
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void row(std::ofstream& out, double a, cplx v) {
  out << num(a) << ',' << num(v.real()) << ',' << num(v.imag()) << '\n';
}

ordered_json meta(std::uint64_t hash) {
  return {{"tool", "ctpredict"}, {"version", kVersion}, {"config_hash", hex(hash)}};
}

void dump(const ordered_json& j, const std::string& file) {
  auto out = open(file);
  out << j.dump(2) << '\n';
  if (!out) throw Error(Errc::Io, "write failed for '" + file + "'");
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

std::string csv_header(std::uint64_t config_hash) {
  return std::string("# ctpredict ") + kVersion + " config=" + hex(config_hash);
}

void write_factor(const SzegoFactor& factor, const std::string& dir, std::uint64_t hash) {
  {
    auto out = open(join(dir, "factor_freq.csv"));
    out << csv_header(hash) << "\nmu,re_c,im_c\n";
    const auto& g = factor.frequency_grid();
    const long K = g.half_count();
    for (long j = -K; j <= K; ++j) row(out, g.node(j), factor.c_at(j));
  }
  auto out = open(join(dir, "factor_time.csv"));
  out << csv_header(hash) << "\ns,re_cstar,im_cstar\n";
  const auto k = factor.kernel();
  const long Lc = factor.extent_count();
  for (long q = 0; q <= Lc; ++q)
    row(out, -static_cast<double>(Lc - q) * factor.step(), k[static_cast<std::size_t>(q)]);
}

void write_factor_diagnostics(const FactorDiagnostics& d, const std::string& path, std::uint64_t hash) {
  ordered_json j;
  j["_meta"] = meta(hash);
  j["leak_energy"] = d.leak_energy;
  j["plancherel_gap"] = d.plancherel_gap;
  j["log_integral_gap"] = d.log_integral_gap;
  j["modulus_error"] = d.modulus_error;
  j["tail_level"] = d.tail_level;
  j["truncated_energy"] = d.truncated_energy;
  ordered_json checks = ordered_json::array();
  for (const auto& c : d.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  j["checks"] = checks;
  j["all_pass"] = d.all_pass();
  dump(j, path);
}

void write_prediction(const PredictionReport& r, const SzegoFactor& factor, const std::string& dir,
                      const std::string& stem, std::uint64_t hash) {
  const std::string kernel_csv = stem + "_kernel.csv";
  {
    auto out = open(join(dir, kernel_csv));
    out << csv_header(hash) << "\ns,re,im\n";
    for (std::size_t i = 0; i < r.kernel.size(); ++i)
      row(out, -static_cast<double>(r.first_lag + static_cast<long>(i)) * r.step, r.kernel[i]);
  }
  ordered_json j;
  j["_meta"] = meta(hash);
  j["tau"] = r.spec.tau;
  if (r.spec.finite()) j["T"] = *r.spec.half_length;
  j["sigma2"] = r.sigma2;
  j["sigma2_riemann"] = r.sigma2_riemann;
  j["kernel_csv_path"] = kernel_csv;
  if (r.psi) {
    const std::string psi_csv = stem + "_psi.csv";
    auto out = open(join(dir, psi_csv));
    out << csv_header(hash) << "\nmu,re_psi,im_psi,masked\n";
    const auto& g = factor.frequency_grid();
    const long K = g.half_count();
    for (long q = -K; q <= K; ++q) {
      const auto i = static_cast<std::size_t>(q + K);
      out << num(g.node(q)) << ',';
      if (r.psi->masked[i])
        out << "nan,nan,1\n";
      else
        out << num(r.psi->psi[i].real()) << ',' << num(r.psi->psi[i].imag()) << ",0\n";
    }
    j["psi_csv_path"] = psi_csv;
    j["masked_fraction"] = r.psi->masked_fraction;
    j["residual_gap"] = r.psi->residual_gap;
    j["sigma2_spectral"] = r.psi->sigma2_spectral;
  } else {
    j["psi_csv_path"] = nullptr;
    j["masked_fraction"] = 0.0;
  }
  dump(j, join(dir, stem + ".json"));
}

void write_path(const SamplePath& path, const std::string& file, std::uint64_t hash) {
  auto out = open(file);
  out << csv_header(hash) << "\nt,re,im\n";
  for (std::size_t k = 0; k < path.values.size(); ++k)
    row(out, path.time(static_cast<long>(k)), path.values[k]);
}

void write_mc_report(const McReport& r, const std::string& file, std::uint64_t hash) {
  ordered_json j;
  j["_meta"] = meta(hash);
  j["tau"] = r.spec.tau;
  if (r.spec.finite()) j["T"] = *r.spec.half_length;
  j["n"] = r.n;
  j["mse"] = r.mse;
  j["stderr"] = r.std_error;
  j["theory"] = r.theory;
  j["z"] = r.z;
  j["underpowered"] = r.underpowered;
  j["seed"] = r.seed;
  j["pythagoras"] = {{"mean_signal", r.mean_signal},
                     {"mean_prediction", r.mean_prediction},
                     {"gap", r.pythagoras_gap},
                     {"stderr", r.pythagoras_std_error},
                     {"z", r.pythagoras_z}};
  ordered_json orth = ordered_json::array();
  for (const auto& c : r.orthogonality)
    orth.push_back({{"lag", c.lag},
                    {"re", c.mean.real()},
                    {"im", c.mean.imag()},
                    {"stderr", c.std_error},
                    {"z", c.z},
                    {"correlation", c.correlation}});
  j["orthogonality"] = orth;
  dump(j, file);
}

void write_oracle(const OracleSolution& s, const std::string& dir, const std::string& stem,
                  std::uint64_t hash) {
  {
    auto out = open(join(dir, stem + ".csv"));
    out << csv_header(hash) << "\nu,re_w,im_w\n";
    for (std::size_t k = 0; k < s.weights.size(); ++k) row(out, s.times[k], s.weights[k]);
  }
  ordered_json j;
  j["_meta"] = meta(hash);
  j["tau"] = s.spec.tau;
  if (s.spec.finite()) j["T"] = *s.spec.half_length;
  j["sigma2"] = s.error_variance;
  j["cond"] = s.condition;
  j["jitter"] = s.jitter;
  j["method"] = s.method;
  j["jitter_trace"] = s.jitter_trace;
  dump(j, join(dir, stem + ".json"));
}

}  // namespace ctp
