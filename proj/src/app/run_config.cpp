#include "app/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "qnd/errors.hpp"

namespace qndsim {

using qnd::ConfigError;

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double to_double(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v))
    throw ConfigError(std::string(key) + ": expected a number, got '" + t + "'");
  return v;
}

int to_int(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  int v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(std::string(key) + ": expected an integer, got '" + t + "'");
  return v;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* kTargets[] = {"exponential", "algebraic", "modulated_algebraic", "tabulated"};

}  // namespace

std::vector<std::string> preset_names() { return {"paper-a", "paper-b", "paper-critical"}; }

RunConfig preset(std::string_view name) {
  RunConfig cfg;
  if (name == "paper-a") {
    cfg.target = "exponential";
    cfg.correlation_length = 5.0;
  } else if (name == "paper-b") {
    cfg.target = "algebraic";
    cfg.exponent = 0.7;
  } else if (name == "paper-critical") {
    cfg.target = "modulated_algebraic";
    cfg.exponent = 0.7;
    cfg.period = 3;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected paper-a, paper-b or paper-critical)");
  }
  return cfg;
}

double parse_depth(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "inf" || t == "infinity") return qnd::kInfiniteDepth;
  const double d = to_double("optical_depth", t);
  if (!(d > 0.0)) throw ConfigError("optical_depth must be positive or inf (got " + t + ")");
  return d;
}

std::string depth_label(double d) { return std::isfinite(d) ? num(d) : "inf"; }

void apply_key(RunConfig& cfg, std::string_view key_in, std::string_view value) {
  const std::string key = trim(key_in);
  const std::string v = trim(value);
  if (key == "n_sites") cfg.ensemble.n_sites = to_int(key, v);
  else if (key == "atoms_per_site") cfg.ensemble.atoms_per_site = to_int(key, v);
  else if (key == "spin") cfg.ensemble.spin = to_double(key, v);
  else if (key == "optical_depth") cfg.ensemble.optical_depth = parse_depth(v);
  else if (key == "target") {
    if (std::find(std::begin(kTargets), std::end(kTargets), v) == std::end(kTargets))
      throw ConfigError("target: unknown shape '" + v + "'");
    cfg.target = v;
  } else if (key == "correlation_length") cfg.correlation_length = to_double(key, v);
  else if (key == "exponent") cfg.exponent = to_double(key, v);
  else if (key == "period") cfg.period = to_int(key, v);
  else if (key == "target_file") cfg.target_file = v;
  else if (key == "c_max") cfg.c_max = to_double(key, v);
  else if (key == "order_policy") cfg.order = qnd::parse_order_policy(v);
  else if (key == "witness_m") cfg.witness.single_bins = to_int(key, v);
  else if (key == "witness_n") cfg.witness.chain_bins = to_int(key, v);
  else if (key == "witness_origin") cfg.witness.origin = to_int(key, v);
  else if (key == "witness_dr_min") cfg.witness.delta_r_min = to_int(key, v);
  else if (key == "witness_dr_max") cfg.witness.delta_r_max = to_int(key, v);
  else if (key == "witness_phi_points") cfg.witness.phi_points = to_int(key, v);
  else if (key == "fit_first") cfg.fit_first = to_int(key, v);
  else if (key == "fit_last") cfg.fit_last = to_int(key, v);
  else if (key == "output_dir") cfg.output_dir = v;
  else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(std::istream& in, RunConfig cfg, const std::filesystem::path& base_dir) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_key(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!cfg.target_file.empty() && cfg.target_file.is_relative() && !base_dir.empty())
    cfg.target_file = base_dir / cfg.target_file;
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, std::move(base), path.parent_path());
}

std::string canonical_text(const RunConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["n_sites"] = std::to_string(cfg.ensemble.n_sites);
  kv["atoms_per_site"] = std::to_string(cfg.ensemble.atoms_per_site);
  kv["spin"] = num(cfg.ensemble.spin);
  kv["optical_depth"] = depth_label(cfg.ensemble.optical_depth);
  kv["target"] = cfg.target;
  if (cfg.target == "exponential") kv["correlation_length"] = num(cfg.correlation_length);
  if (cfg.target == "algebraic" || cfg.target == "modulated_algebraic") kv["exponent"] = num(cfg.exponent);
  if (cfg.target == "modulated_algebraic") kv["period"] = std::to_string(cfg.period);
  if (cfg.target == "tabulated") kv["target_file"] = cfg.target_file.generic_string();
  kv["c_max"] = num(cfg.c_max);
  kv["order_policy"] = std::string(qnd::to_string(cfg.order));
  kv["witness_m"] = std::to_string(cfg.witness.single_bins);
  kv["witness_n"] = std::to_string(cfg.witness.chain_bins);
  kv["witness_origin"] = std::to_string(cfg.witness.origin);
  kv["witness_dr_min"] = std::to_string(cfg.witness.delta_r_min);
  kv["witness_dr_max"] = std::to_string(cfg.witness.delta_r_max);
  kv["witness_phi_points"] = std::to_string(cfg.witness.phi_points);
  kv["fit_first"] = std::to_string(cfg.fit_first);
  kv["fit_last"] = std::to_string(cfg.fit_last);
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
  return out.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical_text(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

qnd::TargetSpec target_spec(const RunConfig& cfg) {
  qnd::TargetSpec spec;
  spec.c_max = cfg.c_max;
  if (cfg.target == "exponential") spec.shape = qnd::ExponentialDecay{cfg.correlation_length};
  else if (cfg.target == "algebraic") spec.shape = qnd::AlgebraicDecay{cfg.exponent};
  else if (cfg.target == "modulated_algebraic") spec.shape = qnd::ModulatedAlgebraicDecay{cfg.exponent, cfg.period};
  else if (cfg.target == "tabulated") {
    if (cfg.target_file.empty()) throw ConfigError("tabulated target needs target_file");
    spec.shape = qnd::read_tabulated_target(cfg.target_file);
  } else {
    throw ConfigError("target: unknown shape '" + cfg.target + "'");
  }
  return spec;
}

qnd::DecayLaw fit_law(const RunConfig& cfg) {
  return cfg.target == "exponential" ? qnd::DecayLaw::exponential : qnd::DecayLaw::algebraic;
}

qnd::FitRange fit_range(const RunConfig& cfg, const qnd::TargetSpec& spec) {
  qnd::FitRange r = qnd::default_fit_range(spec, cfg.ensemble.n_sites);
  if (cfg.fit_first > 0) r.first = cfg.fit_first;
  if (cfg.fit_last > 0) r.last = cfg.fit_last;
  return r;
}

void validate(const RunConfig& cfg) {
  qnd::validate(cfg.ensemble);
  const qnd::TargetSpec spec = target_spec(cfg);
  qnd::validate(spec, cfg.ensemble.n_sites);

  const int half = cfg.ensemble.n_sites / 2;
  const qnd::FitRange r = fit_range(cfg, spec);
  if (r.first < 1 || r.last > half || r.last - r.first + 1 < 4)
    throw ConfigError("fit window [" + std::to_string(r.first) + ", " + std::to_string(r.last) +
                      "] must lie in [1, " + std::to_string(half) + "] with at least 4 points");

  const auto& w = cfg.witness;
  if (w.single_bins < 1 || w.chain_bins < 1) throw ConfigError("witness_m and witness_n must be positive");
  if (w.phi_points < 1) throw ConfigError("witness_phi_points must be positive");
  if (w.origin < 0) throw ConfigError("witness_origin must be >= 0");
  if (w.delta_r_min < 1) throw ConfigError("witness_dr_min must be >= 1");
  const int largest = cfg.ensemble.n_sites - w.chain_bins - w.origin - w.single_bins + 1;
  if (largest < w.delta_r_min || w.delta_r_max > largest || (w.delta_r_max >= 0 && w.delta_r_max < w.delta_r_min))
    throw ConfigError("witness geometry does not fit the lattice (largest separation " + std::to_string(largest) +
                      ")");
}

}  // namespace qndsim
