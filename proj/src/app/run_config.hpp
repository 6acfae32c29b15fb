// Flat key = value run configuration, presets and the config hash.

#ifndef QNDSIM_RUN_CONFIG_HPP
#define QNDSIM_RUN_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qnd/analysis.hpp"
#include "qnd/designer.hpp"
#include "qnd/lattice.hpp"
#include "qnd/protocol.hpp"
#include "qnd/witness.hpp"

namespace qndsim {

struct RunConfig {
  qnd::EnsembleConfig ensemble;

  std::string target = "exponential";  // exponential | algebraic | modulated_algebraic | tabulated
  double correlation_length = 5.0;
  double exponent = 0.7;
  int period = 3;
  std::filesystem::path target_file;
  double c_max = 0.95;

  qnd::OrderPolicy order = qnd::OrderPolicy::ascending_p;
  qnd::WitnessScanOptions witness;

  // 0 selects the default window for the target shape
  int fit_first = 0;
  int fit_last = 0;

  std::filesystem::path output_dir = "out";
};

std::vector<std::string> preset_names();
/// Throws qnd::ConfigError for unknown names.
RunConfig preset(std::string_view name);

/// "inf" (any case) or a positive number.
double parse_depth(std::string_view text);
std::string depth_label(double d);

/// Sets one key; throws qnd::ConfigError for unknown keys or bad values.
void apply_key(RunConfig& cfg, std::string_view key, std::string_view value);

/// Reads key = value lines ('#' comments) on top of `base`. Relative
/// target_file paths resolve against `base_dir`.
RunConfig parse_config(std::istream& in, RunConfig base, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base);

/// Sorted key = value lines describing every setting that affects results.
std::string canonical_text(const RunConfig& cfg);
/// FNV-1a over canonical_text.
std::uint64_t config_hash(const RunConfig& cfg);
std::string hash_hex(std::uint64_t h);

/// Builds the designer input, reading the table for tabulated targets.
qnd::TargetSpec target_spec(const RunConfig& cfg);

qnd::DecayLaw fit_law(const RunConfig& cfg);
qnd::FitRange fit_range(const RunConfig& cfg, const qnd::TargetSpec& spec);

/// Checks everything that can be checked before a run starts.
void validate(const RunConfig& cfg);

}  // namespace qndsim

#endif  // QNDSIM_RUN_CONFIG_HPP
