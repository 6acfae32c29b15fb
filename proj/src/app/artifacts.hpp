// Single-run pipeline (design, plan, run, analysis) and the files it writes.

#ifndef QNDSIM_ARTIFACTS_HPP
#define QNDSIM_ARTIFACTS_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "app/run_config.hpp"
#include "qnd/analysis.hpp"
#include "qnd/designer.hpp"
#include "qnd/protocol.hpp"
#include "qnd/witness.hpp"

namespace qndsim {

struct RunOutcome {
  RunConfig config;
  std::string hash;
  qnd::TargetSpec spec;
  qnd::DesignResult design;
  qnd::PulsePlan plan;
  qnd::RunResult result;
  qnd::FitResult correlation_fit;
  qnd::WitnessScan witness;
  qnd::FitResult witness_fit;  // fit of -W(dr, phi = 0)
  std::optional<double> spectrum_match;
  int squeezing_peak = 0;
  // max |C(dr)| difference against a rerun in the opposite wavevector order
  qnd::OrderPolicy order_compared = qnd::OrderPolicy::descending_p;
  double order_sensitivity = 0.0;
  qnd::InvariantReport invariants;
};

/// Runs the whole pipeline in memory. Throws qnd::InvariantViolation if the
/// final state is not admissible.
RunOutcome simulate(const RunConfig& cfg);

/// correlation.csv, spectrum.csv, witness.csv, witness_min.csv, fits.json
/// and trace.json. Contents depend only on the configuration.
void write_artifacts(const RunOutcome& out, const std::filesystem::path& dir);

/// Human-readable summary for the terminal.
std::string summary_text(const RunOutcome& out);

}  // namespace qndsim

#endif  // QNDSIM_ARTIFACTS_HPP
