// Pulse schedule construction and execution.

#ifndef QND_PROTOCOL_HPP
#define QND_PROTOCOL_HPP

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "qnd/designer.hpp"
#include "qnd/lattice.hpp"
#include "qnd/pulse_engine.hpp"

namespace qnd {

enum class OrderPolicy { ascending_p, descending_p, descending_coupling };

std::string_view to_string(OrderPolicy policy);
/// Throws ConfigError for unknown names.
OrderPolicy parse_order_policy(std::string_view name);

struct PulsePlan {
  std::vector<Pulse> pulses;
  double total_eta = 0.0;
  OrderPolicy order = OrderPolicy::ascending_p;
};

/// Emits z, x, y pulses (in that order) for every wavevector with C_p > 0,
/// wavevectors sequenced by `order`. eta_p = C_p^2 / d (zero for d = inf).
PulsePlan build_plan(const DesignResult& design, const EnsembleConfig& config,
                     OrderPolicy order = OrderPolicy::ascending_p);

struct TraceEntry {
  Pulse pulse;
  PulseDiagnostics diagnostics;
  FeedbackEvent feedback;
};

struct RunReport {
  std::vector<TraceEntry> trace;
  std::array<Eigen::VectorXd, 3> spectra;  // per component, m = 0..n_s-1
  Eigen::VectorXd total_spectrum;
  Eigen::VectorXd correlation;  // C(dr), dr = 0..n_s/2
  double wall_seconds = 0.0;
  EnsembleConfig config;
};

struct RunResult {
  CovarianceStated state;
  RunReport report;
};

/// Called after every pulse with its index, the updated state and the trace entry.
using PulseObserver = std::function<void(std::size_t, const CovarianceStated&, const TraceEntry&)>;

/// Starts from the mixed state and applies the plan pulse by pulse:
/// interaction and measurement, decoherence, then feedback.
RunResult run(const PulsePlan& plan, const EnsembleConfig& config, const PulseObserver& observer = {});

}  // namespace qnd

#endif  // QND_PROTOCOL_HPP
