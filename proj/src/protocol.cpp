#include "qnd/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "qnd/errors.hpp"

namespace qnd {

std::string_view to_string(OrderPolicy policy) {
  switch (policy) {
    case OrderPolicy::ascending_p: return "ascending_p";
    case OrderPolicy::descending_p: return "descending_p";
    case OrderPolicy::descending_coupling: return "descending_coupling";
  }
  return "?";
}

OrderPolicy parse_order_policy(std::string_view name) {
  for (auto p : {OrderPolicy::ascending_p, OrderPolicy::descending_p, OrderPolicy::descending_coupling})
    if (name == to_string(p)) return p;
  throw ConfigError("unknown order policy '" + std::string(name) +
                    "' (expected ascending_p, descending_p or descending_coupling)");
}

PulsePlan build_plan(const DesignResult& design, const EnsembleConfig& config, OrderPolicy order) {
  validate(config);
  const int half = config.n_sites / 2;
  if (design.couplings.size() != half + 1) throw std::invalid_argument("design does not match n_sites");

  std::vector<int> active;
  for (int p = 0; p <= half; ++p) {
    const double c = design.couplings(p);
    if (!std::isfinite(c) || c < 0.0) throw std::invalid_argument("design coupling must be finite and >= 0");
    if (c > 0.0) active.push_back(p);
  }
  if (active.empty()) throw DegenerateTarget();

  switch (order) {
    case OrderPolicy::ascending_p: break;
    case OrderPolicy::descending_p: std::reverse(active.begin(), active.end()); break;
    case OrderPolicy::descending_coupling:
      std::stable_sort(active.begin(), active.end(),
                       [&](int a, int b) { return design.couplings(a) > design.couplings(b); });
      break;
  }

  PulsePlan plan;
  plan.order = order;
  for (int p : active) {
    const double c = design.couplings(p);
    const double eta = config.finite_depth() ? c * c / config.optical_depth : 0.0;
    if (eta > 0.5)
      throw InfeasibleTarget("coupling C_" + std::to_string(p) + "=" + std::to_string(c) +
                                 " implies eta > 1/2 at d=" + std::to_string(config.optical_depth),
                             std::sqrt(0.5 * config.optical_depth));
    for (Axis a : {Axis::z, Axis::x, Axis::y}) {
      plan.pulses.push_back(Pulse{p, a, c, eta});
      plan.total_eta += eta;
    }
  }
  return plan;
}

RunResult run(const PulsePlan& plan, const EnsembleConfig& config, const PulseObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  RunResult r{new_mixed_state<double>(config), {}};
  r.report.config = config;
  r.report.trace.reserve(plan.pulses.size());
  for (std::size_t i = 0; i < plan.pulses.size(); ++i) {
    const Pulse& pulse = plan.pulses[i];
    TraceEntry entry{pulse, apply_pulse(r.state, config, pulse), zero_means(r.state, pulse)};
    r.report.trace.push_back(entry);
    if (observer) observer(i, r.state, entry);
  }
  for (Axis a : kAxes) r.report.spectra[static_cast<int>(a)] = k_spectrum(r.state, a).values;
  r.report.total_spectrum = k_spectrum_total(r.state).values;
  r.report.correlation = real_correlation(r.state, config);
  r.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace qnd
