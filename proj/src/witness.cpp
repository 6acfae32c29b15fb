#include "qnd/witness.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qnd {

WitnessQuery witness_geometry(int delta_r, const WitnessScanOptions& opt, int n_sites) {
  if (opt.single_bins < 1 || opt.chain_bins < 1) throw std::invalid_argument("witness bin counts must be positive");
  if (delta_r < 1) throw std::invalid_argument("witness separation must be >= 1");
  WitnessQuery q;
  for (int i = 0; i < opt.single_bins; ++i) q.s_bins.push_back(opt.origin + i);
  const int chain_start = opt.origin + opt.single_bins - 1 + delta_r;
  if (opt.origin < 0 || chain_start + opt.chain_bins > n_sites)
    throw std::out_of_range("witness geometry overflows lattice at dr=" + std::to_string(delta_r));
  for (int i = 0; i < opt.chain_bins; ++i) q.w_bins.push_back(chain_start + i);
  return q;
}

WitnessScan witness_scan(const CovarianceStated& state, const EnsembleConfig& config, const WitnessScanOptions& opt) {
  const int n = static_cast<int>(state.n_sites());
  if (opt.phi_points < 1) throw std::invalid_argument("phi grid needs at least one point");
  const int largest = n - opt.chain_bins - opt.origin - opt.single_bins + 1;
  const int last = opt.delta_r_max < 0 ? largest : opt.delta_r_max;
  if (last > largest)
    throw std::out_of_range("witness geometry overflows lattice for dr > " + std::to_string(largest));
  if (last < opt.delta_r_min) throw std::invalid_argument("empty witness separation range");

  // With f = s + exp(i phi) w for real indicator vectors s and w,
  // f^+ G f = s'Gs + w'Gw + cos(phi) (s'Gw + w'Gs) + i sin(phi) (s'Gw - w'Gs).
  const double norm = 1.0 / std::sqrt(static_cast<double>(opt.single_bins + opt.chain_bins));
  WitnessScan scan;
  for (int dr = opt.delta_r_min; dr <= last; ++dr) {
    const WitnessQuery q = witness_geometry(dr, opt, n);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    for (int i : q.s_bins) s(i) = norm;
    for (int i : q.w_bins) w(i) = norm;
    double diagonal = 0.0;
    double cross_sym = 0.0;
    double cross_anti = 0.0;
    for (const auto& g : state.g) {
      const Eigen::VectorXd gs = g * s;
      const Eigen::VectorXd gw = g * w;
      diagonal += s.dot(gs) + w.dot(gw);
      cross_sym += s.dot(gw) + w.dot(gs);
      cross_anti += s.dot(gw) - w.dot(gs);
    }
    const double na = config.atoms_per_site;
    WitnessMinimum best{dr, 0.0, std::numeric_limits<double>::infinity(), 0.0};
    for (int k = 0; k < opt.phi_points; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / opt.phi_points;
      const double value = (diagonal + std::cos(phi) * cross_sym) / na - 1.0;
      const double imaginary = std::sin(phi) * cross_anti / na;
      if (std::abs(imaginary) > 1e-12 * std::max(1.0, std::abs(value)))
        throw InvariantViolation("witness has imaginary residue " + std::to_string(imaginary));
      scan.cells.push_back({dr, phi, value});
      if (k == 0) best.w_at_zero_phase = value;
      if (value < best.w) {
        best.w = value;
        best.phi = phi;
      }
    }
    scan.minima.push_back(best);
  }
  return scan;
}

}  // namespace qnd
