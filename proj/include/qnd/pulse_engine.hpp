// One standing-wave QND pulse: Faraday interaction with a fresh light pulse,
// homodyne detection of S_2, spontaneous-emission decoherence, and the
// mean-zeroing feedback step.
//
// The probe with mode index p has wavevector k_p = pi p / n_s and couples to
// the weighted sum sum_i c_i J_{alpha,i} with c_i = (1 + cos(2 k_p r_i)) / 2.
// In real space the measurement is a rank-1 downdate of the measured
// component's covariance:
//
//   v = G c,   Gamma22_out = 1/2 + g^2 c^T v,   G <- G - (g^2 / Gamma22_out) v v^T
//
// with g^2 = C_p^2 / (n_s j) and shot-noise-normalised light (Gamma22_in = 1/2).

#ifndef QND_PULSE_ENGINE_HPP
#define QND_PULSE_ENGINE_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qnd/lattice.hpp"

namespace qnd {

inline constexpr double kLightVarianceIn = 0.5;

struct Pulse {
  int p = 0;
  Axis axis = Axis::z;
  double coupling = 0.0;
  double eta = 0.0;
};

struct PulseDiagnostics {
  double gamma22_out = kLightVarianceIn;
  double achieved_fraction = 0.0;
  double variance_before = 0.0;  // Gamma~(2k_p, -2k_p) of the measured component
  double variance_after = 0.0;
};

/// Record of the feedback step that zeroes <J_alpha(+-2k_p)>.
struct FeedbackEvent {
  int p = 0;
  Axis axis = Axis::z;
};

template <typename Scalar = double>
Vector<Scalar> standing_wave_weights(int p, int n_sites) {
  if (p < 0 || p > n_sites / 2)
    throw std::out_of_range("pulse mode index p=" + std::to_string(p) + " outside [0, " +
                            std::to_string(n_sites / 2) + "]");
  const Scalar two_pi = static_cast<Scalar>(2) * std::numbers::pi_v<Scalar>;
  Vector<Scalar> c(n_sites);
  for (int i = 0; i < n_sites; ++i) {
    const Scalar phase = two_pi * static_cast<Scalar>((static_cast<long>(p) * i) % n_sites) /
                         static_cast<Scalar>(n_sites);
    c(i) = (1 + std::cos(phase)) / 2;
  }
  return c;
}

/// Gamma~(k_m, -k_m) of a single matrix at one mode; O(n_s^2).
template <typename Scalar>
Scalar mode_variance(const Matrix<Scalar>& g, int m) {
  const Eigen::Index n = g.rows();
  const Scalar two_pi = static_cast<Scalar>(2) * std::numbers::pi_v<Scalar>;
  Vector<Scalar> cs(n), sn(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar phase = two_pi * static_cast<Scalar>((m * i) % n) / static_cast<Scalar>(n);
    cs(i) = std::cos(phase);
    sn(i) = std::sin(phase);
  }
  return (cs.dot(g * cs) + sn.dot(g * sn)) / static_cast<Scalar>(n);
}

inline void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 0.5))
    throw std::invalid_argument("decoherence eta=" + std::to_string(eta) + " outside [0, 1/2]");
}

/// g_alpha <- (1 - 2 eta) g_alpha + 2 eta Gamma0 I for every component.
template <typename Scalar>
void apply_decoherence(CovarianceState<Scalar>& state, const EnsembleConfig& config, double eta) {
  check_eta(eta);
  if (eta == 0.0) return;
  const Scalar keep = static_cast<Scalar>(1.0 - 2.0 * eta);
  const Scalar refill = static_cast<Scalar>(2.0 * eta * gamma0(config));
  for (auto& g : state.g) {
    g *= keep;
    g.diagonal().array() += refill;
  }
}

/// Means are identically zero in this representation, so feedback leaves the
/// covariances untouched; the event is returned for the protocol trace.
template <typename Scalar>
FeedbackEvent zero_means(CovarianceState<Scalar>& /*state*/, const Pulse& pulse) {
  return FeedbackEvent{pulse.p, pulse.axis};
}

template <typename Scalar>
PulseDiagnostics apply_pulse(CovarianceState<Scalar>& state, const EnsembleConfig& config, const Pulse& pulse) {
  const int n = static_cast<int>(state.n_sites());
  if (n != config.n_sites) throw std::invalid_argument("state size does not match config");
  if (!std::isfinite(pulse.coupling) || pulse.coupling < 0.0)
    throw std::invalid_argument("pulse coupling must be finite and non-negative");
  check_eta(pulse.eta);
  const Vector<Scalar> c = standing_wave_weights<Scalar>(pulse.p, n);

  Matrix<Scalar>& g = state[pulse.axis];
  PulseDiagnostics d;
  d.variance_before = static_cast<double>(mode_variance(g, pulse.p));

  const Scalar g2 = static_cast<Scalar>(pulse.coupling * pulse.coupling / (n * config.spin));
  const Vector<Scalar> v = g * c;
  const Scalar gamma22 = static_cast<Scalar>(kLightVarianceIn) + g2 * c.dot(v);
  if (g2 > 0) {
    g.noalias() -= (g2 / gamma22) * v * v.transpose();
    g = (Scalar(0.5) * (g + g.transpose())).eval();
  }
  apply_decoherence(state, config, pulse.eta);

  d.gamma22_out = static_cast<double>(gamma22);
  d.achieved_fraction =
      gamma0(config) * pulse.coupling * pulse.coupling / (4.0 * config.spin * d.gamma22_out);
  d.variance_after = static_cast<double>(mode_variance(g, pulse.p));
  return d;
}

}  // namespace qnd

#endif  // QND_PULSE_ENGINE_HPP
