// Inverse design: turn a desired correlation signature into per-wavevector
// squeezing fractions f_p and pulse couplings C_p.
//
// The p-profile of f is the cosine transform of the target on the ring; its
// overall amplitude is fixed afterwards by requiring max_p C_p = c_max. Each
// coupling solves the single-pulse self-consistency relation on the mixed
// state, f_p = Gamma0 C_p^2 / (4 j Gamma22_out(C_p)).

#ifndef QND_DESIGNER_HPP
#define QND_DESIGNER_HPP

#include <Eigen/Dense>

#include <filesystem>
#include <istream>
#include <map>
#include <variant>

#include "qnd/lattice.hpp"

namespace qnd {

struct ExponentialDecay {
  double correlation_length = 5.0;
};
struct AlgebraicDecay {
  double exponent = 0.7;
};
struct ModulatedAlgebraicDecay {
  double exponent = 0.7;
  int period = 3;
};
struct TabulatedTarget {
  std::map<int, double> samples;  // dr -> value
};

using TargetShape = std::variant<ExponentialDecay, AlgebraicDecay, ModulatedAlgebraicDecay, TabulatedTarget>;

struct TargetSpec {
  TargetShape shape = ExponentialDecay{};
  double c_max = 0.95;
};

struct RawFractions {
  Eigen::VectorXd values;     // p = 0..n_s/2, clipped at zero
  double clipped_mass = 0.0;  // |negative mass| / total |mass| before clipping
};

struct DesignResult {
  Eigen::VectorXd fractions;  // f_p, p = 0..n_s/2
  Eigen::VectorXd couplings;  // C_p
  double clipped_mass = 0.0;
  double scale = 0.0;
};

void validate(const TargetSpec& spec, int n_sites);

/// Target sampled on dr = 0..n_s/2 with the tail offset (mean of the last 10%
/// of dr >= 1) removed. The on-site entry is the shape at zero separation,
/// with power laws regularised as max(dr, 1)^-zeta; tabulated targets use
/// their dr = 0 row when present and the dr = 1 value otherwise.
Eigen::VectorXd sample_target(const TargetSpec& spec, int n_sites);

/// Cosine transform on the ring of 4 samples / Gamma0, trapezoid-weighted at
/// dr = 0 and dr = n_s/2, evaluated for p = 0..n_s/2; negative entries clipped.
RawFractions target_to_fractions(const Eigen::VectorXd& samples, const EnsembleConfig& config);

/// c^T c for the standing-wave weights of mode p.
double weight_norm2(int p, int n_sites);

/// Fraction at which the coupling diverges: n_s / (4 c^T c).
double fraction_pole(int p, const EnsembleConfig& config);

/// Fraction produced by coupling C on the mixed state.
double fraction_for_coupling(double coupling, int p, const EnsembleConfig& config);

/// Numeric inverse of fraction_for_coupling by bracketing bisection.
double coupling_for_fraction(double fraction, int p, const EnsembleConfig& config);

/// Closed-form inverse, C^2 = 4 j Gamma22_in f / (Gamma0 (1 - f / f_pole)).
double coupling_closed_form(double fraction, int p, const EnsembleConfig& config);

/// Finds the single scale s with max_p C_p(s f_raw(p)) = c_max.
DesignResult fractions_to_couplings(const RawFractions& raw, const EnsembleConfig& config, double c_max);

DesignResult design(const TargetSpec& spec, const EnsembleConfig& config);

/// Two-column (dr, value) table; whitespace or comma separated, '#' comments.
TabulatedTarget parse_tabulated_target(std::istream& in);
TabulatedTarget read_tabulated_target(const std::filesystem::path& path);

}  // namespace qnd

#endif  // QND_DESIGNER_HPP
