// Ensemble configuration, covariance-state representation and the lattice
// transforms every other module builds on.
//
// Sites sit at r_i = i (i = 0..n_s-1, unit lattice constant) and the mode grid
// is k_m = 2*pi*m/n_s. Covariances are stored in real space, one symmetric
// n_s x n_s matrix per spin component; cross-component covariances start at
// zero and no operation populates them, so they are not stored.

#ifndef QND_LATTICE_HPP
#define QND_LATTICE_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qnd/errors.hpp"

namespace qnd {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Axis { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

inline const char* axis_name(Axis a) {
  switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

inline constexpr double kInfiniteDepth = std::numeric_limits<double>::infinity();

struct EnsembleConfig {
  int n_sites = 200;
  int atoms_per_site = 10;
  double spin = 1.0;
  double optical_depth = kInfiniteDepth;

  int total_atoms() const { return n_sites * atoms_per_site; }
  bool finite_depth() const { return std::isfinite(optical_depth); }
};

/// Throws ConfigError naming the first violated constraint.
inline void validate(const EnsembleConfig& c) {
  if (c.n_sites < 8 || c.n_sites % 2 != 0)
    throw ConfigError("n_sites must be even and >= 8 (got " + std::to_string(c.n_sites) + ")");
  if (c.atoms_per_site < 1)
    throw ConfigError("atoms_per_site must be positive (got " + std::to_string(c.atoms_per_site) + ")");
  const double twice = 2.0 * c.spin;
  if (!(c.spin > 0.0) || std::abs(twice - std::round(twice)) > 1e-12)
    throw ConfigError("spin must be a positive half-integer (got " + std::to_string(c.spin) + ")");
  if (std::isnan(c.optical_depth) || !(c.optical_depth > 0.0))
    throw ConfigError("optical_depth must be positive or inf");
}

/// Per-bin variance of each spin component in the completely mixed state,
/// n_a j (j+1) / 3.
inline double gamma0(const EnsembleConfig& c) {
  return c.atoms_per_site * c.spin * (c.spin + 1.0) / 3.0;
}

template <typename Scalar>
struct CovarianceState {
  std::array<Matrix<Scalar>, 3> g;

  Matrix<Scalar>& operator[](Axis a) { return g[static_cast<int>(a)]; }
  const Matrix<Scalar>& operator[](Axis a) const { return g[static_cast<int>(a)]; }

  Eigen::Index n_sites() const { return g[0].rows(); }
};

using CovarianceStated = CovarianceState<double>;

template <typename Scalar = double>
CovarianceState<Scalar> new_mixed_state(const EnsembleConfig& config) {
  validate(config);
  const Scalar diag = static_cast<Scalar>(gamma0(config));
  CovarianceState<Scalar> s;
  for (auto& m : s.g) m = diag * Matrix<Scalar>::Identity(config.n_sites, config.n_sites);
  return s;
}

/// Gamma~(k_m, -k_m) for m = 0..n_s-1.
template <typename Scalar>
struct KSpectrum {
  Vector<Scalar> values;
  Scalar max_imaginary = 0;  // largest |Im| of the transform before discarding it
};

/// Diagonal of the two-dimensional lattice Fourier transform,
///   values[m] = (1/n_s) sum_{i,j} cos(k_m (r_i - r_j)) G(r_i, r_j),
/// evaluated with a column FFT followed by an O(n_s^2) contraction.
template <typename Scalar>
KSpectrum<Scalar> k_spectrum(const Matrix<Scalar>& g) {
  using Complex = std::complex<Scalar>;
  const Eigen::Index n = g.rows();
  Eigen::FFT<Scalar> fft;
  Matrix<Complex> a(n, n);
  Vector<Scalar> column(n);
  Vector<Complex> transformed(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    column = g.col(j);
    fft.fwd(transformed, column);
    a.col(j) = transformed;
  }
  const Scalar two_pi = static_cast<Scalar>(2) * std::numbers::pi_v<Scalar>;
  KSpectrum<Scalar> out;
  out.values.resize(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    Complex acc(0, 0);
    for (Eigen::Index j = 0; j < n; ++j) {
      // reduce the phase index first so large m*j stays exact
      const Scalar phase = two_pi * static_cast<Scalar>((m * j) % n) / static_cast<Scalar>(n);
      acc += a(m, j) * Complex(std::cos(phase), std::sin(phase));
    }
    out.values(m) = acc.real() / static_cast<Scalar>(n);
    out.max_imaginary = std::max(out.max_imaginary, std::abs(acc.imag()) / static_cast<Scalar>(n));
  }
  return out;
}

template <typename Scalar>
KSpectrum<Scalar> k_spectrum(const CovarianceState<Scalar>& state, Axis axis) {
  return k_spectrum<Scalar>(state[axis]);
}

/// Spectrum of the component sum G_xx + G_yy + G_zz.
template <typename Scalar>
KSpectrum<Scalar> k_spectrum_total(const CovarianceState<Scalar>& state) {
  return k_spectrum<Scalar>(Matrix<Scalar>(state.g[0] + state.g[1] + state.g[2]));
}

/// C(dr) for dr = 0..n_s/2: average over start sites i = 0..n_s/4-1 of
/// sum_alpha G_aa(r_i, r_i + dr) / Gamma0.
template <typename Scalar>
Vector<Scalar> real_correlation(const CovarianceState<Scalar>& state, const EnsembleConfig& config) {
  const Eigen::Index n = state.n_sites();
  if (n != config.n_sites) throw std::invalid_argument("state size does not match config");
  const Eigen::Index window = n / 4;
  const Scalar g0 = static_cast<Scalar>(gamma0(config));
  Vector<Scalar> c = Vector<Scalar>::Zero(n / 2 + 1);
  for (Eigen::Index dr = 0; dr <= n / 2; ++dr) {
    Scalar acc = 0;
    for (const auto& g : state.g)
      acc += g.diagonal(dr).head(window).sum();
    c(dr) = acc / (static_cast<Scalar>(window) * g0);
  }
  return c;
}

struct InvariantReport {
  double min_eigenvalue = 0;      // over all three components
  double max_asymmetry = 0;       // max |G - G^T|
  double max_diagonal = 0;
  double min_diagonal = 0;
  double max_spectral_asymmetry = 0;  // max |values[m] - values[n_s - m]|
  double max_imaginary = 0;
};

/// Evaluates the admissibility conditions of a covariance state. Spectral
/// quantities are only computed when `with_spectrum` is set.
template <typename Scalar>
InvariantReport inspect(const CovarianceState<Scalar>& state, bool with_spectrum = true) {
  InvariantReport r;
  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  r.min_diagonal = std::numeric_limits<double>::infinity();
  for (const auto& g : state.g) {
    r.max_asymmetry = std::max<double>(r.max_asymmetry, (g - g.transpose()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(g, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = std::min<double>(r.min_eigenvalue, es.eigenvalues().minCoeff());
    r.max_diagonal = std::max<double>(r.max_diagonal, g.diagonal().maxCoeff());
    r.min_diagonal = std::min<double>(r.min_diagonal, g.diagonal().minCoeff());
    if (with_spectrum) {
      const auto spec = k_spectrum<Scalar>(g);
      const Eigen::Index n = spec.values.size();
      for (Eigen::Index m = 1; m < n; ++m)
        r.max_spectral_asymmetry =
            std::max<double>(r.max_spectral_asymmetry, std::abs(spec.values(m) - spec.values(n - m)));
      r.max_imaginary = std::max<double>(r.max_imaginary, spec.max_imaginary);
    }
  }
  return r;
}

/// Throws InvariantViolation if the state is not symmetric, not PSD within
/// 1e-9 Gamma0, or has variances outside [0, Gamma0 (1 + 1e-9)].
template <typename Scalar>
void require_invariants(const CovarianceState<Scalar>& state, const EnsembleConfig& config) {
  const double g0 = gamma0(config);
  const auto r = inspect(state, /*with_spectrum=*/false);
  if (r.max_asymmetry > 0.0)
    throw InvariantViolation("covariance matrix is not symmetric (max |G - G^T| = " +
                             std::to_string(r.max_asymmetry) + ")");
  if (r.min_eigenvalue < -1e-9 * g0)
    throw InvariantViolation("covariance matrix is not positive semidefinite (min eigenvalue " +
                             std::to_string(r.min_eigenvalue) + ")");
  if (r.min_diagonal < -1e-9 * g0 || r.max_diagonal > g0 * (1.0 + 1e-9))
    throw InvariantViolation("variance outside [0, Gamma0]");
}

}  // namespace qnd

#endif  // QND_LATTICE_HPP
