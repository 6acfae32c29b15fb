// Brute-force measurement model over the full mode basis, used to validate the
// rank-1 real-space pulse engine on small lattices.
//
// The extended covariance lives on 3 n_s real atomic modes (cosine/sine
// combinations of J_alpha(k) for every grid k, per component) plus the two
// light quadratures {S_2, S_3}. A pulse is the linear small-angle map
// S_2 -> S_2 + g sum_i c_i J_{z,i}, applied as a congruence, followed by the
// projective measurement
//
//   Gamma_M = Gamma_out - Gamma_out (P2 Gamma_out P2)^+ Gamma_out
//
// with an SVD pseudoinverse, then decoherence, then a fresh light block.

#ifndef QND_REFERENCE_ORACLE_HPP
#define QND_REFERENCE_ORACLE_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnd/lattice.hpp"
#include "qnd/pulse_engine.hpp"

namespace qnd::oracle {

inline constexpr int kMaxSites = 32;

template <typename Scalar>
struct ExtendedCovariance {
  Matrix<Scalar> matrix;
  std::vector<std::string> mode_labels;
  int n_sites = 0;

  Eigen::Index s2() const { return 3 * n_sites; }
  Eigen::Index s3() const { return 3 * n_sites + 1; }
  Eigen::Index block(Axis a) const { return static_cast<Eigen::Index>(a) * n_sites; }
};

/// Orthonormal real mode basis; column order m=0, (cos m, sin m) for
/// 0 < m < n/2, then m = n/2.
template <typename Scalar>
Matrix<Scalar> mode_basis(int n, std::vector<std::string>* labels = nullptr) {
  const Scalar two_pi = static_cast<Scalar>(2) * std::numbers::pi_v<Scalar>;
  const Scalar unit = 1 / std::sqrt(static_cast<Scalar>(n));
  const Scalar paired = std::sqrt(static_cast<Scalar>(2) / static_cast<Scalar>(n));
  Matrix<Scalar> u(n, n);
  int col = 0;
  auto push_label = [&](const std::string& s) {
    if (labels) labels->push_back(s);
  };
  u.col(col++).setConstant(unit);
  push_label("k0");
  for (int m = 1; m < n / 2; ++m) {
    for (int i = 0; i < n; ++i) {
      const Scalar phase = two_pi * static_cast<Scalar>((m * i) % n) / static_cast<Scalar>(n);
      u(i, col) = paired * std::cos(phase);
      u(i, col + 1) = paired * std::sin(phase);
    }
    push_label("cos" + std::to_string(m));
    push_label("sin" + std::to_string(m));
    col += 2;
  }
  for (int i = 0; i < n; ++i) u(i, col) = (i % 2 == 0) ? unit : -unit;
  push_label("k" + std::to_string(n / 2));
  return u;
}

template <typename Scalar>
ExtendedCovariance<Scalar> make_extended(const CovarianceState<Scalar>& state) {
  const int n = static_cast<int>(state.n_sites());
  if (n > kMaxSites) throw std::invalid_argument("reference oracle limited to n_sites <= 32");
  ExtendedCovariance<Scalar> ext;
  ext.n_sites = n;
  std::vector<std::string> modes;
  const Matrix<Scalar> u = mode_basis<Scalar>(n, &modes);
  ext.matrix = Matrix<Scalar>::Zero(3 * n + 2, 3 * n + 2);
  for (Axis a : kAxes) {
    ext.matrix.block(ext.block(a), ext.block(a), n, n) = u.transpose() * state[a] * u;
    for (const auto& m : modes) ext.mode_labels.push_back(std::string("J") + axis_name(a) + ":" + m);
  }
  ext.matrix(ext.s2(), ext.s2()) = static_cast<Scalar>(kLightVarianceIn);
  ext.matrix(ext.s3(), ext.s3()) = static_cast<Scalar>(kLightVarianceIn);
  ext.mode_labels.push_back("S2");
  ext.mode_labels.push_back("S3");
  return ext;
}

/// Moore-Penrose pseudoinverse by SVD; singular values below
/// `relative_cutoff * sigma_max` are treated as zero.
template <typename Scalar>
Matrix<Scalar> pseudo_inverse(const Matrix<Scalar>& a, Scalar relative_cutoff = Scalar(1e-12)) {
  Eigen::JacobiSVD<Matrix<Scalar>> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const Scalar cutoff = s.size() > 0 ? relative_cutoff * s(0) : Scalar(0);
  Vector<Scalar> inv = Vector<Scalar>::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff && s(i) > Scalar(0)) inv(i) = 1 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

template <typename Scalar>
ExtendedCovariance<Scalar> oracle_apply_pulse(ExtendedCovariance<Scalar> ext, const EnsembleConfig& config,
                                              const Pulse& pulse) {
  const int n = ext.n_sites;
  if (n > kMaxSites) throw std::invalid_argument("reference oracle limited to n_sites <= 32");
  if (n != config.n_sites) throw std::invalid_argument("extended covariance does not match config");
  check_eta(pulse.eta);
  const Eigen::Index dim = ext.matrix.rows();

  const Matrix<Scalar> u = mode_basis<Scalar>(n);
  const Vector<Scalar> c = standing_wave_weights<Scalar>(pulse.p, n);
  const Scalar g = static_cast<Scalar>(pulse.coupling / std::sqrt(n * config.spin));

  Matrix<Scalar> map = Matrix<Scalar>::Identity(dim, dim);
  map.row(ext.s2()).segment(ext.block(pulse.axis), n) = g * (u.transpose() * c).transpose();
  const Matrix<Scalar> out = map * ext.matrix * map.transpose();

  Matrix<Scalar> projected = Matrix<Scalar>::Zero(dim, dim);
  projected(ext.s2(), ext.s2()) = out(ext.s2(), ext.s2());
  const Matrix<Scalar> pinv = pseudo_inverse<Scalar>(projected);
  Matrix<Scalar> measured = out - out * pinv * out;

  const Eigen::Index atoms = 3 * n;
  const Scalar keep = static_cast<Scalar>(1.0 - 2.0 * pulse.eta);
  const Scalar refill = static_cast<Scalar>(2.0 * pulse.eta * gamma0(config));
  measured.topLeftCorner(atoms, atoms) *= keep;
  measured.topLeftCorner(atoms, atoms).diagonal().array() += refill;

  measured.rightCols(2).setZero();
  measured.bottomRows(2).setZero();
  measured(ext.s2(), ext.s2()) = static_cast<Scalar>(kLightVarianceIn);
  measured(ext.s3(), ext.s3()) = static_cast<Scalar>(kLightVarianceIn);

  ext.matrix = (Scalar(0.5) * (measured + measured.transpose())).eval();
  return ext;
}

/// Largest elementwise discrepancy between the real-space state and the
/// extended covariance's atomic block, including cross-component blocks
/// (which the real-space state holds at zero).
template <typename Scalar>
Scalar compare_states(const CovarianceState<Scalar>& a, const ExtendedCovariance<Scalar>& b) {
  const int n = static_cast<int>(a.n_sites());
  if (n != b.n_sites || b.matrix.rows() != 3 * n + 2)
    throw std::invalid_argument("compare_states: shape mismatch");
  const Matrix<Scalar> u = mode_basis<Scalar>(n);
  Scalar worst = 0;
  for (Axis r : kAxes) {
    for (Axis s : kAxes) {
      const Matrix<Scalar> real = u * b.matrix.block(b.block(r), b.block(s), n, n) * u.transpose();
      const Scalar diff = (r == s) ? (real - a[r]).cwiseAbs().maxCoeff() : real.cwiseAbs().maxCoeff();
      worst = std::max(worst, diff);
    }
  }
  return worst;
}

}  // namespace qnd::oracle

#endif  // QND_REFERENCE_ORACLE_HPP
