// Multimode spatial entanglement witness
//
//   W = (1/n_a) sum_alpha sum_{i,j} f*(r_i) f(r_j) G_aa(r_i, r_j) - 1,
//
// with f = 1 on one bin set, exp(i phi) on a second, zero elsewhere, scaled by
// 1/sqrt(m + n) so that sum |f|^2 = 1. W < 0 certifies entanglement. Means are
// zero in every reachable state, so second moments equal covariances.

#ifndef QND_WITNESS_HPP
#define QND_WITNESS_HPP

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnd/lattice.hpp"

namespace qnd {

struct WitnessQuery {
  std::vector<int> s_bins;
  std::vector<int> w_bins;
  double phi = 0.0;
};

inline void validate(const WitnessQuery& q, int n_sites) {
  if (q.s_bins.empty() || q.w_bins.empty()) throw std::invalid_argument("witness bin sets must be non-empty");
  std::set<int> seen;
  for (const auto* bins : {&q.s_bins, &q.w_bins})
    for (int i : *bins) {
      if (i < 0 || i >= n_sites) throw std::out_of_range("witness bin " + std::to_string(i) + " outside lattice");
      if (!seen.insert(i).second) throw std::invalid_argument("witness bin sets overlap at " + std::to_string(i));
    }
}

/// Imaginary part of the quadratic form, which vanishes for symmetric G.
struct WitnessValue {
  double value = 0.0;
  double imaginary = 0.0;
};

template <typename Scalar>
WitnessValue witness_detail(const CovarianceState<Scalar>& state, const EnsembleConfig& config,
                            const WitnessQuery& q) {
  const int n = static_cast<int>(state.n_sites());
  validate(q, n);
  const Scalar norm = 1 / std::sqrt(static_cast<Scalar>(q.s_bins.size() + q.w_bins.size()));
  // f = re + i im
  Vector<Scalar> re = Vector<Scalar>::Zero(n);
  Vector<Scalar> im = Vector<Scalar>::Zero(n);
  for (int i : q.s_bins) re(i) = norm;
  for (int i : q.w_bins) {
    re(i) = norm * std::cos(static_cast<Scalar>(q.phi));
    im(i) = norm * std::sin(static_cast<Scalar>(q.phi));
  }
  Scalar real_part = 0;
  Scalar imag_part = 0;
  for (const auto& g : state.g) {
    const Vector<Scalar> g_re = g * re;
    const Vector<Scalar> g_im = g * im;
    real_part += re.dot(g_re) + im.dot(g_im);
    imag_part += re.dot(g_im) - im.dot(g_re);
  }
  WitnessValue w;
  w.value = static_cast<double>(real_part) / config.atoms_per_site - 1.0;
  w.imaginary = static_cast<double>(imag_part) / config.atoms_per_site;
  return w;
}

template <typename Scalar>
double witness_value(const CovarianceState<Scalar>& state, const EnsembleConfig& config, const WitnessQuery& q) {
  const WitnessValue w = witness_detail(state, config, q);
  if (std::abs(w.imaginary) > 1e-12 * std::max(1.0, std::abs(w.value)))
    throw InvariantViolation("witness has imaginary residue " + std::to_string(w.imaginary));
  return w.value;
}

struct WitnessScanOptions {
  int single_bins = 1;  // m
  int chain_bins = 106;  // n
  int origin = 0;        // first single bin
  int delta_r_min = 1;
  int delta_r_max = -1;  // -1: largest separation that fits
  int phi_points = 64;
};

struct WitnessCell {
  int delta_r;
  double phi;
  double w;
};

struct WitnessMinimum {
  int delta_r;
  double phi;
  double w;
  double w_at_zero_phase;
};

struct WitnessScan {
  std::vector<WitnessCell> cells;      // delta_r-major, phi-minor
  std::vector<WitnessMinimum> minima;  // one per delta_r
};

/// Single bins {origin .. origin+m-1}; chain starting dr after the last single
/// bin. Throws std::out_of_range when the geometry overflows the lattice.
WitnessQuery witness_geometry(int delta_r, const WitnessScanOptions& opt, int n_sites);

/// Largest dr for which the chain's near end is also the nearest periodic
/// image of the single bins, floor((n_s - m - n + 2) / 2).
inline int witness_near_field_limit(const WitnessScanOptions& opt, int n_sites) {
  return (n_sites - opt.single_bins - opt.chain_bins + 2) / 2;
}

WitnessScan witness_scan(const CovarianceStated& state, const EnsembleConfig& config,
                         const WitnessScanOptions& opt = {});

}  // namespace qnd

#endif  // QND_WITNESS_HPP
