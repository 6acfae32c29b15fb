#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qnd/lattice.hpp"

namespace {

using qnd::EnsembleConfig;

Eigen::MatrixXd random_symmetric(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  return a * a.transpose() / n;
}

// direct double sum, no FFT
Eigen::VectorXd spectrum_by_double_sum(const Eigen::MatrixXd& g) {
  const int n = static_cast<int>(g.rows());
  Eigen::VectorXd out(n);
  for (int m = 0; m < n; ++m) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += std::cos(2.0 * std::numbers::pi * m * (i - j) / n) * g(i, j);
    out(m) = acc / n;
  }
  return out;
}

}  // namespace

TEST(Lattice, ValidateRejectsBadConfigs) {
  EnsembleConfig c;
  EXPECT_NO_THROW(qnd::validate(c));
  auto bad = [](auto edit) {
    EnsembleConfig c;
    edit(c);
    EXPECT_THROW(qnd::validate(c), qnd::ConfigError);
  };
  bad([](EnsembleConfig& c) { c.n_sites = 7; });
  bad([](EnsembleConfig& c) { c.n_sites = 6; });
  bad([](EnsembleConfig& c) { c.atoms_per_site = 0; });
  bad([](EnsembleConfig& c) { c.spin = 0.7; });
  bad([](EnsembleConfig& c) { c.spin = 0.0; });
  bad([](EnsembleConfig& c) { c.optical_depth = 0.0; });
  bad([](EnsembleConfig& c) { c.optical_depth = -3.0; });
  bad([](EnsembleConfig& c) { c.optical_depth = std::nan(""); });
  c.spin = 1.5;
  EXPECT_NO_THROW(qnd::validate(c));
}

TEST(Lattice, Gamma0) {
  EnsembleConfig c;
  EXPECT_DOUBLE_EQ(qnd::gamma0(c), 20.0 / 3.0);
  c.spin = 0.5;
  c.atoms_per_site = 4;
  EXPECT_DOUBLE_EQ(qnd::gamma0(c), 1.0);
}

TEST(Lattice, MixedStateIsFlat) {
  EnsembleConfig c;
  c.n_sites = 16;
  const auto s = qnd::new_mixed_state(c);
  for (qnd::Axis a : qnd::kAxes) {
    const auto spec = qnd::k_spectrum(s, a);
    EXPECT_LT((spec.values.array() - qnd::gamma0(c)).abs().maxCoeff(), 1e-12);
  }
  const Eigen::VectorXd corr = qnd::real_correlation(s, c);
  EXPECT_NEAR(corr(0), 3.0, 1e-14);
  EXPECT_LT(corr.tail(corr.size() - 1).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Lattice, SpectrumMatchesDoubleSum) {
  for (int n : {8, 16, 30, 200}) {
    const Eigen::MatrixXd g = random_symmetric(n, 11u + n);
    const auto fast = qnd::k_spectrum<double>(g);
    const Eigen::VectorXd slow = spectrum_by_double_sum(g);
    const double scale = slow.cwiseAbs().maxCoeff();
    EXPECT_LT((fast.values - slow).cwiseAbs().maxCoeff(), 1e-9 * scale) << "n=" << n;
    EXPECT_LT(fast.max_imaginary, 1e-9 * scale);
    for (int m = 1; m < n; ++m) EXPECT_NEAR(fast.values(m), fast.values(n - m), 1e-9 * scale);
  }
}

TEST(Lattice, RealCorrelationAveragesWindow) {
  EnsembleConfig c;
  c.n_sites = 16;
  auto s = qnd::new_mixed_state(c);
  // one bond (0, 3) in the x component, inside the n/4 window
  s[qnd::Axis::x](0, 3) = s[qnd::Axis::x](3, 0) = 1.0;
  const Eigen::VectorXd corr = qnd::real_correlation(s, c);
  EXPECT_NEAR(corr(3), 1.0 / (4 * qnd::gamma0(c)), 1e-15);
  EXPECT_EQ(corr.size(), 9);
}

TEST(Lattice, InvariantChecks) {
  EnsembleConfig c;
  c.n_sites = 8;
  auto s = qnd::new_mixed_state(c);
  EXPECT_NO_THROW(qnd::require_invariants(s, c));

  auto asym = s;
  asym[qnd::Axis::y](0, 1) = 0.1;
  EXPECT_THROW(qnd::require_invariants(asym, c), qnd::InvariantViolation);

  auto neg = s;
  neg[qnd::Axis::z](0, 1) = neg[qnd::Axis::z](1, 0) = 2.0 * qnd::gamma0(c);
  EXPECT_THROW(qnd::require_invariants(neg, c), qnd::InvariantViolation);

  auto big = s;
  big[qnd::Axis::x](2, 2) *= 1.01;
  EXPECT_THROW(qnd::require_invariants(big, c), qnd::InvariantViolation);

  const auto report = qnd::inspect(s);
  EXPECT_NEAR(report.min_eigenvalue, qnd::gamma0(c), 1e-12);
  EXPECT_EQ(report.max_asymmetry, 0.0);
}

TEST(Lattice, FloatScalar) {
  EnsembleConfig c;
  c.n_sites = 8;
  const auto s = qnd::new_mixed_state<float>(c);
  const auto spec = qnd::k_spectrum_total(s);
  EXPECT_NEAR(spec.values(3), 3.0f * static_cast<float>(qnd::gamma0(c)), 1e-4f);
}
