#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qnd/designer.hpp"
#include "qnd/errors.hpp"
#include "qnd/pulse_engine.hpp"

using qnd::EnsembleConfig;
using qnd::TargetSpec;

namespace {

EnsembleConfig ring(int n) {
  EnsembleConfig c;
  c.n_sites = n;
  return c;
}

// full-ring sum over every site, target mirrored about n/2
Eigen::VectorXd ring_transform(const Eigen::VectorXd& half_samples, const EnsembleConfig& cfg) {
  const int n = cfg.n_sites;
  Eigen::VectorXd out(n / 2 + 1);
  for (int p = 0; p <= n / 2; ++p) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += half_samples(std::min(i, n - i)) * std::cos(2.0 * std::numbers::pi * p * i / n);
    out(p) = 4.0 * acc / (n * qnd::gamma0(cfg));
  }
  return out;
}

qnd::TabulatedTarget table(int n, auto value) {
  qnd::TabulatedTarget t;
  for (int dr = 0; dr <= n / 2; ++dr) t.samples[dr] = value(dr);
  return t;
}

}  // namespace

TEST(Designer, SampleTargetRemovesTail) {
  const TargetSpec spec{qnd::ExponentialDecay{5.0}};
  const Eigen::VectorXd s = qnd::sample_target(spec, 200);
  ASSERT_EQ(s.size(), 101);
  EXPECT_NEAR(s.tail(10).mean(), 0.0, 1e-15);
  EXPECT_NEAR(s(0) - s(1), 1.0 - std::exp(-0.2), 1e-15);

  const Eigen::VectorXd a = qnd::sample_target(TargetSpec{qnd::AlgebraicDecay{0.7}}, 200);
  EXPECT_NEAR(a(0), a(1), 1e-15);  // max(dr, 1)
}

TEST(Designer, TransformMatchesRingSum) {
  const auto cfg = ring(40);
  for (const TargetSpec& spec : {TargetSpec{qnd::ExponentialDecay{3.0}}, TargetSpec{qnd::AlgebraicDecay{0.5}},
                                 TargetSpec{qnd::ModulatedAlgebraicDecay{0.7, 3}}}) {
    const Eigen::VectorXd s = qnd::sample_target(spec, cfg.n_sites);
    const auto raw = qnd::target_to_fractions(s, cfg);
    const Eigen::VectorXd direct = ring_transform(s, cfg).cwiseMax(0.0);
    EXPECT_LT((raw.values - direct).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Designer, SingleCosineSelectsOneMode) {
  const auto cfg = ring(32);
  for (int q : {1, 5, 11, 15}) {
    Eigen::VectorXd s(17);
    for (int dr = 0; dr <= 16; ++dr) s(dr) = std::cos(2.0 * std::numbers::pi * q * dr / 32);
    const auto raw = qnd::target_to_fractions(s, cfg);
    for (int p = 0; p <= 16; ++p)
      EXPECT_NEAR(raw.values(p), p == q ? 2.0 / qnd::gamma0(cfg) : 0.0, 1e-12) << "q=" << q << " p=" << p;
    EXPECT_NEAR(raw.clipped_mass, 0.0, 1e-12);
  }
}

TEST(Designer, ClippedMassCountsNegativeLobes) {
  const auto cfg = ring(16);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(9);
  s(1) = -1.0;  // cos(k) profile with negative sign: negative for k < pi/2
  const auto raw = qnd::target_to_fractions(s, cfg);
  EXPECT_GT(raw.clipped_mass, 0.0);
  EXPECT_LT(raw.clipped_mass, 1.0);
  EXPECT_GE(raw.values.minCoeff(), 0.0);
}

TEST(Designer, Poles) {
  const auto cfg = ring(200);
  EXPECT_NEAR(qnd::fraction_pole(0, cfg), 0.25, 1e-12);
  EXPECT_NEAR(qnd::fraction_pole(37, cfg), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(qnd::fraction_pole(100, cfg), 0.5, 1e-12);
  EXPECT_NEAR(qnd::weight_norm2(37, 200), 75.0, 1e-10);
}

TEST(Designer, ClosedFormMatchesBisection) {
  const auto cfg = ring(200);
  for (int p = 1; p < 100; ++p)
    for (double f : {0.01, 0.2, 0.5, 0.6}) {
      const double a = qnd::coupling_closed_form(f, p, cfg);
      const double b = qnd::coupling_for_fraction(f, p, cfg);
      ASSERT_NEAR(a, b, 1e-10) << "p=" << p << " f=" << f;
      ASSERT_NEAR(qnd::fraction_for_coupling(a, p, cfg), f, 1e-12);
    }
  EXPECT_THROW(qnd::coupling_for_fraction(0.7, 5, cfg), std::domain_error);
  EXPECT_EQ(qnd::coupling_for_fraction(0.0, 5, cfg), 0.0);
}

TEST(Designer, CouplingReproducesFractionInEngine) {
  const auto cfg = ring(64);
  for (int p : {0, 9, 32}) {
    const double f = 0.9 * qnd::fraction_pole(p, cfg) * 0.5;
    const double c = qnd::coupling_for_fraction(f, p, cfg);
    auto s = qnd::new_mixed_state(cfg);
    const auto d = qnd::apply_pulse(s, cfg, qnd::Pulse{p, qnd::Axis::z, c, 0.0});
    EXPECT_NEAR(d.achieved_fraction, f, 1e-10);
  }
}

TEST(Designer, ScaleHitsCmax) {
  const auto cfg = ring(200);
  const auto r = qnd::design(TargetSpec{qnd::ExponentialDecay{5.0}, 0.95}, cfg);
  EXPECT_NEAR(r.couplings.maxCoeff(), 0.95, 1e-11);
  EXPECT_EQ(r.fractions.size(), 101);
  EXPECT_EQ((r.couplings.array() > 0.0).count(), 101);
  EXPECT_LT(r.clipped_mass, 0.05);
  for (int p = 0; p <= 100; ++p) EXPECT_LT(r.fractions(p), qnd::fraction_pole(p, cfg));
}

TEST(Designer, Failures) {
  auto cfg = ring(16);
  qnd::RawFractions zero{Eigen::VectorXd::Zero(9), 0.0};
  EXPECT_THROW(qnd::fractions_to_couplings(zero, cfg, 0.9), qnd::DegenerateTarget);

  qnd::RawFractions one{Eigen::VectorXd::Ones(9), 0.0};
  cfg.optical_depth = 1.0;
  try {
    qnd::fractions_to_couplings(one, cfg, 0.95);
    FAIL() << "expected InfeasibleTarget";
  } catch (const qnd::InfeasibleTarget& e) {
    EXPECT_NEAR(e.max_achievable_coupling(), std::sqrt(0.5), 1e-15);
  }
  cfg.optical_depth = 33.0;
  EXPECT_NO_THROW(qnd::fractions_to_couplings(one, cfg, 0.95));
  EXPECT_THROW(qnd::fractions_to_couplings(one, cfg, -1.0), qnd::ConfigError);
}

TEST(Designer, TabulatedTargets) {
  const int n = 16;
  auto t = table(n, [](int dr) { return std::exp(-dr / 2.0); });
  EXPECT_NO_THROW(qnd::validate(TargetSpec{t}, n));
  const Eigen::VectorXd from_table = qnd::sample_target(TargetSpec{t}, n);
  const Eigen::VectorXd from_shape = qnd::sample_target(TargetSpec{qnd::ExponentialDecay{2.0}}, n);
  EXPECT_LT((from_table - from_shape).cwiseAbs().maxCoeff(), 1e-15);

  t.samples.erase(0);  // falls back to dr = 1
  EXPECT_NEAR(qnd::sample_target(TargetSpec{t}, n)(0), qnd::sample_target(TargetSpec{t}, n)(1), 1e-15);
  t.samples.erase(4);
  EXPECT_THROW(qnd::validate(TargetSpec{t}, n), qnd::ConfigError);
}

TEST(Designer, ParseTable) {
  std::istringstream ok("# dr, value\n0, 1.0\n1 0.5  # trailing\n\n2,0.25\n");
  const auto t = qnd::parse_tabulated_target(ok);
  ASSERT_EQ(t.samples.size(), 3u);
  EXPECT_DOUBLE_EQ(t.samples.at(1), 0.5);

  std::istringstream dup("1,0.5\n1,0.4\n");
  EXPECT_THROW(qnd::parse_tabulated_target(dup), qnd::ConfigError);
  std::istringstream three("1,0.5,2\n");
  EXPECT_THROW(qnd::parse_tabulated_target(three), qnd::ConfigError);
  std::istringstream frac("1.5,0.5\n");
  EXPECT_THROW(qnd::parse_tabulated_target(frac), qnd::ConfigError);
  EXPECT_THROW(qnd::read_tabulated_target("/nonexistent/table.csv"), qnd::ConfigError);
}

TEST(Designer, ValidateShapes) {
  EXPECT_THROW(qnd::validate(TargetSpec{qnd::ExponentialDecay{0.0}}, 16), qnd::ConfigError);
  EXPECT_THROW(qnd::validate(TargetSpec{qnd::AlgebraicDecay{-1.0}}, 16), qnd::ConfigError);
  EXPECT_THROW(qnd::validate(TargetSpec{qnd::ModulatedAlgebraicDecay{0.7, 0}}, 16), qnd::ConfigError);
  EXPECT_THROW(qnd::validate(TargetSpec{qnd::ExponentialDecay{5.0}, 0.0}, 16), qnd::ConfigError);
}

TEST(Designer, Deterministic) {
  const auto cfg = ring(200);
  const TargetSpec spec{qnd::AlgebraicDecay{0.7}};
  const auto a = qnd::design(spec, cfg);
  const auto b = qnd::design(spec, cfg);
  EXPECT_TRUE(a.couplings == b.couplings);
  EXPECT_TRUE(a.fractions == b.fractions);
  EXPECT_EQ(a.scale, b.scale);
}
