#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qnd/protocol.hpp"
#include "qnd/witness.hpp"

using qnd::EnsembleConfig;
using qnd::WitnessQuery;

namespace {

EnsembleConfig ring(int n) {
  EnsembleConfig c;
  c.n_sites = n;
  return c;
}

qnd::CovarianceStated squeezed(const EnsembleConfig& cfg) {
  const auto plan = qnd::build_plan(qnd::design(qnd::TargetSpec{qnd::ExponentialDecay{2.0}}, cfg), cfg);
  return qnd::run(plan, cfg).state;
}

}  // namespace

TEST(Witness, MixedStateValue) {
  for (double j : {0.5, 1.0, 1.5}) {
    auto cfg = ring(16);
    cfg.spin = j;
    const auto s = qnd::new_mixed_state(cfg);
    const double w = qnd::witness_value(s, cfg, WitnessQuery{{0, 1}, {5, 6, 7}, 0.4});
    EXPECT_NEAR(w, j * (j + 1) - 1.0, 1e-12);
  }
}

TEST(Witness, ValidateQuery) {
  EXPECT_THROW(qnd::validate(WitnessQuery{{}, {1}, 0.0}, 8), std::invalid_argument);
  EXPECT_THROW(qnd::validate(WitnessQuery{{0}, {}, 0.0}, 8), std::invalid_argument);
  EXPECT_THROW(qnd::validate(WitnessQuery{{0}, {8}, 0.0}, 8), std::out_of_range);
  EXPECT_THROW(qnd::validate(WitnessQuery{{0, 2}, {2}, 0.0}, 8), std::invalid_argument);
}

// product-state formula on a hand-built covariance
TEST(Witness, QuadraticForm) {
  const auto cfg = ring(8);
  auto s = qnd::new_mixed_state(cfg);
  const double g0 = qnd::gamma0(cfg);
  s[qnd::Axis::z](0, 3) = s[qnd::Axis::z](3, 0) = -0.5;
  for (double phi : {0.0, 1.0, std::numbers::pi}) {
    const double w = qnd::witness_value(s, cfg, WitnessQuery{{0}, {3}, phi});
    // (1/2) [3 g0 + 3 g0 + 2 cos(phi) (-0.5)] / n_a - 1
    const double expected = (3.0 * g0 - 0.5 * std::cos(phi)) / cfg.atoms_per_site - 1.0;
    EXPECT_NEAR(w, expected, 1e-13) << "phi=" << phi;
  }
}

TEST(Witness, ExchangeSymmetryInPhase) {
  const auto cfg = ring(24);
  const auto s = squeezed(cfg);
  for (double phi : {0.3, 1.7, 2.9}) {
    const double a = qnd::witness_value(s, cfg, WitnessQuery{{0}, {3, 4, 5}, phi});
    const double b = qnd::witness_value(s, cfg, WitnessQuery{{0}, {3, 4, 5}, -phi});
    EXPECT_NEAR(a, b, 1e-13);
    EXPECT_LT(std::abs(qnd::witness_detail(s, cfg, WitnessQuery{{0}, {3, 4, 5}, phi}).imaginary), 1e-13);
  }
}

TEST(Witness, ScanMatchesDirectEvaluation) {
  const auto cfg = ring(24);
  const auto s = squeezed(cfg);
  qnd::WitnessScanOptions opt;
  opt.single_bins = 2;
  opt.chain_bins = 5;
  opt.origin = 1;
  opt.phi_points = 8;
  const auto scan = qnd::witness_scan(s, cfg, opt);
  const int largest = 24 - 5 - 1 - 2 + 1;
  ASSERT_EQ(static_cast<int>(scan.minima.size()), largest);
  ASSERT_EQ(scan.cells.size(), scan.minima.size() * 8);
  for (const auto& cell : scan.cells) {
    WitnessQuery q = qnd::witness_geometry(cell.delta_r, opt, 24);
    q.phi = cell.phi;
    EXPECT_NEAR(cell.w, qnd::witness_value(s, cfg, q), 1e-12);
  }
  for (const auto& m : scan.minima) EXPECT_LE(m.w, m.w_at_zero_phase);
  const auto q = qnd::witness_geometry(3, opt, 24);
  EXPECT_EQ(q.s_bins, (std::vector<int>{1, 2}));
  EXPECT_EQ(q.w_bins.front(), 5);
}

TEST(Witness, GeometryLimits) {
  const auto cfg = ring(16);
  const auto s = qnd::new_mixed_state(cfg);
  qnd::WitnessScanOptions opt;
  opt.chain_bins = 10;
  EXPECT_THROW(qnd::witness_geometry(7, opt, 16), std::out_of_range);
  EXPECT_NO_THROW(qnd::witness_geometry(6, opt, 16));
  opt.delta_r_max = 7;
  EXPECT_THROW(qnd::witness_scan(s, cfg, opt), std::out_of_range);
  opt.delta_r_max = -1;
  opt.phi_points = 0;
  EXPECT_THROW(qnd::witness_scan(s, cfg, opt), std::invalid_argument);
  qnd::WitnessScanOptions defaults;
  EXPECT_EQ(qnd::witness_near_field_limit(defaults, 200), 47);
}
