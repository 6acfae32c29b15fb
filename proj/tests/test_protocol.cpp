#include <gtest/gtest.h>

#include "qnd/errors.hpp"
#include "qnd/protocol.hpp"

using qnd::Axis;
using qnd::EnsembleConfig;
using qnd::OrderPolicy;

namespace {

EnsembleConfig ring(int n, double d = qnd::kInfiniteDepth) {
  EnsembleConfig c;
  c.n_sites = n;
  c.optical_depth = d;
  return c;
}

qnd::DesignResult fake_design(std::initializer_list<double> couplings) {
  qnd::DesignResult r;
  r.couplings = Eigen::Map<const Eigen::VectorXd>(couplings.begin(), static_cast<Eigen::Index>(couplings.size()));
  r.fractions = Eigen::VectorXd::Zero(r.couplings.size());
  return r;
}

}  // namespace

TEST(Protocol, OrderPolicyNames) {
  for (auto p : {OrderPolicy::ascending_p, OrderPolicy::descending_p, OrderPolicy::descending_coupling})
    EXPECT_EQ(qnd::parse_order_policy(qnd::to_string(p)), p);
  EXPECT_THROW(qnd::parse_order_policy("random"), qnd::ConfigError);
}

TEST(Protocol, PlanSkipsInactiveModesAndOrdersAxes) {
  const auto design = fake_design({0.2, 0.0, 0.5, 0.1, 0.0});
  const auto plan = qnd::build_plan(design, ring(8));
  ASSERT_EQ(plan.pulses.size(), 9u);
  EXPECT_EQ(plan.pulses[0].p, 0);
  EXPECT_EQ(plan.pulses[0].axis, Axis::z);
  EXPECT_EQ(plan.pulses[1].axis, Axis::x);
  EXPECT_EQ(plan.pulses[2].axis, Axis::y);
  EXPECT_EQ(plan.pulses[3].p, 2);
  EXPECT_EQ(plan.pulses[8].p, 3);
  EXPECT_EQ(plan.total_eta, 0.0);

  const auto desc = qnd::build_plan(design, ring(8), OrderPolicy::descending_p);
  EXPECT_EQ(desc.pulses.front().p, 3);
  const auto by_c = qnd::build_plan(design, ring(8), OrderPolicy::descending_coupling);
  EXPECT_EQ(by_c.pulses.front().p, 2);
  EXPECT_EQ(by_c.pulses.back().p, 3);
}

TEST(Protocol, EtaFromOpticalDepth) {
  const auto plan = qnd::build_plan(fake_design({0.0, 0.9, 0.0, 0.0, 0.0}), ring(8, 33.0));
  ASSERT_EQ(plan.pulses.size(), 3u);
  EXPECT_NEAR(plan.pulses[0].eta, 0.81 / 33.0, 1e-15);
  EXPECT_NEAR(plan.total_eta, 3 * 0.81 / 33.0, 1e-15);
  EXPECT_THROW(qnd::build_plan(fake_design({0.0, 0.9, 0.0, 0.0, 0.0}), ring(8, 1.0)), qnd::InfeasibleTarget);
}

TEST(Protocol, DegenerateAndMismatched) {
  EXPECT_THROW(qnd::build_plan(fake_design({0.0, 0.0, 0.0, 0.0, 0.0}), ring(8)), qnd::DegenerateTarget);
  EXPECT_THROW(qnd::build_plan(fake_design({0.1, 0.1}), ring(8)), std::invalid_argument);
}

TEST(Protocol, RunCallsObserverAndReports) {
  const auto cfg = ring(16, 50.0);
  const auto design = qnd::design(qnd::TargetSpec{qnd::ExponentialDecay{2.0}}, cfg);
  const auto plan = qnd::build_plan(design, cfg);
  std::size_t calls = 0;
  const auto result = qnd::run(plan, cfg, [&](std::size_t i, const qnd::CovarianceStated& s, const qnd::TraceEntry& e) {
    EXPECT_EQ(i, calls++);
    EXPECT_EQ(e.feedback.p, e.pulse.p);
    EXPECT_EQ(s.n_sites(), 16);
  });
  EXPECT_EQ(calls, plan.pulses.size());
  EXPECT_EQ(result.report.trace.size(), plan.pulses.size());
  EXPECT_EQ(result.report.correlation.size(), 9);
  EXPECT_EQ(result.report.total_spectrum.size(), 16);
  EXPECT_NO_THROW(qnd::require_invariants(result.state, cfg));
  // measurement-induced squeezing anticorrelates neighbours
  EXPECT_LT(result.report.correlation(1), 0.0);
}

TEST(Protocol, RunIsDeterministic) {
  const auto cfg = ring(24, 99.0);
  const auto plan = qnd::build_plan(qnd::design(qnd::TargetSpec{qnd::AlgebraicDecay{0.7}}, cfg), cfg);
  const auto a = qnd::run(plan, cfg);
  const auto b = qnd::run(plan, cfg);
  for (int k = 0; k < 3; ++k) EXPECT_TRUE(a.state.g[k] == b.state.g[k]);
}
