#include "aoigame/analysis.hpp"
#include "aoigame/montecarlo.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace aoigame;

TEST(SimConfig, Validation) {
    EXPECT_NO_THROW(SimConfig{}.validate());
    EXPECT_THROW((SimConfig{0, 0, 1, 1}.validate()), std::domain_error);
    EXPECT_THROW((SimConfig{100, 100, 1, 1}.validate()), std::domain_error);
    EXPECT_THROW((SimConfig{100, -1, 1, 1}.validate()), std::domain_error);
    EXPECT_THROW((SimConfig{100, 0, 1, 0}.validate()), std::domain_error);
    EXPECT_EQ(SimConfig::with_default_burn_in(5000, 3, 2).burn_in, 50);
}

TEST(Simulate, AlwaysTransmitIsExact) {
    const ModelParams p{10, 7.0, 0.99, 20, 11};
    for (RewardKind kind : all_kinds) {
        const SimEstimate e =
            simulate(Policy::constant(p, kind, 1.0), p, kind, SimConfig{10000, 100, 4, 3}, 1);
        const double cost = 7.0 * transmit_exponent(kind, p);
        EXPECT_EQ(e.avg_update, 1.0);
        EXPECT_EQ(e.avg_aoi, 0.0);
        EXPECT_EQ(e.avg_cost, cost);
        EXPECT_EQ(e.avg_reward, -cost);
        EXPECT_EQ(e.std_errors.avg_reward, 0.0);
        EXPECT_EQ(e.visit_frequency[0], 1.0);
    }
}

TEST(Simulate, NeverTransmitSticksAtTop) {
    const ModelParams p{3, 1.0, 0.99, 10, 11};
    const SimEstimate e = simulate(Policy::constant(p, RewardKind::Selfish, 0.0), p,
                                   RewardKind::Selfish, SimConfig{1000, 100, 4, 2}, 1);
    EXPECT_EQ(e.avg_aoi, 9.0);
    EXPECT_EQ(e.avg_reward, -10.0);
    EXPECT_EQ(e.avg_update, 0.0);
}

TEST(Simulate, DeterministicAcrossWorkerCounts) {
    const ModelParams p{10, 50.0, 0.99, 100, 11};
    Policy policy = Policy::constant(p, RewardKind::Selfish, 0.05);
    const SimConfig cfg{20000, 200, 12345, 4};
    const SimEstimate a = simulate(policy, p, RewardKind::Selfish, cfg, 1);
    const SimEstimate b = simulate(policy, p, RewardKind::Selfish, cfg, 3);
    EXPECT_EQ(a.avg_update, b.avg_update);
    EXPECT_EQ(a.avg_aoi, b.avg_aoi);
    EXPECT_EQ(a.avg_reward, b.avg_reward);
    EXPECT_EQ(a.visit_frequency, b.visit_frequency);
    const SimEstimate c = simulate(policy, p, RewardKind::Selfish, SimConfig{20000, 200, 12346, 4}, 1);
    EXPECT_NE(a.avg_aoi, c.avg_aoi);
}

TEST(SlotSimulator, ResetAndCostIdentity) {
    const ModelParams p{4, 2.5, 0.99, 12, 11};
    Policy policy = Policy::constant(p, RewardKind::Global, 0.2);
    SlotSimulator sim(policy, p, RewardKind::Global, replica_engine(99, 0));
    for (int t = 0; t < 20000; ++t) {
        const SlotOutcome s = sim.step();
        EXPECT_EQ(s.cost, 2.5 * s.transmitters);
        EXPECT_LE(s.transmitters, 4);
        if (s.transmitters > 0) {
            EXPECT_EQ(s.aoi_after, 0);
            EXPECT_EQ(s.aoi_reward, 0.0);
        } else {
            EXPECT_EQ(s.aoi_after, std::min(s.aoi_before + 1, 11));
            EXPECT_EQ(s.aoi_reward, -(s.aoi_before + 1.0));
        }
    }
    Policy bad = policy;
    bad.probs[3] = 2.0;
    EXPECT_THROW(SlotSimulator(bad, p, RewardKind::Global, replica_engine(1, 0)), std::domain_error);
}

TEST(Simulate, VisitFrequenciesApproachStationary) {
    const ModelParams p{5, 10.0, 0.99, 30, 11};
    Policy policy = Policy::constant(p, RewardKind::Selfish, 0.0);
    for (std::size_t i = 0; i < policy.size(); ++i) policy.probs[i] = std::min(1.0, 0.02 * i);
    const ChainStats exact = chain_metrics(policy, p, RewardKind::Selfish);
    const SimConfig cfg{200000, 2000, 77, 5};
    const SimEstimate e = simulate(policy, p, RewardKind::Selfish, cfg, 1);
    double tv = 0.0;
    for (std::size_t i = 0; i < policy.size(); ++i)
        tv += 0.5 * std::abs(e.visit_frequency[i] - exact.stationary[i]);
    EXPECT_LT(tv, 5.0 / std::sqrt(static_cast<double>(e.slots_effective)));
    EXPECT_NEAR(e.avg_aoi, exact.avg_aoi, 4.0 * e.std_errors.avg_aoi + 1e-9);
}
