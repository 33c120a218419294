#include "aoigame/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

using namespace aoigame;

namespace {

ModelParams params_with(int n, double c, int delta_max = 20) {
    return ModelParams{n, c, 0.9, delta_max, 11};
}

} // namespace

TEST(ModelParams, RejectsInvalidInstances) {
    EXPECT_NO_THROW(ModelParams{}.validate());
    EXPECT_THROW((ModelParams{0, 1, 0.9, 10, 5}.validate()), std::domain_error);
    EXPECT_THROW((ModelParams{1, -1, 0.9, 10, 5}.validate()), std::domain_error);
    EXPECT_THROW((ModelParams{1, 1, 1.0, 10, 5}.validate()), std::domain_error);
    EXPECT_THROW((ModelParams{1, 1, -0.1, 10, 5}.validate()), std::domain_error);
    EXPECT_THROW((ModelParams{1, 1, 0.9, 1, 5}.validate()), std::domain_error);
    EXPECT_THROW((ModelParams{1, 1, 0.9, 10, 1}.validate()), std::domain_error);
}

TEST(ActionGrid, EndpointsAreExactAndSpacingUniform) {
    for (int k : {2, 3, 5, 11, 251, 1001}) {
        const ActionGrid grid(k);
        ASSERT_EQ(grid.size(), static_cast<std::size_t>(k));
        EXPECT_EQ(grid[0], 0.0);
        EXPECT_EQ(grid[grid.size() - 1], 1.0);
        EXPECT_DOUBLE_EQ(grid.step(), 1.0 / (k - 1));
        for (std::size_t j = 1; j < grid.size(); ++j) {
            EXPECT_LT(grid[j - 1], grid[j]);
            EXPECT_NEAR(grid[j] - grid[j - 1], grid.step(), 1e-15);
        }
    }
    EXPECT_THROW(ActionGrid(1), std::domain_error);
}

TEST(ExpectedReward, WorkedExamples) {
    EXPECT_EQ(expected_reward(RewardKind::Centralized, 0, 0.0, params_with(10, 7.0)), -1.0);
    EXPECT_EQ(expected_reward(RewardKind::Selfish, 9, 1.0, params_with(10, 50.0)), -50.0);
    EXPECT_DOUBLE_EQ(expected_reward(RewardKind::Global, 4, 0.5, params_with(2, 10.0)), -11.25);
}

TEST(ExpectedReward, DomainErrors) {
    const ModelParams p = params_with(3, 1.0, 5);
    EXPECT_THROW(expected_reward(RewardKind::Selfish, -1, 0.5, p), std::domain_error);
    EXPECT_THROW(expected_reward(RewardKind::Selfish, 5, 0.5, p), std::domain_error);
    EXPECT_THROW(expected_reward(RewardKind::Selfish, 0, -0.01, p), std::domain_error);
    EXPECT_THROW(expected_reward(RewardKind::Selfish, 0, 1.01, p), std::domain_error);
    EXPECT_THROW(transition_distribution(5, 0.5, RewardKind::Global, p), std::domain_error);
    EXPECT_THROW(transition_distribution(0, std::nan(""), RewardKind::Global, p), std::domain_error);
}

TEST(TransitionDistribution, WorkedExamples) {
    const ModelParams p = params_with(2, 1.0);
    for (RewardKind kind : all_kinds) {
        EXPECT_EQ(transition_distribution(3, 1.0, kind, p), (std::vector<Transition>{{0, 1.0}}));
        EXPECT_EQ(transition_distribution(3, 0.0, kind, p), (std::vector<Transition>{{4, 1.0}}));
    }
    EXPECT_EQ(transition_distribution(3, 0.5, RewardKind::Selfish, p),
              (std::vector<Transition>{{0, 0.75}, {4, 0.25}}));
}

TEST(TransitionDistribution, TopStateLoopsOnItself) {
    const ModelParams p = params_with(4, 1.0, 6);
    EXPECT_EQ(transition_distribution(5, 0.0, RewardKind::Selfish, p),
              (std::vector<Transition>{{5, 1.0}}));
    const auto mixed = transition_distribution(5, 0.25, RewardKind::Centralized, p);
    ASSERT_EQ(mixed.size(), 2u);
    EXPECT_EQ(mixed[1].next_state, 5);
}

// Randomized properties over (kind, N, c, state, action).
TEST(ModelProperties, KernelRewardAndCentralizedEquivalence) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> sources(1, 12), state(0, 29);
    for (int trial = 0; trial < 2000; ++trial) {
        const ModelParams p{sources(rng), 100.0 * unit(rng), 0.9, 30, 11};
        const int s = state(rng);
        const double a = trial % 10 == 0 ? std::round(unit(rng)) : unit(rng);
        for (RewardKind kind : all_kinds) {
            const auto dist = transition_distribution(s, a, kind, p);
            double total = 0.0;
            for (const auto& t : dist) {
                EXPECT_GE(t.probability, 0.0);
                EXPECT_LE(t.probability, 1.0);
                total += t.probability;
            }
            EXPECT_NEAR(total, 1.0, 1e-12);

            const double r = expected_reward(kind, s, a, p);
            EXPECT_LE(r, 0.0);
            if (s + 1 < p.delta_max) {
                EXPECT_LE(expected_reward(kind, s + 1, a, p), r);
            }
        }
        ModelParams single = p;
        single.n_sources = 1;
        EXPECT_EQ(expected_reward(RewardKind::Centralized, s, a, p),
                  expected_reward(RewardKind::Selfish, s, a, single));
        EXPECT_EQ(transition_distribution(s, a, RewardKind::Centralized, p),
                  transition_distribution(s, a, RewardKind::Selfish, single));
    }
}

TEST(ModelProperties, ZeroCostRewardPeaksAtFullTransmission) {
    const ModelParams p = params_with(5, 0.0);
    const ActionGrid grid(p.grid_size);
    for (RewardKind kind : all_kinds)
        for (int s = 0; s < p.delta_max; ++s) {
            const double best = expected_reward(kind, s, 1.0, p);
            EXPECT_EQ(best, 0.0);
            for (double a : grid.values()) EXPECT_LE(expected_reward(kind, s, a, p), best);
        }
}

TEST(Policy, SilentIsComplement) {
    const ModelParams p = params_with(2, 1.0, 4);
    Policy policy = Policy::constant(p, RewardKind::Global, 0.25);
    EXPECT_EQ(policy.size(), 4u);
    EXPECT_EQ(policy.silent(2), 0.75);
    EXPECT_EQ(policy.params_fingerprint, p.fingerprint());
}

TEST(RewardKind, NamesRoundTrip) {
    for (RewardKind kind : all_kinds) EXPECT_EQ(parse_kind(to_string(kind)), kind);
    EXPECT_FALSE(parse_kind("cooperative"));
}
