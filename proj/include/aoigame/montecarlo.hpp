#pragma once

// Slot-by-slot Monte-Carlo simulation of N sources applying a shared policy.
// Serves as a stochastic oracle for the exact chain metrics.

#include "aoigame/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace aoigame {

struct SimConfig {
    long slots = 1'000'000;
    long burn_in = 10'000;
    std::uint64_t seed = 1;
    int replicas = 10;

    void validate() const {
        if (slots < 1) throw std::domain_error("slots must be >= 1");
        if (burn_in < 0 || burn_in >= slots) throw std::domain_error("burn_in must lie in [0, slots)");
        if (replicas < 1) throw std::domain_error("replicas must be >= 1");
    }

    /// Burn-in defaults to 1% of the horizon.
    static SimConfig with_default_burn_in(long slots, std::uint64_t seed, int replicas) {
        return SimConfig{slots, slots / 100, seed, replicas};
    }
};

/// Metric quadruple in the order (update, aoi, cost, reward).
struct MetricSet {
    double avg_update = 0.0;
    double avg_aoi = 0.0;
    double avg_cost = 0.0;
    double avg_reward = 0.0;
};

struct SimEstimate {
    double avg_update = 0.0;
    double avg_aoi = 0.0;
    double avg_cost = 0.0;
    double avg_reward = 0.0;
    /// Across-replica standard errors of the four estimates above.
    MetricSet std_errors;
    std::uint64_t seed = 0;
    long slots_effective = 0;
    /// Pooled empirical per-state visit frequencies after burn-in.
    std::vector<double> visit_frequency;
    std::string rng = "mt19937_64/seed_seq(seed_lo,seed_hi,replica)";
};

/// Independent stream for one replica, derived from (seed, replica).
inline std::mt19937_64 replica_engine(std::uint64_t seed, int replica) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(replica)};
    return std::mt19937_64(seq);
}

struct SlotOutcome {
    int aoi_before = 0;
    int transmitters = 0;
    int aoi_after = 0;
    double cost = 0.0;
    /// -(aoi + 1) when nobody transmits, 0 otherwise.
    double aoi_reward = 0.0;
};

/**
 * The slotted dynamics. Each of the E transmitters (N for distributed
 * kinds, 1 for Centralized) independently transmits with probability
 * p_aoi; any transmission resets the AoI, otherwise it grows and is clamped
 * at delta_max - 1.
 */
class SlotSimulator {
  public:
    SlotSimulator(const Policy& policy, const ModelParams& params, RewardKind kind,
                  std::mt19937_64 engine)
        : probs_(policy.probs), top_(params.delta_max - 1),
          transmitters_(transmit_exponent(kind, params)), cost_(params.cost),
          engine_(std::move(engine)) {
        params.validate();
        if (policy.size() != params.states())
            throw std::domain_error("policy length does not match delta_max");
        for (double p : probs_)
            if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("policy entry outside [0, 1]");
    }

    int aoi() const { return aoi_; }

    SlotOutcome step() {
        SlotOutcome out;
        out.aoi_before = aoi_;
        const double p = probs_[static_cast<std::size_t>(aoi_)];
        if (p >= 1.0) {
            out.transmitters = transmitters_;
        } else if (p > 0.0) {
            for (int k = 0; k < transmitters_; ++k)
                if (uniform_(engine_) < p) ++out.transmitters;
        }
        out.cost = cost_ * out.transmitters;
        if (out.transmitters > 0) {
            aoi_ = 0;
        } else {
            out.aoi_reward = -(aoi_ + 1.0);
            aoi_ = std::min(aoi_ + 1, top_);
        }
        out.aoi_after = aoi_;
        return out;
    }

  private:
    std::vector<double> probs_;
    int top_;
    int transmitters_;
    double cost_;
    int aoi_ = 0;
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

namespace detail {

struct ReplicaResult {
    MetricSet metrics;
    std::vector<long> visits;
};

inline ReplicaResult run_replica(const Policy& policy, const ModelParams& params, RewardKind kind,
                                 const SimConfig& sim, int replica) {
    SlotSimulator simulator(policy, params, kind, replica_engine(sim.seed, replica));
    ReplicaResult r;
    r.visits.assign(params.states(), 0);
    double updates = 0.0, aoi = 0.0, cost = 0.0, aoi_reward = 0.0;
    for (long t = 0; t < sim.slots; ++t) {
        const SlotOutcome slot = simulator.step();
        if (t < sim.burn_in) continue;
        ++r.visits[static_cast<std::size_t>(slot.aoi_before)];
        updates += slot.transmitters > 0 ? 1.0 : 0.0;
        aoi += slot.aoi_before;
        cost += slot.cost;
        aoi_reward += slot.aoi_reward;
    }
    const double n = static_cast<double>(sim.slots - sim.burn_in);
    r.metrics = {updates / n, aoi / n, cost / n, (aoi_reward - cost) / n};
    return r;
}

inline double standard_error(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

} // namespace detail

/**
 * Replica-averaged estimates of the long-run metrics. Replicas run on up to
 * `workers` threads (0 picks the hardware concurrency); the fold over
 * replicas is in index order, so the result does not depend on scheduling.
 */
inline SimEstimate simulate(const Policy& policy, const ModelParams& params, RewardKind kind,
                            const SimConfig& sim, unsigned workers = 0) {
    sim.validate();
    params.validate();
    std::vector<detail::ReplicaResult> results(static_cast<std::size_t>(sim.replicas));
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(sim.replicas));
    if (workers <= 1) {
        for (int r = 0; r < sim.replicas; ++r)
            results[static_cast<std::size_t>(r)] = detail::run_replica(policy, params, kind, sim, r);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (int r = static_cast<int>(w); r < sim.replicas; r += static_cast<int>(workers))
                    results[static_cast<std::size_t>(r)] =
                        detail::run_replica(policy, params, kind, sim, r);
            });
    }

    SimEstimate est;
    est.seed = sim.seed;
    est.slots_effective = (sim.slots - sim.burn_in) * sim.replicas;
    std::vector<double> upd, aoi, cost, rew;
    std::vector<long> visits(params.states(), 0);
    for (const auto& r : results) {
        upd.push_back(r.metrics.avg_update);
        aoi.push_back(r.metrics.avg_aoi);
        cost.push_back(r.metrics.avg_cost);
        rew.push_back(r.metrics.avg_reward);
        for (std::size_t s = 0; s < visits.size(); ++s) visits[s] += r.visits[s];
    }
    auto mean = [](const std::vector<double>& xs) {
        double m = 0.0;
        for (double x : xs) m += x;
        return m / static_cast<double>(xs.size());
    };
    est.avg_update = mean(upd);
    est.avg_aoi = mean(aoi);
    est.avg_cost = mean(cost);
    est.avg_reward = mean(rew);
    est.std_errors = {detail::standard_error(upd), detail::standard_error(aoi),
                      detail::standard_error(cost), detail::standard_error(rew)};
    est.visit_frequency.resize(visits.size());
    for (std::size_t s = 0; s < visits.size(); ++s)
        est.visit_frequency[s] =
            static_cast<double>(visits[s]) / static_cast<double>(est.slots_effective);
    return est;
}

} // namespace aoigame
