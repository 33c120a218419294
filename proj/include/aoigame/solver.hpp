#pragma once

// Discounted value iteration for the symmetric updating game, fixed-policy
// evaluation, and the unilateral best-response operator.

#include "aoigame/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace aoigame {

/// Rule applied when several grid actions attain the maximum.
enum class TieBreak { SmallestAction, LargestAction };

struct SolveConfig {
    double tolerance = 1e-9;
    long max_iterations = 100000;
    TieBreak tie_break = TieBreak::SmallestAction;
    /// Absolute slack under which two action values count as tied.
    double tie_tolerance = 1e-12;

    void validate() const {
        if (!(tolerance > 0.0)) throw std::domain_error("tolerance must be > 0");
        if (max_iterations < 1) throw std::domain_error("max_iterations must be >= 1");
    }
};

struct ValueFunction {
    std::vector<double> values;
    long iterations_run = 0;
    /// Sup-norm change of the last sweep.
    double final_residual = 0.0;
    bool converged = false;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t s) const { return values[s]; }
};

struct Solution {
    ValueFunction value;
    Policy policy;
};

/**
 * Reset-to-zero decision process shared by the symmetric game and the
 * best-response problem.
 *
 * In state s, grid action j advances the AoI with probability
 * advance_scale[s] * advance[j] and resets it to 0 otherwise. The expected
 * one-step reward is -(s+1) * advance_scale[s] * advance[j] - cost[j].
 */
struct ResetChainMdp {
    std::vector<double> actions;
    std::vector<double> advance;
    std::vector<double> cost;
    std::vector<double> advance_scale;
    double discount = 0.0;

    std::size_t states() const { return advance_scale.size(); }

    double reward(std::size_t s, std::size_t j) const {
        return -(static_cast<double>(s) + 1.0) * advance_scale[s] * advance[j] - cost[j];
    }

    std::size_t next(std::size_t s) const { return std::min(s + 1, states() - 1); }

    /// Action value of (s, j) against `v`.
    double q_value(std::size_t s, std::size_t j, const std::vector<double>& v) const {
        const double a = advance_scale[s] * advance[j];
        return reward(s, j) + discount * (a * v[next(s)] + (1.0 - a) * v[0]);
    }
};

/// The symmetric game in which every source plays the same p_i.
inline ResetChainMdp symmetric_game_mdp(const ModelParams& params, RewardKind kind) {
    params.validate();
    const ActionGrid grid(params.grid_size);
    ResetChainMdp mdp;
    mdp.actions = grid.values();
    mdp.discount = params.discount;
    mdp.advance.reserve(grid.size());
    mdp.cost.reserve(grid.size());
    for (double a : grid.values()) {
        mdp.advance.push_back(advance_probability(kind, a, params));
        mdp.cost.push_back(action_cost(kind, a, params));
    }
    mdp.advance_scale.assign(params.states(), 1.0);
    return mdp;
}

/**
 * One source deviating against N-1 sources frozen at `others`:
 * reward -(i+1)(1-a)(1-p_i)^{N-1} - c a, advance (1-a)(1-p_i)^{N-1}.
 */
inline ResetChainMdp best_response_mdp(const ModelParams& params, const Policy& others) {
    params.validate();
    if (others.size() != params.states())
        throw std::domain_error("policy length does not match delta_max");
    const ActionGrid grid(params.grid_size);
    ResetChainMdp mdp;
    mdp.actions = grid.values();
    mdp.discount = params.discount;
    for (double a : grid.values()) {
        mdp.advance.push_back(1.0 - a);
        mdp.cost.push_back(params.cost * a);
    }
    mdp.advance_scale.reserve(params.states());
    for (double p : others.probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("policy entry outside [0, 1]");
        mdp.advance_scale.push_back(std::pow(1.0 - p, params.n_sources - 1));
    }
    return mdp;
}

namespace detail {

/// Action-dependent part of q(s, j; v): q = gamma v0 + advance_j * slope_s - cost_j.
inline double action_slope(const ResetChainMdp& mdp, std::size_t s, const std::vector<double>& v) {
    return mdp.advance_scale[s] *
           (mdp.discount * (v[mdp.next(s)] - v[0]) - (static_cast<double>(s) + 1.0));
}

/// Greedy grid index for state s under the configured tie-break rule.
inline std::size_t greedy_action(const ResetChainMdp& mdp, std::size_t s,
                                 const std::vector<double>& v, const SolveConfig& config) {
    const std::size_t k = mdp.actions.size();
    const double slope = action_slope(mdp, s, v);
    auto q = [&](std::size_t j) { return mdp.advance[j] * slope - mdp.cost[j]; };
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) best = std::max(best, q(j));
    // Absolute tolerance, shrunk when the q-values themselves are below unit size.
    const double scale = std::min(1.0, std::max(std::abs(mdp.discount * v[0]), std::abs(best)));
    const double tol = config.tie_tolerance * scale;
    if (config.tie_break == TieBreak::SmallestAction) {
        for (std::size_t j = 0; j < k; ++j)
            if (q(j) >= best - tol) return j;
    } else {
        for (std::size_t j = k; j-- > 0;)
            if (q(j) >= best - tol) return j;
    }
    return 0;
}

} // namespace detail

/// One Bellman optimality sweep: out(s) = max_j q(s, j; v).
inline void bellman_optimality_sweep(const ResetChainMdp& mdp, const std::vector<double>& v,
                                     std::vector<double>& out) {
    const std::size_t n = mdp.states();
    const std::size_t k = mdp.actions.size();
    const double gamma = mdp.discount;
    const double* adv = mdp.advance.data();
    const double* cost = mdp.cost.data();
    out.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        const double slope = detail::action_slope(mdp, s, v);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) best = std::max(best, adv[j] * slope - cost[j]);
        out[s] = gamma * v[0] + best;
    }
}

/// Value iteration from the all-zero value function.
inline ValueFunction solve_values(const ResetChainMdp& mdp, const SolveConfig& config,
                                  std::vector<std::size_t>* greedy = nullptr) {
    config.validate();
    ValueFunction result;
    std::vector<double> v(mdp.states(), 0.0);
    std::vector<double> next;
    double residual = std::numeric_limits<double>::infinity();
    long it = 0;
    while (it < config.max_iterations) {
        bellman_optimality_sweep(mdp, v, next);
        ++it;
        residual = 0.0;
        for (std::size_t s = 0; s < v.size(); ++s)
            residual = std::max(residual, std::abs(next[s] - v[s]));
        v.swap(next);
        if (residual < config.tolerance) break;
    }
    result.values = std::move(v);
    result.iterations_run = it;
    result.final_residual = residual;
    result.converged = residual < config.tolerance;
    if (greedy) {
        greedy->resize(mdp.states());
        for (std::size_t s = 0; s < mdp.states(); ++s)
            (*greedy)[s] = detail::greedy_action(mdp, s, result.values, config);
    }
    return result;
}

inline Policy greedy_policy(const ResetChainMdp& mdp, const std::vector<std::size_t>& indices,
                            RewardKind kind, const ModelParams& params) {
    Policy policy;
    policy.kind = kind;
    policy.params_fingerprint = params.fingerprint();
    policy.probs.reserve(indices.size());
    for (std::size_t j : indices) policy.probs.push_back(mdp.actions[j]);
    return policy;
}

/**
 * Optimal symmetric policy of the game under `kind`.
 *
 * Non-convergence is not an error: the returned value function carries
 * converged == false and the last sweep's residual.
 */
inline Solution value_iteration(const ModelParams& params, RewardKind kind,
                                const SolveConfig& config = {}) {
    const ResetChainMdp mdp = symmetric_game_mdp(params, kind);
    std::vector<std::size_t> greedy;
    ValueFunction value = solve_values(mdp, config, &greedy);
    return {std::move(value), greedy_policy(mdp, greedy, kind, params)};
}

/// Evaluates a fixed policy by iterating the Bellman expectation update.
inline ValueFunction policy_value(const ModelParams& params, RewardKind kind, const Policy& policy,
                                  const SolveConfig& config = {}) {
    params.validate();
    config.validate();
    const std::size_t n = params.states();
    if (policy.size() != n) throw std::domain_error("policy length does not match delta_max");

    std::vector<double> reward(n), advance(n);
    for (std::size_t s = 0; s < n; ++s) {
        reward[s] = expected_reward(kind, static_cast<int>(s), policy.probs[s], params);
        advance[s] = advance_probability(kind, policy.probs[s], params);
    }

    ValueFunction result;
    std::vector<double> v(n, 0.0), next(n);
    const double gamma = params.discount;
    double residual = std::numeric_limits<double>::infinity();
    long it = 0;
    while (it < config.max_iterations) {
        residual = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t up = std::min(s + 1, n - 1);
            next[s] = reward[s] + gamma * (advance[s] * v[up] + (1.0 - advance[s]) * v[0]);
            residual = std::max(residual, std::abs(next[s] - v[s]));
        }
        v.swap(next);
        ++it;
        if (residual < config.tolerance) break;
    }
    result.values = std::move(v);
    result.iterations_run = it;
    result.final_residual = residual;
    result.converged = residual < config.tolerance;
    return result;
}

/// Sup-norm distance between `values` and one optimality sweep applied to it.
inline double bellman_residual(const ModelParams& params, RewardKind kind,
                               const std::vector<double>& values) {
    const ResetChainMdp mdp = symmetric_game_mdp(params, kind);
    if (values.size() != mdp.states()) throw std::domain_error("value length mismatch");
    std::vector<double> next;
    bellman_optimality_sweep(mdp, values, next);
    double worst = 0.0;
    for (std::size_t s = 0; s < values.size(); ++s)
        worst = std::max(worst, std::abs(next[s] - values[s]));
    return worst;
}

/// Optimal policy of a single source when the other N-1 play `others`.
inline Policy best_response(const ModelParams& params, const Policy& others,
                            const SolveConfig& config = {}) {
    const ResetChainMdp mdp = best_response_mdp(params, others);
    std::vector<std::size_t> greedy;
    solve_values(mdp, config, &greedy);
    return greedy_policy(mdp, greedy, RewardKind::Selfish, params);
}

/// max_i |BR(policy)_i - policy_i|; zero at a symmetric grid equilibrium.
inline double ne_residual(const ModelParams& params, const Policy& policy,
                          const SolveConfig& config = {}) {
    const Policy response = best_response(params, policy, config);
    double worst = 0.0;
    for (std::size_t s = 0; s < policy.size(); ++s)
        worst = std::max(worst, std::abs(response.probs[s] - policy.probs[s]));
    return worst;
}

} // namespace aoigame
