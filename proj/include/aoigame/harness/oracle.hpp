#pragma once

#include "aoigame/model.hpp"
#include "aoigame/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace aoigame {

struct OracleResult {
    /// Per-state maximum of v_pi(s) over every enumerated policy.
    std::vector<double> best_values;
    /// Componentwise-smallest policy attaining best_values at every state.
    Policy best_policy;
    std::size_t policies_enumerated = 0;
};

/**
 * Exhaustive search over all k^delta_max stationary grid policies, each
 * evaluated with policy_value. Only meant for tiny instances.
 */
inline OracleResult brute_force_optimum(const ModelParams& params, RewardKind kind,
                                        SolveConfig eval = {1e-12, 1'000'000},
                                        double optimality_slack = 1e-9) {
    params.validate();
    const ActionGrid grid(params.grid_size);
    const std::size_t n = params.states();
    const std::size_t k = grid.size();
    double total = std::pow(static_cast<double>(k), static_cast<double>(n));
    if (total > 5e7) throw std::domain_error("instance too large for enumeration");

    std::vector<std::size_t> digits(n, 0);
    Policy candidate = Policy::constant(params, kind, 0.0);
    std::vector<std::vector<double>> evaluated;
    std::vector<std::vector<std::size_t>> index_of;
    evaluated.reserve(static_cast<std::size_t>(total));
    index_of.reserve(static_cast<std::size_t>(total));

    OracleResult result;
    result.best_values.assign(n, -std::numeric_limits<double>::infinity());
    while (true) {
        for (std::size_t s = 0; s < n; ++s) candidate.probs[s] = grid[digits[s]];
        ValueFunction v = policy_value(params, kind, candidate, eval);
        for (std::size_t s = 0; s < n; ++s)
            result.best_values[s] = std::max(result.best_values[s], v.values[s]);
        evaluated.push_back(std::move(v.values));
        index_of.push_back(digits);
        ++result.policies_enumerated;

        std::size_t pos = 0;
        while (pos < n && ++digits[pos] == k) digits[pos++] = 0;
        if (pos == n) break;
    }

    std::vector<std::size_t> smallest(n, k);
    for (std::size_t p = 0; p < evaluated.size(); ++p) {
        bool optimal = true;
        for (std::size_t s = 0; s < n && optimal; ++s)
            optimal = evaluated[p][s] >= result.best_values[s] - optimality_slack;
        if (!optimal) continue;
        for (std::size_t s = 0; s < n; ++s) smallest[s] = std::min(smallest[s], index_of[p][s]);
    }
    result.best_policy = Policy::constant(params, kind, 0.0);
    for (std::size_t s = 0; s < n; ++s) result.best_policy.probs[s] = grid[smallest[s]];
    return result;
}

} // namespace aoigame
