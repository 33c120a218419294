#pragma once

// Long-run behavior of a policy-induced reset chain and checks of the
// structural properties of optimal policies.

#include "aoigame/model.hpp"
#include "aoigame/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace aoigame {

struct ChainStats {
    std::vector<double> update_probs;
    std::vector<double> stationary;
    double avg_update = 0.0;
    double avg_aoi = 0.0;
    /// Stored non-negative; avg_reward subtracts it.
    double avg_cost = 0.0;
    double avg_reward = 0.0;
    double boundary_mass = 0.0;
};

/// u_i = 1 - (1 - p_i)^E: probability that the AoI resets from state i.
inline std::vector<double> update_probabilities(const Policy& policy, const ModelParams& params,
                                                RewardKind kind) {
    if (policy.size() != params.states())
        throw std::domain_error("policy length does not match delta_max");
    const int exponent = transmit_exponent(kind, params);
    std::vector<double> u;
    u.reserve(policy.size());
    for (double p : policy.probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("policy entry outside [0, 1]");
        u.push_back(1.0 - std::pow(1.0 - p, exponent));
    }
    return u;
}

/**
 * Unnormalized occupation masses m_i = prod_{j<i} (1 - u_j) of the
 * reset-to-zero chain, with the top state's self-loop folded in as
 * m_top = prod_{j<top} (1 - u_j) / u_top.
 *
 * When every u_i is 1 up to the top this satisfies sum_i m_i u_i = 1.
 */
inline std::vector<double> occupation_masses(const std::vector<double>& u) {
    if (u.empty()) throw std::domain_error("empty update-probability sequence");
    for (double x : u)
        if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("update probability outside [0, 1]");
    const std::size_t top = u.size() - 1;
    std::vector<double> m(u.size());
    double survive = 1.0;
    for (std::size_t i = 0; i < top; ++i) {
        m[i] = survive;
        survive *= 1.0 - u[i];
    }
    if (u[top] > 0.0) {
        m[top] = survive / u[top];
    } else if (survive > 0.0) {
        throw std::domain_error("no stationary distribution: absorbing boundary");
    } else {
        m[top] = 0.0;
    }
    return m;
}

inline std::vector<double> stationary_distribution(const std::vector<double>& update_probs) {
    std::vector<double> pi = occupation_masses(update_probs);
    const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& x : pi) x /= total;
    return pi;
}

/// Exact long-run metrics of the chain induced by `policy`.
inline ChainStats chain_metrics(const Policy& policy, const ModelParams& params, RewardKind kind) {
    ChainStats stats;
    stats.update_probs = update_probabilities(policy, params, kind);
    stats.stationary = stationary_distribution(stats.update_probs);
    const int exponent = transmit_exponent(kind, params);
    const double multiplier = 1.0 + (params.n_sources - 1) * distributed_indicator(kind);
    double aoi_term = 0.0;
    for (std::size_t i = 0; i < policy.size(); ++i) {
        const double pi = stats.stationary[i];
        const double p = policy.probs[i];
        stats.avg_update += pi * stats.update_probs[i];
        stats.avg_aoi += pi * static_cast<double>(i);
        stats.avg_cost += pi * multiplier * params.cost * p;
        aoi_term += pi * (static_cast<double>(i) + 1.0) * std::pow(1.0 - p, exponent);
    }
    stats.avg_reward = -aoi_term - stats.avg_cost;
    stats.boundary_mass = stats.stationary.back();
    return stats;
}

/// Optimal single-source threshold max(0, ceil(sqrt(2c) - 1)).
inline int centralized_threshold(double cost) {
    if (!(cost >= 0.0)) throw std::domain_error("cost must be non-negative");
    return std::max(0, static_cast<int>(std::ceil(std::sqrt(2.0 * cost) - 1.0)));
}

struct HardThreshold {
    std::size_t threshold;
};

/// Gradual policy. Empty optionals mean the policy never crosses that level.
struct Smooth {
    std::optional<std::size_t> first_nonzero;
    std::optional<std::size_t> first_saturated;
};

struct ThresholdReport {
    std::variant<HardThreshold, Smooth> shape;
    double epsilon = 1e-3;

    bool is_hard() const { return std::holds_alternative<HardThreshold>(shape); }
    std::optional<std::size_t> threshold() const {
        if (const auto* hard = std::get_if<HardThreshold>(&shape)) return hard->threshold;
        return std::nullopt;
    }
};

inline ThresholdReport extract_threshold(const std::vector<double>& probs, double epsilon = 1e-3) {
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::domain_error("epsilon must lie in (0, 0.5)");
    ThresholdReport report{Smooth{}, epsilon};
    std::optional<std::size_t> first_nonzero, first_saturated;
    bool binary = true;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = probs[i];
        if (p > epsilon && !first_nonzero) first_nonzero = i;
        if (p > 1.0 - epsilon && !first_saturated) first_saturated = i;
        if (p >= epsilon && p <= 1.0 - epsilon) binary = false;
    }
    if (binary && first_saturated) {
        bool single_switch = true;
        for (std::size_t i = *first_saturated; i < probs.size(); ++i)
            if (probs[i] < epsilon) single_switch = false;
        if (single_switch) {
            report.shape = HardThreshold{*first_saturated};
            return report;
        }
    }
    report.shape = Smooth{first_nonzero, first_saturated};
    return report;
}

struct TheoryCheckResult {
    std::string check_name;
    bool passed = true;
    double worst_violation = 0.0;
    std::string details;
};

/**
 * Bounded value differences: Kbar(s2) - Kbar(s1) <= s2 - s1 over all pairs of
 * states carrying stationary mass above `mass_floor`, with Kbar = -v of the
 * solved policy. At finite discount the check allows 10 (1 - gamma) delta_max.
 *
 * worst_violation is the largest excess over s2 - s1 (0 when none).
 */
inline TheoryCheckResult verify_theorem2(const ModelParams& params, RewardKind kind,
                                         const SolveConfig& config = {},
                                         double mass_floor = 1e-9) {
    TheoryCheckResult result;
    result.check_name = "theorem2/" + to_string(kind);
    const Solution solved = value_iteration(params, kind, config);
    const ValueFunction evaluated = policy_value(params, kind, solved.policy, config);
    const ChainStats stats = chain_metrics(solved.policy, params, kind);
    const double tol = 10.0 * (1.0 - params.discount) * params.delta_max;

    std::vector<std::size_t> recurrent;
    for (std::size_t s = 0; s < stats.stationary.size(); ++s)
        if (stats.stationary[s] > mass_floor) recurrent.push_back(s);

    double worst = 0.0;
    std::size_t worst_s1 = 0, worst_s2 = 0;
    for (std::size_t a = 0; a < recurrent.size(); ++a) {
        for (std::size_t b = a + 1; b < recurrent.size(); ++b) {
            const std::size_t s1 = recurrent[a], s2 = recurrent[b];
            const double diff = -evaluated.values[s2] + evaluated.values[s1];
            const double excess = diff - static_cast<double>(s2 - s1);
            if (excess > worst) {
                worst = excess;
                worst_s1 = s1;
                worst_s2 = s2;
            }
        }
    }
    result.worst_violation = worst;
    result.passed = worst <= tol;
    std::ostringstream out;
    out << "c=" << params.cost << " N=" << params.n_sources << " gamma=" << params.discount
        << " recurrent_states=" << recurrent.size() << " tolerance=" << tol;
    if (worst > 0.0) out << " worst_pair=(" << worst_s1 << "," << worst_s2 << ")";
    result.details = out.str();
    return result;
}

/**
 * Plugs sigma_i = 1 - p_i and y_i = sigma_i^N into
 *   Kbar(i) = m c (1 - sigma_i) + y_i (i + 1) + gamma Kbar(0) (1 - y_i) + gamma y_i Kbar(i+1)
 * at every interior state (0 < p_i < 1), m being the kind's cost multiplier.
 * The AoI term is charged in the current slot, as in expected_reward.
 * worst_violation is the largest residual relative to 1 + |Kbar(i)|.
 */
inline TheoryCheckResult verify_implicit_equation(const ModelParams& params, RewardKind kind,
                                                  const Policy& policy,
                                                  const std::vector<double>& values,
                                                  double rel_tolerance = 1e-6) {
    TheoryCheckResult result;
    result.check_name = "implicit/" + to_string(kind);
    const std::size_t n = params.states();
    if (policy.size() != n || values.size() != n)
        throw std::domain_error("policy/value length does not match delta_max");
    const int exponent = transmit_exponent(kind, params);
    const double unit_cost = cost_multiplier(kind, params) * params.cost;
    const double gamma = params.discount;
    auto kbar = [&](std::size_t s) { return -values[s]; };

    double worst = 0.0;
    std::size_t interior = 0, worst_state = 0;
    double worst_sigma = 0.0, worst_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = policy.probs[i];
        if (!(p > 0.0 && p < 1.0)) continue;
        ++interior;
        const double sigma = 1.0 - p;
        const double y = std::pow(sigma, exponent);
        const std::size_t up = std::min(i + 1, n - 1);
        const double rhs = unit_cost * (1.0 - sigma) + y * (static_cast<double>(i) + 1.0) +
                           gamma * kbar(0) * (1.0 - y) + gamma * y * kbar(up);
        const double rel = std::abs(kbar(i) - rhs) / (1.0 + std::abs(kbar(i)));
        if (rel > worst) {
            worst = rel;
            worst_state = i;
            worst_sigma = sigma;
            worst_y = y;
        }
    }
    result.worst_violation = worst;
    result.passed = worst <= rel_tolerance;
    std::ostringstream out;
    out << "interior_states=" << interior;
    if (interior > 0) {
        out.precision(10);
        out << " worst_state=" << worst_state << " sigma=" << worst_sigma << " y=" << worst_y;
    }
    result.details = out.str();
    return result;
}

/**
 * p_{i+1} >= p_i - 1e-12 for every i. With `exclude_boundary` the pair
 * ending at the truncated top state is skipped.
 */
inline TheoryCheckResult verify_monotonicity(const std::vector<double>& probs,
                                             bool exclude_boundary = false) {
    TheoryCheckResult result;
    result.check_name = "monotonicity";
    constexpr double slack = 1e-12;
    std::size_t last = probs.size();
    if (exclude_boundary && last > 0) --last;
    double worst = 0.0;
    std::size_t worst_state = 0;
    for (std::size_t i = 0; i + 1 < last; ++i) {
        const double drop = probs[i] - probs[i + 1];
        if (drop > worst) {
            worst = drop;
            worst_state = i;
        }
    }
    result.worst_violation = worst;
    result.passed = worst <= slack;
    if (!result.passed) result.details = "first worst drop at state " + std::to_string(worst_state);
    return result;
}

} // namespace aoigame
