#pragma once

// Game instance, one-step rewards and the AoI transition kernel of the
// multi-source updating game. Everything downstream speaks this vocabulary.

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aoigame {

/// Reward regime. Centralized behaves as a single coordinated source.
enum class RewardKind { Selfish, Global, Centralized };

inline constexpr RewardKind all_kinds[] = {RewardKind::Selfish, RewardKind::Global,
                                           RewardKind::Centralized};

inline std::string to_string(RewardKind kind) {
    switch (kind) {
    case RewardKind::Selfish: return "selfish";
    case RewardKind::Global: return "global";
    case RewardKind::Centralized: return "centralized";
    }
    return "unknown";
}

inline std::optional<RewardKind> parse_kind(std::string_view text) {
    if (text == "selfish") return RewardKind::Selfish;
    if (text == "global") return RewardKind::Global;
    if (text == "centralized") return RewardKind::Centralized;
    return std::nullopt;
}

/// 1 for the distributed kinds, 0 for Centralized.
inline constexpr int distributed_indicator(RewardKind kind) {
    return kind == RewardKind::Centralized ? 0 : 1;
}

/**
 * One instance of the updating game.
 *
 * States are the AoI values {0, ..., delta_max - 1}; the top state loops on
 * itself when nobody transmits.
 */
struct ModelParams {
    int n_sources = 10;
    double cost = 50.0;
    double discount = 0.99;
    int delta_max = 1000;
    int grid_size = 251;

    /// Throws std::domain_error describing the first violated invariant.
    void validate() const {
        if (n_sources < 1) throw std::domain_error("n_sources must be >= 1");
        if (!(cost >= 0.0) || !std::isfinite(cost))
            throw std::domain_error("cost must be a finite non-negative number");
        if (!(discount >= 0.0 && discount < 1.0))
            throw std::domain_error("discount must lie in [0, 1)");
        if (delta_max < 2) throw std::domain_error("delta_max must be >= 2");
        if (grid_size < 2) throw std::domain_error("grid_size must be >= 2");
    }

    /// Opaque identifier binding derived artifacts (policies) to this instance.
    std::string fingerprint() const {
        std::ostringstream out;
        out.precision(17);
        out << "n=" << n_sources << ";c=" << cost << ";gamma=" << discount
            << ";dmax=" << delta_max << ";k=" << grid_size;
        return out.str();
    }

    std::size_t states() const { return static_cast<std::size_t>(delta_max); }
};

/// Number of independent transmitters driving the kernel: N, or 1 for Centralized.
inline int transmit_exponent(RewardKind kind, const ModelParams& params) {
    return kind == RewardKind::Centralized ? 1 : params.n_sources;
}

/// Multiplier of c in the one-step reward: N for Global, 1 otherwise.
inline int cost_multiplier(RewardKind kind, const ModelParams& params) {
    return kind == RewardKind::Global ? params.n_sources : 1;
}

/// Admissible transmission probabilities {0, 1/(k-1), ..., 1}, generated once.
class ActionGrid {
  public:
    explicit ActionGrid(int grid_size) : grid_size_(grid_size) {
        if (grid_size < 2) throw std::domain_error("grid_size must be >= 2");
        step_ = 1.0 / static_cast<double>(grid_size - 1);
        values_.resize(static_cast<std::size_t>(grid_size));
        for (int j = 0; j < grid_size; ++j)
            values_[static_cast<std::size_t>(j)] =
                static_cast<double>(j) / static_cast<double>(grid_size - 1);
        values_.front() = 0.0;
        values_.back() = 1.0;
    }

    int grid_size() const { return grid_size_; }
    double step() const { return step_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t j) const { return values_[j]; }
    const std::vector<double>& values() const { return values_; }

  private:
    int grid_size_;
    double step_;
    std::vector<double> values_;
};

/// Per-state transmission probabilities p_i shared by every source.
struct Policy {
    std::vector<double> probs;
    RewardKind kind = RewardKind::Selfish;
    std::string params_fingerprint;

    std::size_t size() const { return probs.size(); }
    double transmit(std::size_t state) const { return probs.at(state); }
    /// sigma_i, the probability that one source stays silent.
    double silent(std::size_t state) const { return 1.0 - probs.at(state); }

    static Policy constant(const ModelParams& params, RewardKind kind, double p) {
        return Policy{std::vector<double>(params.states(), p), kind, params.fingerprint()};
    }
};

namespace detail {

inline void check_state_action(int state, double action, const ModelParams& params) {
    if (state < 0 || state >= params.delta_max)
        throw std::domain_error("state " + std::to_string(state) + " outside [0, " +
                                std::to_string(params.delta_max) + ")");
    if (!(action >= 0.0 && action <= 1.0))
        throw std::domain_error("action must lie in [0, 1]");
}

} // namespace detail

/// Probability that nobody transmits, i.e. that the AoI advances.
inline double advance_probability(RewardKind kind, double action, const ModelParams& params) {
    return std::pow(1.0 - action, transmit_exponent(kind, params));
}

/// Expected transmission cost charged in the one-step reward.
inline double action_cost(RewardKind kind, double action, const ModelParams& params) {
    return cost_multiplier(kind, params) * params.cost * action;
}

/**
 * Expected one-step reward of playing `action` in AoI state `state`.
 *
 * Selfish:     -(i+1)(1-p)^N - c p
 * Centralized: -(i+1)(1-p)   - c p
 * Global:      -(i+1)(1-p)^N - N c p
 */
inline double expected_reward(RewardKind kind, int state, double action,
                              const ModelParams& params) {
    detail::check_state_action(state, action, params);
    return -(state + 1.0) * advance_probability(kind, action, params) -
           action_cost(kind, action, params);
}

struct Transition {
    int next_state;
    double probability;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Successor of `state` when nobody transmits; the top state loops.
inline int advance_target(int state, const ModelParams& params) {
    return state + 1 < params.delta_max ? state + 1 : params.delta_max - 1;
}

/**
 * Support of the next-state distribution. Zero-probability branches are
 * dropped, so a certain reset or a certain advance yields one entry.
 */
inline std::vector<Transition> transition_distribution(int state, double action, RewardKind kind,
                                                       const ModelParams& params) {
    detail::check_state_action(state, action, params);
    const double advance = advance_probability(kind, action, params);
    const double reset = 1.0 - advance;
    std::vector<Transition> out;
    if (reset > 0.0) out.push_back({0, reset});
    if (advance > 0.0) out.push_back({advance_target(state, params), advance});
    return out;
}

} // namespace aoigame
