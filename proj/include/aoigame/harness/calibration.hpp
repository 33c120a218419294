#pragma once

// Picks the discount factor whose solved curves best match published
// reference curves for N = 10 sources. The reference values below are the
// plotted data points (single precision) of the selfish update-probability
// curve at c = 50 and of the centralized average update probability versus c.

#include "aoigame/analysis.hpp"
#include "aoigame/model.hpp"
#include "aoigame/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

namespace aoigame {

namespace reference_data {

struct CurvePoint {
    int state;
    double update_prob;
};

/// Selfish u_i versus AoI, N = 10, c = 50.
inline constexpr CurvePoint selfish_u_c50[] = {
    {1, 0.114155292510986},   {2, 0.363532662391663},   {3, 0.485286235809326},
    {5, 0.62060558795929},    {10, 0.769648432731628},  {20, 0.86375880241394},
    {50, 0.939801573753357},  {100, 0.968873262405396}, {200, 0.984638094902039},
    {500, 0.994113326072693},
};

struct StepPoint {
    double cost;
    int threshold;
};

/// Centralized hard threshold versus c, N = 10 (read off U_bar = 1/(threshold+1)).
inline constexpr StepPoint centralized_steps[] = {
    {10, 4},   {14, 4},   {16, 5},   {18, 5},   {20, 6},   {24, 6},   {26, 7},   {32, 7},
    {34, 8},   {38, 8},   {40, 9},   {46, 9},   {48, 10},  {56, 10},  {58, 11},  {64, 11},
    {66, 12},  {74, 12},  {76, 13},  {84, 13},  {86, 14},  {96, 14},  {98, 15},  {106, 15},
    {108, 16}, {118, 16}, {120, 17}, {130, 17}, {132, 18}, {142, 18}, {144, 19}, {156, 19},
    {158, 20}, {168, 20}, {170, 21}, {182, 21}, {184, 22}, {196, 22}, {198, 23},
};

} // namespace reference_data

struct CalibrationEntry {
    double gamma = 0.0;
    /// (state, solved u_i, reference u_i) for every reference point inside the state space.
    std::vector<std::tuple<int, double, double>> u_points;
    double max_abs_u_error = 0.0;
    int centralized_mismatches = 0;
    int centralized_points = 0;
    /// Distinct u_i values strictly inside (0, 1) of the selfish curve.
    std::size_t distinct_interior_values = 0;
    std::vector<double> selfish_u;
    bool centralized_hard_at_c50 = false;
};

struct CalibrationReport {
    std::vector<CalibrationEntry> entries;
    std::size_t best = 0;

    const CalibrationEntry& best_entry() const { return entries.at(best); }
};

struct CalibrationSettings {
    std::vector<double> gammas{0.9, 0.95, 0.99, 0.999};
    int delta_max = 1000;
    int grid_size = 251;
    SolveConfig solve;
};

inline std::size_t count_distinct_interior(const std::vector<double>& u, double tol = 1e-12) {
    std::vector<double> inner;
    for (double x : u)
        if (x > tol && x < 1.0 - tol) inner.push_back(x);
    std::sort(inner.begin(), inner.end());
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < inner.size(); ++i)
        if (i == 0 || inner[i] - inner[i - 1] > tol) ++distinct;
    return distinct;
}

/**
 * Solves the selfish game at c = 50 and the centralized game along the
 * reference cost grid for every candidate discount. The best discount
 * minimises centralized threshold mismatches, then the largest selfish
 * u_i error. The centralized one-step reward and kernel are affine in p, so
 * its optimum lies on {0, 1} and a two-point grid is exact there.
 */
inline CalibrationReport calibrate(const CalibrationSettings& settings = {}) {
    CalibrationReport report;
    for (double gamma : settings.gammas) {
        CalibrationEntry entry;
        entry.gamma = gamma;

        ModelParams selfish{10, 50.0, gamma, settings.delta_max, settings.grid_size};
        const Solution solved = value_iteration(selfish, RewardKind::Selfish, settings.solve);
        entry.selfish_u = update_probabilities(solved.policy, selfish, RewardKind::Selfish);
        for (const auto& point : reference_data::selfish_u_c50) {
            if (point.state >= settings.delta_max) continue;
            const double u = entry.selfish_u[static_cast<std::size_t>(point.state)];
            entry.u_points.emplace_back(point.state, u, point.update_prob);
            entry.max_abs_u_error = std::max(entry.max_abs_u_error, std::abs(u - point.update_prob));
        }
        entry.distinct_interior_values = count_distinct_interior(entry.selfish_u);

        for (const auto& step : reference_data::centralized_steps) {
            ModelParams central{10, step.cost, gamma, settings.delta_max, 2};
            const Solution c = value_iteration(central, RewardKind::Centralized, settings.solve);
            const ThresholdReport th = extract_threshold(c.policy.probs);
            ++entry.centralized_points;
            if (th.threshold() != static_cast<std::size_t>(step.threshold)) ++entry.centralized_mismatches;
        }
        ModelParams central50{10, 50.0, gamma, settings.delta_max, settings.grid_size};
        entry.centralized_hard_at_c50 =
            extract_threshold(value_iteration(central50, RewardKind::Centralized, settings.solve)
                                  .policy.probs)
                .is_hard();
        report.entries.push_back(std::move(entry));
    }
    for (std::size_t i = 1; i < report.entries.size(); ++i) {
        const auto& a = report.entries[i];
        const auto& b = report.entries[report.best];
        if (std::pair(a.centralized_mismatches, a.max_abs_u_error) <
            std::pair(b.centralized_mismatches, b.max_abs_u_error))
            report.best = i;
    }
    return report;
}

} // namespace aoigame
