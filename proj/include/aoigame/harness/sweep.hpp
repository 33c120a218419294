#pragma once

#include "aoigame/analysis.hpp"
#include "aoigame/model.hpp"
#include "aoigame/montecarlo.hpp"
#include "aoigame/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

namespace aoigame {

/// Inclusive arithmetic range start, start+step, ..., <= stop.
struct CostRange {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    void validate() const {
        if (!(step > 0.0)) throw std::invalid_argument("cost range step must be > 0");
        if (!(stop >= start)) throw std::invalid_argument("cost range is empty");
        if (start < 0.0) throw std::invalid_argument("costs must be non-negative");
    }

    std::vector<double> values() const {
        validate();
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(count));
        for (long j = 0; j < count; ++j) out.push_back(start + static_cast<double>(j) * step);
        return out;
    }

    static CostRange single(double c) { return {c, c, 1.0}; }

    /// Parses "start:stop:step" or a single value.
    static CostRange parse(std::string_view text) {
        auto number = [](std::string_view part) {
            std::string s(part);
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument("bad number in cost range: '" + s + "'");
            }
            if (used != s.size()) throw std::invalid_argument("bad number in cost range: '" + s + "'");
            return v;
        };
        const auto first = text.find(':');
        if (first == std::string_view::npos) {
            const CostRange r = single(number(text));
            r.validate();
            return r;
        }
        const auto second = text.find(':', first + 1);
        if (second == std::string_view::npos)
            throw std::invalid_argument("cost range must be start:stop:step");
        CostRange r{number(text.substr(0, first)), number(text.substr(first + 1, second - first - 1)),
                    number(text.substr(second + 1))};
        r.validate();
        return r;
    }
};

struct SweepSpec {
    CostRange costs;
    std::vector<int> n_sources_list{10};
    std::vector<RewardKind> kinds{RewardKind::Selfish, RewardKind::Global, RewardKind::Centralized};
    /// gamma, delta_max and grid_size are taken from here; n and c are swept.
    ModelParams base;
    SolveConfig solve;
    std::optional<SimConfig> sim;
    double threshold_epsilon = 1e-3;
    unsigned workers = 1;

    void validate() const {
        costs.validate();
        if (n_sources_list.empty()) throw std::invalid_argument("no source counts to sweep");
        if (kinds.empty()) throw std::invalid_argument("no reward kinds to sweep");
        for (int n : n_sources_list)
            if (n < 1) throw std::invalid_argument("source counts must be >= 1");
    }
};

struct RunRecord {
    ModelParams params;
    RewardKind kind = RewardKind::Selfish;
    SolveConfig solve;
    std::optional<Solution> solution;
    std::optional<ChainStats> stats;
    std::optional<ThresholdReport> threshold;
    std::optional<SimEstimate> sim;
    double duration_seconds = 0.0;
    /// Empty on success.
    std::string error;

    bool ok() const { return error.empty(); }
};

/// Solves one (params, kind) point and derives its chain metrics.
inline RunRecord run_point(const ModelParams& params, RewardKind kind, const SolveConfig& solve,
                           double threshold_epsilon = 1e-3,
                           const std::optional<SimConfig>& sim = std::nullopt) {
    RunRecord record;
    record.params = params;
    record.kind = kind;
    record.solve = solve;
    const auto started = std::chrono::steady_clock::now();
    try {
        record.solution = value_iteration(params, kind, solve);
        if (!record.solution->value.converged) {
            std::ostringstream msg;
            msg << "not converged (residual " << record.solution->value.final_residual << ")";
            record.error = msg.str();
        }
        record.stats = chain_metrics(record.solution->policy, params, kind);
        record.threshold = extract_threshold(record.solution->policy.probs, threshold_epsilon);
        if (sim) record.sim = simulate(record.solution->policy, params, kind, *sim, 1);
    } catch (const std::exception& e) {
        if (record.error.empty()) record.error = e.what();
    }
    record.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return record;
}

/**
 * One record per (kind, N, c), ordered by kind, then N, then c. Points are
 * spread over `spec.workers` threads; a failing point yields a record with
 * `error` set and never aborts the sweep.
 */
inline std::vector<RunRecord> run_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<RewardKind> kinds = spec.kinds;
    std::sort(kinds.begin(), kinds.end());
    kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
    std::vector<int> sources = spec.n_sources_list;
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    const std::vector<double> costs = spec.costs.values();

    std::vector<std::tuple<RewardKind, int, double>> points;
    for (RewardKind kind : kinds)
        for (int n : sources)
            for (double c : costs) points.emplace_back(kind, n, c);

    std::vector<RunRecord> records(points.size());
    auto work = [&](std::size_t i) {
        const auto& [kind, n, c] = points[i];
        ModelParams params = spec.base;
        params.n_sources = n;
        params.cost = c;
        records[i] = run_point(params, kind, spec.solve, spec.threshold_epsilon, spec.sim);
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(spec.workers,
                                                             static_cast<unsigned>(points.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < points.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = cursor++; i < points.size(); i = cursor++) work(i);
            });
    }
    return records;
}

} // namespace aoigame
