#pragma once

// Verification suites over solved instances. Each suite returns named checks
// and a verdict; verify_all bundles them into one machine-readable report.

#include "aoigame/analysis.hpp"
#include "aoigame/harness/io.hpp"
#include "aoigame/harness/oracle.hpp"
#include "aoigame/montecarlo.hpp"
#include "aoigame/solver.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace aoigame {

struct SuiteResult {
    std::string name;
    std::vector<TheoryCheckResult> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }
};

struct VerificationReport {
    std::vector<SuiteResult> suites;

    bool passed() const {
        return std::all_of(suites.begin(), suites.end(), [](const auto& s) { return s.passed(); });
    }
};

struct VerifySettings {
    SolveConfig solve;
    // threshold
    std::vector<double> threshold_costs{2, 10, 50, 200};
    double threshold_gamma = 0.999;
    // monotonicity
    std::vector<double> monotonicity_costs{10, 50, 100, 190};
    std::vector<int> monotonicity_sources{2, 10};
    double sweep_gamma = 0.99;
    int sweep_delta_max = 1000;
    int sweep_grid = 251;
    // theorem 2
    std::vector<double> theorem2_costs{10, 50};
    double theorem2_gamma = 0.999;
    int theorem2_delta_max = 1000;
    // implicit equation
    double implicit_cost = 50;
    // oracle
    std::vector<int> oracle_sources{1, 2, 3};
    std::vector<double> oracle_costs{0, 1, 5};
    // Monte-Carlo
    SimConfig mc{1'000'000, 10'000, 20240601, 10};
    double mc_sigmas = 3.0;
};

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"threshold", "monotonicity", "theorem2",
                                                "implicit",  "oracle",       "mc"};
    return names;
}

namespace detail {

inline std::string fmt(double x) {
    std::ostringstream out;
    out.precision(12);
    out << x;
    return out.str();
}

inline ModelParams threshold_instance(double c, double gamma) {
    const int span = static_cast<int>(std::ceil(std::sqrt(2.0 * c)));
    return ModelParams{10, c, gamma, std::max(40, 4 * span), 2};
}

} // namespace detail

/// Extracted centralized thresholds against max(0, ceil(sqrt(2c) - 1)) within +-1.
inline SuiteResult run_threshold_suite(const VerifySettings& s) {
    SuiteResult suite{"threshold", {}};
    for (double c : s.threshold_costs) {
        const ModelParams params = detail::threshold_instance(c, s.threshold_gamma);
        const Solution solved = value_iteration(params, RewardKind::Centralized, s.solve);
        const ThresholdReport th = extract_threshold(solved.policy.probs);
        const int formula = centralized_threshold(c);
        TheoryCheckResult check{"threshold/c=" + detail::fmt(c), false, 0.0, ""};
        if (auto t = th.threshold()) {
            check.worst_violation = std::max(0.0, std::abs(static_cast<double>(*t) - formula) - 1.0);
            check.passed = check.worst_violation == 0.0;
            check.details = "extracted=" + std::to_string(*t) + " formula=" + std::to_string(formula);
        } else {
            check.worst_violation = 1.0;
            check.details = "policy is not a hard threshold";
        }
        suite.checks.push_back(check);
    }
    for (RewardKind kind : all_kinds) {
        const ModelParams params{10, 0.0, s.sweep_gamma, 50, s.sweep_grid};
        const Solution solved = value_iteration(params, kind, s.solve);
        const ChainStats stats = chain_metrics(solved.policy, params, kind);
        double gap = 0.0;
        for (double p : solved.policy.probs) gap = std::max(gap, 1.0 - p);
        gap = std::max(gap, std::abs(stats.avg_reward));
        suite.checks.push_back({"zero-cost/" + to_string(kind), gap == 0.0, gap,
                                "all-transmit policy and R_bar = 0 expected"});
    }
    {
        const ModelParams params = detail::threshold_instance(0.25, s.threshold_gamma);
        const Solution solved = value_iteration(params, RewardKind::Centralized, s.solve);
        const auto t = extract_threshold(solved.policy.probs).threshold();
        const bool ok = t && *t == 0;
        suite.checks.push_back({"ineffective-cost/c=0.25", ok, ok ? 0.0 : 1.0,
                                t ? "extracted=" + std::to_string(*t) : "no hard threshold"});
    }
    return suite;
}

inline SuiteResult run_monotonicity_suite(const VerifySettings& s) {
    SuiteResult suite{"monotonicity", {}};
    for (RewardKind kind : all_kinds)
        for (int n : s.monotonicity_sources)
            for (double c : s.monotonicity_costs) {
                const ModelParams params{n, c, s.sweep_gamma, s.sweep_delta_max, s.sweep_grid};
                const Solution solved = value_iteration(params, kind, s.solve);
                TheoryCheckResult check = verify_monotonicity(solved.policy.probs);
                check.check_name = "monotonicity/" + to_string(kind) + "/n=" + std::to_string(n) +
                                   "/c=" + detail::fmt(c);
                suite.checks.push_back(check);
            }
    return suite;
}

inline SuiteResult run_theorem2_suite(const VerifySettings& s) {
    SuiteResult suite{"theorem2", {}};
    for (RewardKind kind : {RewardKind::Centralized, RewardKind::Selfish})
        for (double c : s.theorem2_costs) {
            const ModelParams params{10, c, s.theorem2_gamma, s.theorem2_delta_max, s.sweep_grid};
            TheoryCheckResult check = verify_theorem2(params, kind, s.solve);
            check.check_name += "/c=" + detail::fmt(c);
            suite.checks.push_back(check);
        }
    {
        const ModelParams params{10, 0.0, s.theorem2_gamma, 50, s.sweep_grid};
        TheoryCheckResult check = verify_theorem2(params, RewardKind::Centralized, s.solve);
        check.check_name += "/c=0";
        suite.checks.push_back(check);
    }
    return suite;
}

inline SuiteResult run_implicit_suite(const VerifySettings& s) {
    SuiteResult suite{"implicit", {}};
    for (RewardKind kind : {RewardKind::Selfish, RewardKind::Global}) {
        const ModelParams params{10, s.implicit_cost, s.sweep_gamma, s.sweep_delta_max, s.sweep_grid};
        const Solution solved = value_iteration(params, kind, s.solve);
        const ValueFunction v = policy_value(params, kind, solved.policy, s.solve);
        TheoryCheckResult check = verify_implicit_equation(params, kind, solved.policy, v.values);
        check.check_name += "/c=" + detail::fmt(s.implicit_cost);
        suite.checks.push_back(check);
    }
    return suite;
}

/// Value iteration against exhaustive policy enumeration on a 6-state, 5-action instance.
inline SuiteResult run_oracle_suite(const VerifySettings& s) {
    SuiteResult suite{"oracle", {}};
    for (RewardKind kind : all_kinds)
        for (int n : s.oracle_sources)
            for (double c : s.oracle_costs) {
                const ModelParams params{n, c, 0.9, 6, 5};
                const Solution solved = value_iteration(params, kind, s.solve);
                const OracleResult oracle = brute_force_optimum(params, kind);
                double gap = 0.0;
                for (std::size_t i = 0; i < params.states(); ++i)
                    gap = std::max(gap, std::abs(solved.value.values[i] - oracle.best_values[i]));
                const bool same_policy = solved.policy.probs == oracle.best_policy.probs;
                TheoryCheckResult check{"oracle/" + to_string(kind) + "/n=" + std::to_string(n) +
                                            "/c=" + detail::fmt(c),
                                        gap <= 1e-6 && same_policy, gap,
                                        "policies=" + std::to_string(oracle.policies_enumerated) +
                                            (same_policy ? " argmax=match" : " argmax=MISMATCH")};
                suite.checks.push_back(check);
            }
    return suite;
}

/// Simulated metrics within mc_sigmas standard errors of the exact chain metrics.
inline SuiteResult run_mc_suite(const VerifySettings& s) {
    SuiteResult suite{"mc", {}};
    const ModelParams params{10, 50.0, s.sweep_gamma, s.sweep_delta_max, s.sweep_grid};
    const Solution solved = value_iteration(params, RewardKind::Selfish, s.solve);
    const ChainStats exact = chain_metrics(solved.policy, params, RewardKind::Selfish);
    const SimEstimate est = simulate(solved.policy, params, RewardKind::Selfish, s.mc);
    const std::pair<const char*, std::array<double, 3>> rows[] = {
        {"U_bar", {est.avg_update, exact.avg_update, est.std_errors.avg_update}},
        {"AoI_bar", {est.avg_aoi, exact.avg_aoi, est.std_errors.avg_aoi}},
        {"C_bar", {est.avg_cost, exact.avg_cost, est.std_errors.avg_cost}},
        {"R_bar", {est.avg_reward, exact.avg_reward, est.std_errors.avg_reward}},
    };
    for (const auto& [name, r] : rows) {
        const double z = r[2] > 0.0 ? std::abs(r[0] - r[1]) / r[2]
                                    : (r[0] == r[1] ? 0.0 : std::numeric_limits<double>::infinity());
        suite.checks.push_back({std::string("mc/selfish/") + name, z <= s.mc_sigmas, z,
                                "simulated=" + detail::fmt(r[0]) + " exact=" + detail::fmt(r[1]) +
                                    " se=" + detail::fmt(r[2]) + " (violation in standard errors)"});
    }
    const Policy always = Policy::constant(params, RewardKind::Selfish, 1.0);
    SimConfig quick = s.mc;
    quick.slots = std::min<long>(quick.slots, 100'000);
    quick.burn_in = quick.slots / 100;
    const SimEstimate all = simulate(always, params, RewardKind::Selfish, quick);
    const double gap = std::max(std::abs(all.avg_aoi), std::abs(all.avg_update - 1.0));
    suite.checks.push_back({"mc/all-transmit", gap == 0.0, gap, "avg_aoi = 0 and avg_update = 1 exactly"});
    return suite;
}

inline std::optional<SuiteResult> run_suite(const std::string& name, const VerifySettings& s) {
    if (name == "threshold") return run_threshold_suite(s);
    if (name == "monotonicity") return run_monotonicity_suite(s);
    if (name == "theorem2") return run_theorem2_suite(s);
    if (name == "implicit") return run_implicit_suite(s);
    if (name == "oracle") return run_oracle_suite(s);
    if (name == "mc") return run_mc_suite(s);
    return std::nullopt;
}

/// Runs the named suites ("all" expands to every suite) in a fixed order.
inline VerificationReport verify_all(const VerifySettings& s,
                                     const std::vector<std::string>& suites = {"all"}) {
    VerificationReport report;
    const bool everything = std::find(suites.begin(), suites.end(), "all") != suites.end();
    for (const std::string& name : suite_names())
        if (everything || std::find(suites.begin(), suites.end(), name) != suites.end())
            report.suites.push_back(*run_suite(name, s));
    return report;
}

inline nlohmann::json to_json(const VerificationReport& report) {
    nlohmann::json suites = nlohmann::json::array();
    for (const SuiteResult& suite : report.suites) {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& c : suite.checks)
            checks.push_back({{"check_name", c.check_name},
                              {"passed", c.passed},
                              {"worst_violation", c.worst_violation},
                              {"details", c.details}});
        suites.push_back({{"name", suite.name}, {"passed", suite.passed()}, {"checks", checks}});
    }
    return {{"passed", report.passed()}, {"suites", suites}};
}

inline std::string summary(const VerificationReport& report) {
    std::ostringstream out;
    for (const SuiteResult& suite : report.suites) {
        std::size_t ok = 0;
        for (const auto& c : suite.checks) ok += c.passed ? 1 : 0;
        out << (suite.passed() ? "PASS " : "FAIL ") << suite.name << " (" << ok << "/"
            << suite.checks.size() << ")\n";
        for (const auto& c : suite.checks)
            if (!c.passed)
                out << "  - " << c.check_name << ": worst_violation=" << c.worst_violation << " "
                    << c.details << '\n';
    }
    out << (report.passed() ? "all suites passed" : "verification FAILED") << '\n';
    return out.str();
}

} // namespace aoigame
