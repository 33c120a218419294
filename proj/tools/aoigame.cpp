// Command-line front end: solve, sweep, simulate and verify.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/config error,
// 3 numerical failure (non-convergence).

#include "aoigame/aoigame.hpp"

#include "CLI11.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

using aoigame::format_double;
using nlohmann::json;

constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fills options that were not given on the command line from a flat JSON
/// object whose keys are the long flag names (e.g. "delta-max").
void apply_config_file(CLI::App& cmd, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw UsageError(path + ": cannot open config file");
    json config;
    try {
        in >> config;
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
    if (!config.is_object()) throw UsageError(path + ": config must be a JSON object");
    for (const auto& [key, value] : config.items()) {
        CLI::Option* opt = nullptr;
        try {
            opt = cmd.get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw UsageError(path + ": unknown key '" + key + "' for '" + cmd.get_name() + "'");
        }
        if (opt->count() > 0 || key == "config") continue;
        std::vector<std::string> items;
        auto scalar = [](const json& v) {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
            if (v.is_number_integer()) return std::to_string(v.get<long long>());
            if (v.is_number()) return format_double(v.get<double>());
            throw UsageError("unsupported config value " + v.dump());
        };
        if (value.is_array())
            for (const auto& v : value) items.push_back(scalar(v));
        else
            items.push_back(scalar(value));
        for (auto& item : items) opt->add_result(item);
        try {
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw UsageError(path + ": key '" + key + "': " + e.what());
        }
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << text;
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<aoigame::RewardKind> parse_kinds(const std::vector<std::string>& names) {
    std::vector<aoigame::RewardKind> kinds;
    for (const auto& name : names) {
        if (name == "all") {
            kinds.assign(std::begin(aoigame::all_kinds), std::end(aoigame::all_kinds));
            continue;
        }
        const auto kind = aoigame::parse_kind(name);
        if (!kind) throw UsageError("unknown kind '" + name + "'");
        kinds.push_back(*kind);
    }
    return kinds;
}

json threshold_json(const aoigame::ThresholdReport& report) {
    if (auto t = report.threshold()) return {{"shape", "hard"}, {"threshold", *t}};
    const auto& smooth = std::get<aoigame::Smooth>(report.shape);
    json out{{"shape", "smooth"}, {"first_nonzero", nullptr}, {"first_saturated", nullptr}};
    if (smooth.first_nonzero) out["first_nonzero"] = *smooth.first_nonzero;
    if (smooth.first_saturated) out["first_saturated"] = *smooth.first_saturated;
    return out;
}

struct SolveOptions {
    std::string kind = "selfish";
    aoigame::ModelParams params;
    aoigame::SolveConfig solve;
    std::string tie_break = "smallest";
};

void add_model_options(CLI::App* cmd, SolveOptions& o, bool with_instance) {
    if (with_instance) {
        cmd->add_option("--kind", o.kind, "Reward kind")
            ->check(CLI::IsMember({"selfish", "global", "centralized"}));
        cmd->add_option("--n", o.params.n_sources, "Number of sources")->check(CLI::PositiveNumber);
        cmd->add_option("--cost", o.params.cost, "Per-transmission cost c")->check(CLI::NonNegativeNumber);
    }
    cmd->add_option("--gamma", o.params.discount, "Discount factor in [0, 1)")->capture_default_str();
    cmd->add_option("--delta-max", o.params.delta_max, "Number of AoI states")->capture_default_str();
    cmd->add_option("--grid", o.params.grid_size, "Number of grid actions k")->capture_default_str();
    cmd->add_option("--tolerance", o.solve.tolerance, "Sup-norm stopping tolerance")->capture_default_str();
    cmd->add_option("--max-iterations", o.solve.max_iterations, "Iteration cap")->capture_default_str();
    cmd->add_option("--tie-break", o.tie_break, "Argmax tie rule")
        ->check(CLI::IsMember({"smallest", "largest"}))
        ->capture_default_str();
}

void finish_model_options(SolveOptions& o) {
    o.solve.tie_break =
        o.tie_break == "largest" ? aoigame::TieBreak::LargestAction : aoigame::TieBreak::SmallestAction;
}

int run_solve(SolveOptions& o, const std::string& out_path) {
    finish_model_options(o);
    const aoigame::RewardKind kind = *aoigame::parse_kind(o.kind);
    const aoigame::RunRecord record = aoigame::run_point(o.params, kind, o.solve);
    if (!record.solution) throw std::domain_error(record.error);
    if (!out_path.empty()) aoigame::emit_policy_csv(record, out_path);

    json report{{"kind", aoigame::to_string(kind)},
                {"params", aoigame::to_json(o.params)},
                {"iterations_run", record.solution->value.iterations_run},
                {"final_residual", record.solution->value.final_residual},
                {"converged", record.solution->value.converged}};
    if (record.stats) report["metrics"] = aoigame::to_json(*record.stats);
    if (record.threshold) report["threshold"] = threshold_json(*record.threshold);
    if (!record.ok()) report["error"] = record.error;
    std::cout << report.dump(2) << '\n';
    return record.solution->value.converged ? 0 : kExitNumerical;
}

struct SweepOptions {
    SolveOptions model;
    std::string costs = "10:190:2";
    std::vector<int> sources{10};
    std::vector<std::string> kinds{"all"};
    std::string metrics_out;
    std::string policies_dir;
    unsigned jobs = 1;
    bool calibrate = false;
    std::vector<double> gammas{0.9, 0.95, 0.99, 0.999};
    std::string calibration_out;
};

int run_calibrate(SweepOptions& o) {
    aoigame::CalibrationSettings settings;
    settings.gammas = o.gammas;
    settings.delta_max = o.model.params.delta_max;
    settings.grid_size = o.model.params.grid_size;
    settings.solve = o.model.solve;
    const aoigame::CalibrationReport report = aoigame::calibrate(settings);

    json entries = json::array();
    for (const auto& e : report.entries) {
        json points = json::array();
        for (const auto& [state, u, ref] : e.u_points)
            points.push_back({{"state", state}, {"u", u}, {"reference", ref}});
        entries.push_back({{"gamma", e.gamma},
                           {"max_abs_u_error", e.max_abs_u_error},
                           {"centralized_mismatches", e.centralized_mismatches},
                           {"centralized_points", e.centralized_points},
                           {"distinct_interior_values", e.distinct_interior_values},
                           {"centralized_hard_at_c50", e.centralized_hard_at_c50},
                           {"u_points", points}});
    }
    json out{{"delta_max", settings.delta_max},
             {"grid_size", settings.grid_size},
             {"best_gamma", report.best_entry().gamma},
             {"entries", entries}};
    write_text(o.calibration_out, out.dump(2) + "\n");
    if (!o.calibration_out.empty())
        std::cout << "best gamma " << format_double(report.best_entry().gamma) << '\n';
    return 0;
}

int run_sweep_cmd(SweepOptions& o) {
    finish_model_options(o.model);
    if (o.calibrate) return run_calibrate(o);
    aoigame::SweepSpec spec;
    try {
        spec.costs = aoigame::CostRange::parse(o.costs);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    spec.n_sources_list = o.sources;
    spec.kinds = parse_kinds(o.kinds);
    spec.base = o.model.params;
    spec.solve = o.model.solve;
    spec.workers = o.jobs;
    spec.base.validate();
    const auto records = aoigame::run_sweep(spec);

    std::ostringstream csv;
    aoigame::write_metrics_csv(records, csv);
    write_text(o.metrics_out, csv.str());
    if (!o.policies_dir.empty()) {
        std::filesystem::create_directories(o.policies_dir);
        for (const auto& r : records)
            if (r.solution)
                aoigame::emit_policy_csv(r, std::filesystem::path(o.policies_dir) /
                                                aoigame::policy_file_name(r));
    }
    int status = 0;
    for (const auto& r : records) {
        if (r.ok()) continue;
        std::cerr << "warning: " << aoigame::to_string(r.kind) << " n=" << r.params.n_sources
                  << " c=" << format_double(r.params.cost) << ": " << r.error << '\n';
        if (r.solution && !r.solution->value.converged) status = kExitNumerical;
    }
    for (const auto& r : records)
        if (r.stats && r.stats->boundary_mass > 1e-6)
            std::cerr << "warning: " << aoigame::to_string(r.kind) << " n=" << r.params.n_sources
                      << " c=" << format_double(r.params.cost) << ": boundary mass "
                      << r.stats->boundary_mass << " exceeds 1e-6, increase --delta-max\n";
    return status;
}

struct SimulateOptions {
    std::string policy_file;
    long slots = 1'000'000;
    std::optional<long> burn_in;
    std::uint64_t seed = 1;
    int replicas = 10;
    unsigned jobs = 0;
    std::string out;
};

int run_simulate(SimulateOptions& o) {
    const aoigame::PolicyFile file = aoigame::load_policy_csv(o.policy_file);
    aoigame::SimConfig sim{o.slots, o.burn_in.value_or(o.slots / 100), o.seed, o.replicas};
    sim.validate();
    const aoigame::SimEstimate est = aoigame::simulate(file.policy, file.params, file.kind, sim, o.jobs);
    json out{{"policy_file", o.policy_file},
             {"kind", aoigame::to_string(file.kind)},
             {"params", aoigame::to_json(file.params)},
             {"sim", aoigame::to_json(sim)},
             {"estimate", aoigame::to_json(est)}};
    try {
        out["analytical"] = aoigame::to_json(aoigame::chain_metrics(file.policy, file.params, file.kind));
    } catch (const std::domain_error& e) {
        out["analytical"] = {{"error", e.what()}};
    }
    write_text(o.out, out.dump(2) + "\n");
    return 0;
}

struct VerifyOptions {
    std::vector<std::string> suites{"all"};
    std::string report;
    std::uint64_t seed = aoigame::VerifySettings{}.mc.seed;
};

int run_verify(VerifyOptions& o) {
    for (const auto& s : o.suites)
        if (s != "all" && std::find(aoigame::suite_names().begin(), aoigame::suite_names().end(), s) ==
                              aoigame::suite_names().end())
            throw UsageError("unknown suite '" + s + "'");
    aoigame::VerifySettings settings;
    settings.mc.seed = o.seed;
    const aoigame::VerificationReport report = aoigame::verify_all(settings, o.suites);
    if (!o.report.empty()) write_text(o.report, aoigame::to_json(report).dump(2) + "\n");
    std::cout << aoigame::summary(report);
    return report.passed() ? 0 : kExitVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal update policies for the multi-source AoI updating game"};
    app.require_subcommand(1);

    SolveOptions solve_opts;
    std::string solve_out, solve_config;
    auto* solve = app.add_subcommand("solve", "Solve one instance by value iteration");
    add_model_options(solve, solve_opts, true);
    solve->add_option("--out", solve_out, "Write the policy CSV here");
    solve->add_option("--config", solve_config, "JSON file with defaults for these flags");

    SweepOptions sweep_opts;
    std::string sweep_config;
    auto* sweep = app.add_subcommand("sweep", "Solve a grid of (kind, N, c) points");
    add_model_options(sweep, sweep_opts.model, false);
    sweep->add_option("--costs", sweep_opts.costs, "Cost range start:stop:step")->capture_default_str();
    sweep->add_option("--n", sweep_opts.sources, "Source counts")->delimiter(',');
    sweep->add_option("--kinds", sweep_opts.kinds, "all or a list of kinds")->delimiter(',');
    sweep->add_option("--metrics-out", sweep_opts.metrics_out, "Metrics CSV path (default stdout)");
    sweep->add_option("--policies-dir", sweep_opts.policies_dir, "Directory for per-point policy CSVs");
    sweep->add_option("--jobs", sweep_opts.jobs, "Worker threads")->capture_default_str();
    sweep->add_flag("--calibrate", sweep_opts.calibrate, "Report which discount best matches the reference curves");
    sweep->add_option("--gammas", sweep_opts.gammas, "Candidate discounts for --calibrate")->delimiter(',');
    sweep->add_option("--calibration-out", sweep_opts.calibration_out, "Calibration JSON path (default stdout)");
    sweep->add_option("--config", sweep_config, "JSON file with defaults for these flags");

    SimulateOptions sim_opts;
    std::string sim_config;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo estimate of a policy's metrics");
    simulate->add_option("--policy-file", sim_opts.policy_file, "Policy CSV written by solve/sweep");
    simulate->add_option("--slots", sim_opts.slots, "Slots per replica")->capture_default_str();
    simulate->add_option("--burn-in", sim_opts.burn_in, "Discarded initial slots (default 1% of slots)");
    simulate->add_option("--seed", sim_opts.seed, "RNG seed")->capture_default_str();
    simulate->add_option("--replicas", sim_opts.replicas, "Independent replicas")->capture_default_str();
    simulate->add_option("--jobs", sim_opts.jobs, "Worker threads (0 = hardware)");
    simulate->add_option("--out", sim_opts.out, "Output JSON path (default stdout)");
    simulate->add_option("--config", sim_config, "JSON file with defaults for these flags");

    VerifyOptions verify_opts;
    std::string verify_config;
    auto* verify = app.add_subcommand("verify", "Run verification suites");
    verify->add_option("--suite", verify_opts.suites,
                       "threshold|monotonicity|theorem2|implicit|oracle|mc|all")
        ->delimiter(',');
    verify->add_option("--report", verify_opts.report, "Write the JSON report here");
    verify->add_option("--seed", verify_opts.seed, "Seed for the Monte-Carlo suite")->capture_default_str();
    verify->add_option("--config", verify_config, "JSON file with defaults for these flags");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (solve->parsed()) {
            apply_config_file(*solve, solve_config);
            return run_solve(solve_opts, solve_out);
        }
        if (sweep->parsed()) {
            apply_config_file(*sweep, sweep_config);
            return run_sweep_cmd(sweep_opts);
        }
        if (simulate->parsed()) {
            apply_config_file(*simulate, sim_config);
            if (sim_opts.policy_file.empty()) throw UsageError("--policy-file is required");
            return run_simulate(sim_opts);
        }
        if (verify->parsed()) {
            apply_config_file(*verify, verify_config);
            return run_verify(verify_opts);
        }
    } catch (const std::exception& e) {
        // Bad flags, invalid instances and unreadable or unwritable files.
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
