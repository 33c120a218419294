#pragma once

// Flat-file formats: per-state policy CSV, per-record metrics CSV and the
// JSON encodings of simulation estimates.

#include "aoigame/harness/sweep.hpp"

#include <nlohmann/json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace aoigame {

/// Shortest round-trippable text for a double (17 significant digits).
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_double(const std::string& text, const std::string& context) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE)
        throw std::runtime_error(context + ": bad number '" + text + "'");
    return v;
}

inline std::string tie_break_name(TieBreak t) {
    return t == TieBreak::SmallestAction ? "smallest" : "largest";
}

inline std::string threshold_cell(const RunRecord& record) {
    if (!record.ok() || !record.threshold) return "error";
    if (auto th = record.threshold->threshold()) return std::to_string(*th);
    return "smooth";
}

/// A policy file read back from disk together with the instance it belongs to.
struct PolicyFile {
    ModelParams params;
    RewardKind kind = RewardKind::Selfish;
    SolveConfig solve;
    Policy policy;
    std::vector<double> update_probs;
    std::vector<double> stationary;
    std::vector<double> values;
};

inline const char* policy_csv_columns = "state,p_star,u,pi,value";

/**
 * Writes `# key=value` lines describing the instance, the column header
 * `state,p_star,u,pi,value`, then one row per state.
 */
inline void emit_policy_csv(const RunRecord& record, const std::filesystem::path& path) {
    if (!record.solution) throw std::runtime_error(path.string() + ": record has no solved policy");
    const ModelParams& p = record.params;
    const Policy& policy = record.solution->policy;
    const std::vector<double> u = update_probabilities(policy, p, record.kind);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << "# kind=" << to_string(record.kind) << '\n'
        << "# n_sources=" << p.n_sources << '\n'
        << "# cost=" << format_double(p.cost) << '\n'
        << "# gamma=" << format_double(p.discount) << '\n'
        << "# delta_max=" << p.delta_max << '\n'
        << "# grid_size=" << p.grid_size << '\n'
        << "# tolerance=" << format_double(record.solve.tolerance) << '\n'
        << "# max_iterations=" << record.solve.max_iterations << '\n'
        << "# tie_break=" << tie_break_name(record.solve.tie_break) << '\n'
        << "# iterations_run=" << record.solution->value.iterations_run << '\n'
        << "# final_residual=" << format_double(record.solution->value.final_residual) << '\n'
        << policy_csv_columns << '\n';
    for (std::size_t s = 0; s < policy.size(); ++s) {
        const double pi = record.stats ? record.stats->stationary[s] : std::nan("");
        out << s << ',' << format_double(policy.probs[s]) << ',' << format_double(u[s]) << ','
            << format_double(pi) << ',' << format_double(record.solution->value.values[s]) << '\n';
    }
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

inline PolicyFile load_policy_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
    const std::string where = path.string();

    std::map<std::string, std::string> header;
    std::string line;
    bool seen_columns = false;
    PolicyFile file;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            header[key] = line.substr(eq + 1);
            continue;
        }
        if (!seen_columns) {
            if (line != policy_csv_columns)
                throw std::runtime_error(where + ": expected header '" + policy_csv_columns + "'");
            seen_columns = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        const std::string ctx = where + ":" + std::to_string(lineno);
        if (cells.size() != 5) throw std::runtime_error(ctx + ": expected 5 columns");
        if (parse_double(cells[0], ctx) != static_cast<double>(file.policy.probs.size()))
            throw std::runtime_error(ctx + ": rows must be ordered by state");
        file.policy.probs.push_back(parse_double(cells[1], ctx));
        file.update_probs.push_back(parse_double(cells[2], ctx));
        file.stationary.push_back(parse_double(cells[3], ctx));
        file.values.push_back(parse_double(cells[4], ctx));
    }
    if (!seen_columns) throw std::runtime_error(where + ": missing column header");

    auto need = [&](const std::string& key) -> const std::string& {
        const auto it = header.find(key);
        if (it == header.end()) throw std::runtime_error(where + ": missing '# " + key + "=' line");
        return it->second;
    };
    const auto kind = parse_kind(need("kind"));
    if (!kind) throw std::runtime_error(where + ": unknown kind '" + need("kind") + "'");
    file.kind = *kind;
    file.params.n_sources = static_cast<int>(parse_double(need("n_sources"), where));
    file.params.cost = parse_double(need("cost"), where);
    file.params.delta_max = static_cast<int>(parse_double(need("delta_max"), where));
    if (header.count("gamma")) file.params.discount = parse_double(header["gamma"], where);
    if (header.count("grid_size"))
        file.params.grid_size = static_cast<int>(parse_double(header["grid_size"], where));
    if (header.count("tolerance")) file.solve.tolerance = parse_double(header["tolerance"], where);
    if (header.count("max_iterations"))
        file.solve.max_iterations = static_cast<long>(parse_double(header["max_iterations"], where));
    if (header.count("tie_break") && header["tie_break"] == "largest")
        file.solve.tie_break = TieBreak::LargestAction;
    if (file.policy.probs.size() != file.params.states())
        throw std::runtime_error(where + ": row count does not match delta_max");
    for (double p : file.policy.probs)
        if (!(p >= 0.0 && p <= 1.0)) throw std::runtime_error(where + ": p_star outside [0, 1]");
    file.policy.kind = file.kind;
    file.policy.params_fingerprint = file.params.fingerprint();
    return file;
}

inline const char* metrics_csv_columns =
    "kind,n_sources,cost,gamma,delta_max,grid_size,U_bar,AoI_bar,C_bar,R_bar,threshold,boundary_mass";

/// One row per record; failed records carry `nan` metrics and threshold `error`.
inline void write_metrics_csv(const std::vector<RunRecord>& records, std::ostream& out) {
    out << metrics_csv_columns << '\n';
    for (const RunRecord& r : records) {
        const bool have = r.ok() && r.stats.has_value();
        const double nan = std::nan("");
        out << to_string(r.kind) << ',' << r.params.n_sources << ',' << format_double(r.params.cost)
            << ',' << format_double(r.params.discount) << ',' << r.params.delta_max << ','
            << r.params.grid_size << ',' << format_double(have ? r.stats->avg_update : nan) << ','
            << format_double(have ? r.stats->avg_aoi : nan) << ','
            << format_double(have ? r.stats->avg_cost : nan) << ','
            << format_double(have ? r.stats->avg_reward : nan) << ',' << threshold_cell(r) << ','
            << format_double(have ? r.stats->boundary_mass : nan) << '\n';
    }
}

inline void emit_metrics_csv(const std::vector<RunRecord>& records,
                             const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    write_metrics_csv(records, out);
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

/// File name used for a record's policy inside a sweep's policies directory.
inline std::string policy_file_name(const RunRecord& r) {
    return to_string(r.kind) + "_n" + std::to_string(r.params.n_sources) + "_c" +
           format_double(r.params.cost) + ".csv";
}

inline nlohmann::json to_json(const ModelParams& p) {
    return {{"n_sources", p.n_sources}, {"cost", p.cost},           {"gamma", p.discount},
            {"delta_max", p.delta_max}, {"grid_size", p.grid_size}};
}

inline nlohmann::json to_json(const SimConfig& s) {
    return {{"slots", s.slots}, {"burn_in", s.burn_in}, {"seed", s.seed}, {"replicas", s.replicas}};
}

inline nlohmann::json to_json(const ChainStats& c) {
    return {{"U_bar", c.avg_update},
            {"AoI_bar", c.avg_aoi},
            {"C_bar", c.avg_cost},
            {"R_bar", c.avg_reward},
            {"boundary_mass", c.boundary_mass}};
}

inline nlohmann::json to_json(const SimEstimate& e) {
    return {{"U_bar", e.avg_update},
            {"AoI_bar", e.avg_aoi},
            {"C_bar", e.avg_cost},
            {"R_bar", e.avg_reward},
            {"std_errors",
             {{"U_bar", e.std_errors.avg_update},
              {"AoI_bar", e.std_errors.avg_aoi},
              {"C_bar", e.std_errors.avg_cost},
              {"R_bar", e.std_errors.avg_reward}}},
            {"seed", e.seed},
            {"slots_effective", e.slots_effective},
            {"rng", e.rng}};
}

} // namespace aoigame
