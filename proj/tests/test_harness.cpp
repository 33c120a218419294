#include "aoigame/harness/io.hpp"
#include "aoigame/harness/oracle.hpp"
#include "aoigame/harness/sweep.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace aoigame;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("aoigame_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& stdout_file) {
    const std::string cmd = std::string(AOIGAME_CLI) + " " + args + " > " + stdout_file.string() +
                            " 2> " + stdout_file.string() + ".err";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(CostRange, Parsing) {
    EXPECT_EQ(CostRange::parse("10:20:5").values(), (std::vector<double>{10, 15, 20}));
    EXPECT_EQ(CostRange::parse("7").values(), (std::vector<double>{7}));
    EXPECT_EQ(CostRange::parse("10:200:2").values().size(), 96u);
    EXPECT_EQ(CostRange::parse("0:1:0.1").values().size(), 11u);
    EXPECT_THROW(CostRange::parse("1:2"), std::invalid_argument);
    EXPECT_THROW(CostRange::parse("5:1:1"), std::invalid_argument);
    EXPECT_THROW(CostRange::parse("1:2:0"), std::invalid_argument);
    EXPECT_THROW(CostRange::parse("a:2:1"), std::invalid_argument);
    EXPECT_THROW(CostRange::parse("-1"), std::invalid_argument);
}

TEST(Sweep, OrderingAndCount) {
    SweepSpec spec;
    spec.costs = CostRange::parse("10:200:2");
    spec.kinds = {RewardKind::Centralized, RewardKind::Selfish};
    spec.base = ModelParams{10, 0.0, 0.9, 60, 3};
    spec.workers = 2;
    const auto records = run_sweep(spec);
    ASSERT_EQ(records.size(), 192u);
    for (std::size_t i = 0; i < records.size(); ++i) {
        EXPECT_TRUE(records[i].ok()) << records[i].error;
        EXPECT_EQ(records[i].kind, i < 96 ? RewardKind::Selfish : RewardKind::Centralized);
        EXPECT_EQ(records[i].params.cost, 10.0 + 2.0 * static_cast<double>(i % 96));
    }
}

TEST(Sweep, ZeroCostPoint) {
    const RunRecord r = run_point({10, 0.0, 0.99, 50, 11}, RewardKind::Global, {});
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.stats->avg_reward, 0.0);
    EXPECT_EQ(*r.threshold->threshold(), 0u);
}

TEST(Sweep, NonConvergenceKeepsDataAndFlagsError) {
    SolveConfig cfg;
    cfg.max_iterations = 2;
    const RunRecord r = run_point({10, 50.0, 0.99, 50, 11}, RewardKind::Selfish, cfg);
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(r.solution.has_value());
    std::ostringstream out;
    write_metrics_csv({r}, out);
    EXPECT_NE(out.str().find(",error,"), std::string::npos);
    EXPECT_NE(out.str().find("nan"), std::string::npos);
}

TEST(MetricsCsv, HeaderAndRows) {
    std::ostringstream empty;
    write_metrics_csv({}, empty);
    EXPECT_EQ(empty.str(), std::string(metrics_csv_columns) + "\n");

    SweepSpec spec;
    spec.costs = CostRange::single(50);
    spec.base = ModelParams{10, 0.0, 0.95, 200, 11};
    std::ostringstream out;
    write_metrics_csv(run_sweep(spec), out);
    std::istringstream lines(out.str());
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], metrics_csv_columns);
    EXPECT_EQ(rows[1].rfind("selfish,10,50,", 0), 0u);
    EXPECT_EQ(rows[3].rfind("centralized,10,50,", 0), 0u);
}

TEST(PolicyCsv, RoundTrip) {
    const fs::path dir = scratch_dir("policy_csv");
    const ModelParams p{3, 5.0, 0.9, 12, 5};
    std::vector<RunRecord> records;
    records.push_back(run_point(p, RewardKind::Selfish, {}));
    for (double constant : {0.0, 1.0}) {
        RunRecord r = records.front();
        r.solution->policy = Policy::constant(p, RewardKind::Selfish, constant);
        r.stats.reset();
        if (constant > 0.0) r.stats = chain_metrics(r.solution->policy, p, RewardKind::Selfish);
        records.push_back(r);
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        const fs::path file = dir / ("p" + std::to_string(i) + ".csv");
        emit_policy_csv(records[i], file);
        const PolicyFile back = load_policy_csv(file);
        EXPECT_EQ(back.kind, RewardKind::Selfish);
        EXPECT_EQ(back.params.n_sources, p.n_sources);
        EXPECT_EQ(back.params.cost, p.cost);
        EXPECT_EQ(back.params.discount, p.discount);
        EXPECT_EQ(back.params.delta_max, p.delta_max);
        EXPECT_EQ(back.params.grid_size, p.grid_size);
        EXPECT_EQ(back.policy.probs, records[i].solution->policy.probs);
        EXPECT_EQ(back.values, records[i].solution->value.values);
    }
}

TEST(PolicyCsv, RejectsMalformedFiles) {
    const fs::path dir = scratch_dir("policy_bad");
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream(dir / name) << body;
        return dir / name;
    };
    const std::string head = "# kind=selfish\n# n_sources=2\n# cost=1\n# delta_max=2\n";
    EXPECT_THROW(load_policy_csv(write("nohdr.csv", head + "0,0,0,0,0\n")), std::runtime_error);
    EXPECT_THROW(load_policy_csv(write("short.csv", head + "state,p_star,u,pi,value\n0,0,0,1,0\n")),
                 std::runtime_error);
    EXPECT_THROW(load_policy_csv(write("range.csv", head + "state,p_star,u,pi,value\n0,0,0,1,0\n1,1.5,1,0,0\n")),
                 std::runtime_error);
    EXPECT_THROW(load_policy_csv(write("order.csv", head + "state,p_star,u,pi,value\n1,0,0,1,0\n0,1,1,0,0\n")),
                 std::runtime_error);
    EXPECT_THROW(load_policy_csv(write("nokind.csv", "# n_sources=2\n# cost=1\n# delta_max=2\n"
                                                     "state,p_star,u,pi,value\n0,0,0,1,0\n1,1,1,0,0\n")),
                 std::runtime_error);
    EXPECT_NO_THROW(load_policy_csv(write("ok.csv", head + "state,p_star,u,pi,value\n0,0,0,0.5,0\n1,1,1,0.5,0\n")));
    EXPECT_THROW(load_policy_csv(dir / "missing.csv"), std::runtime_error);
}

TEST(BruteForce, SmallInstanceAgreesWithValueIteration) {
    const ModelParams p{2, 1.0, 0.9, 6, 5};
    for (RewardKind kind : all_kinds) {
        const OracleResult o = brute_force_optimum(p, kind);
        EXPECT_EQ(o.policies_enumerated, 15625u);
        const Solution s = value_iteration(p, kind);
        for (std::size_t i = 0; i < p.states(); ++i)
            EXPECT_NEAR(o.best_values[i], s.value.values[i], 1e-6);
        EXPECT_EQ(o.best_policy.probs, s.policy.probs);
    }
}

TEST(Cli, SolveWritesPolicyAndJson) {
    const fs::path dir = scratch_dir("cli_solve");
    const fs::path policy = dir / "p.csv";
    ASSERT_EQ(run_cli("solve --kind centralized --n 10 --cost 50 --gamma 0.95 --delta-max 100 --grid 11 --out " +
                          policy.string(),
                      dir / "out.json"),
              0);
    const auto j = nlohmann::json::parse(slurp(dir / "out.json"));
    EXPECT_TRUE(j.dump().find("converged") != std::string::npos);
    const PolicyFile f = load_policy_csv(policy);
    EXPECT_EQ(f.kind, RewardKind::Centralized);
    EXPECT_EQ(f.policy.size(), 100u);
}

TEST(Cli, ExitCodes) {
    const fs::path dir = scratch_dir("cli_exit");
    EXPECT_EQ(run_cli("solve --kind selfish --cost 50 --gamma 1.5", dir / "a"), 2);
    EXPECT_EQ(run_cli("solve --kind nobody --cost 50", dir / "b"), 2);
    EXPECT_EQ(run_cli("solve --kind selfish --cost 50 --delta-max 50 --max-iterations 3", dir / "c"), 3);
    EXPECT_EQ(run_cli("simulate --policy-file " + (dir / "missing.csv").string(), dir / "d"), 2);
    EXPECT_EQ(run_cli("sweep --costs 5:1:1", dir / "e"), 2);
}

TEST(Cli, SweepSimulateAndConfigFile) {
    const fs::path dir = scratch_dir("cli_sweep");
    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"costs": "20:24:2", "gamma": 0.95, "delta-max": 80, "grid": 11, "kinds": "centralized"})";
    }
    ASSERT_EQ(run_cli("sweep --config " + (dir / "cfg.json").string() + " --policies-dir " +
                          (dir / "pol").string() + " --metrics-out " + (dir / "m.csv").string(),
                      dir / "sweep.out"),
              0)
        << slurp(dir / "sweep.out.err");
    const std::string metrics = slurp(dir / "m.csv");
    EXPECT_EQ(std::count(metrics.begin(), metrics.end(), '\n'), 4);
    EXPECT_NE(metrics.find("centralized,10,22,0.94999999999999996,80,11"), std::string::npos);

    const fs::path policy = dir / "pol" / "centralized_n10_c22.csv";
    ASSERT_TRUE(fs::exists(policy));
    ASSERT_EQ(run_cli("simulate --policy-file " + policy.string() +
                          " --slots 20000 --replicas 2 --seed 5 --jobs 1",
                      dir / "sim.json"),
              0);
    const auto j = nlohmann::json::parse(slurp(dir / "sim.json"));
    EXPECT_TRUE(j.dump().find("AoI_bar") != std::string::npos);
}
