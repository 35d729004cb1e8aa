#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "jumpkit/pipeline.hpp"

using namespace jumpkit;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("jumpkit_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PipelineConfig small_panel(const fs::path& out) {
    PipelineConfig cfg;
    cfg.output_dir = out;
    cfg.scenario.n = 3000;
    cfg.panel.null_days = 24;
    cfg.panel.jump_days = 8;
    cfg.panel.jump_log_median = 0.03;
    cfg.seed = 11;
    return cfg;
}

void run_all(const PipelineConfig& cfg) {
    cmd_simulate(cfg);
    cmd_detect(cfg);
    cmd_fdr(cfg);
    cmd_features(cfg);
    cmd_probit(cfg);
    cmd_impact(cfg);
    cmd_report(cfg);
}

int run_cli(const std::string& args) {
    const int rc = std::system((std::string(JUMPKIT_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Pipeline, EndToEndDeterministic) {
    const auto a = scratch("a");
    const auto b = scratch("b");
    run_all(small_panel(a));
    run_all(small_panel(b));
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        const auto name = e.path().filename();
        EXPECT_NE(name.extension(), ".tmp");
        ASSERT_TRUE(fs::exists(b / name)) << name;
        EXPECT_EQ(slurp(e.path()), slurp(b / name)) << name;
        ++files;
    }
    EXPECT_GE(files, 20u);
    for (const char* f : {"detections.csv", "fdr.json", "rejected.csv", "features_5m.csv", "features_10m.csv",
                          "probit.json", "impact.json", "report.txt", "report.json", "fig_pvalues.csv",
                          "profile_all.csv", "factors.csv", "truth.csv"}) {
        EXPECT_TRUE(fs::exists(a / f)) << f;
    }
    const auto fdr = nlohmann::json::parse(slurp(a / "fdr.json"));
    EXPECT_GE(fdr.at("days_rejected").get<std::size_t>(), 1u);
    const auto days = [&] {
        std::ifstream in(a / "detections.csv");
        return read_detections_csv(in);
    }();
    EXPECT_EQ(days.size(), 32u);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Pipeline, IngestRawFile) {
    const auto dir = scratch("ingest");
    const auto raw = dir / "raw.csv";
    {
        std::ofstream o(raw);
        o << "date,tid,user,type,currency,amount_fiat,amount_btc,fee_fiat,fee_btc\n";
        for (int i = 0; i < 50; ++i) {
            const auto tid = std::to_string(1309219920000000LL + i * 1000000LL);
            const double px = 17.0 + 0.01 * (i % 5);
            o << "2011-06-28," << tid << ",A,buy,USD," << 10 * px << ",10,0,0\n";
            o << "2011-06-28," << tid << ",B,sell,USD," << 10 * px << ",10,0,0\n";
        }
        o << "garbage line\n";
    }
    PipelineConfig cfg;
    cfg.inputs = {raw};
    cfg.output_dir = dir / "out";
    cmd_ingest(cfg);
    std::ifstream in(cfg.output_dir / "ticks.csv");
    EXPECT_EQ(read_ticks_csv(in).size(), 50u);
    const auto rep = nlohmann::json::parse(slurp(cfg.output_dir / "cleaning_report.json"));
    EXPECT_EQ(rep.at("unparseable_lines").get<int>(), 1);
    fs::remove_all(dir);
}

TEST(Pipeline, ExitCodes) {
    EXPECT_EQ(exit_code_for(ConfigError("x")), 2);
    EXPECT_EQ(exit_code_for(MalformedTradeId("x")), 3);
    EXPECT_EQ(exit_code_for(InsufficientData("x")), 3);
    EXPECT_EQ(exit_code_for(RankDeficientDesign("x")), 4);
    EXPECT_EQ(exit_code_for(SeparationError("x")), 4);
    EXPECT_EQ(exit_code_for(std::runtime_error("x")), 1);

    PipelineConfig cfg;
    EXPECT_THROW(cmd_ingest(cfg), ConfigError);
    cfg.output_dir = scratch("missing");
    EXPECT_THROW(cmd_detect(cfg), DataError);
    fs::remove_all(cfg.output_dir);
}

TEST(Pipeline, CliExitCodes) {
    const auto dir = scratch("cli");
    EXPECT_EQ(run_cli("--no-such-flag detect"), 2);
    EXPECT_EQ(run_cli(""), 2);
    EXPECT_EQ(run_cli("--output-dir " + dir.string() + " ingest"), 2);
    EXPECT_EQ(run_cli("--output-dir " + dir.string() + " detect"), 3);
    EXPECT_EQ(run_cli("--q 1.5 --output-dir " + dir.string() + " fdr"), 2);
    EXPECT_EQ(run_cli("--seed 4 --output-dir " + dir.string() + " simulate"), 0);
    EXPECT_TRUE(fs::exists(dir / "ticks.csv"));
    EXPECT_EQ(run_cli("--output-dir " + dir.string() + " detect"), 0);
    fs::remove_all(dir);
}

TEST(PipelineConfig, JsonKeysAndDefaults) {
    const auto j = nlohmann::json::parse(R"({
        "paths": {"inputs": ["a.csv", "b.csv"], "output_dir": "o"},
        "jump_test": {"k": 3},
        "fdr_q": 0.05,
        "bar_widths_minutes": [15],
        "impact": {"span_minutes": 10, "n_spans": 3},
        "seed": 7
    })");
    const auto c = config_from_json(j);
    EXPECT_EQ(c.inputs.size(), 2u);
    EXPECT_EQ(c.output_dir, fs::path("o"));
    EXPECT_EQ(c.jump.k, 3);
    EXPECT_EQ(c.impact.k, 3);
    EXPECT_EQ(c.fdr_q, 0.05);
    EXPECT_EQ(c.bar_widths_minutes, std::vector<int>{15});
    EXPECT_EQ(c.impact.span, std::chrono::minutes{10});
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.jump.block_const, PipelineConfig{}.jump.block_const);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"fdr_q": "high"})")), ConfigError);
}

TEST(PipelineConfig, Validation) {
    PipelineConfig c;
    c.fdr_q = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.bar_widths_minutes = {7};
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(PipelineConfig, EnvironmentOverrides) {
    PipelineConfig c;
    c.output_dir = "from_file";
    ::setenv("JUMPKIT_OUTPUT_DIR", "from_env", 1);
    ::setenv("JUMPKIT_INPUT", "x.csv,y.csv", 1);
    apply_env_overrides(c);
    ::unsetenv("JUMPKIT_OUTPUT_DIR");
    ::unsetenv("JUMPKIT_INPUT");
    EXPECT_EQ(c.output_dir, fs::path("from_env"));
    EXPECT_EQ(c.inputs, (std::vector<fs::path>{"x.csv", "y.csv"}));
}

TEST(Atomic, FailedWriteLeavesNothing) {
    const auto dir = scratch("atomic");
    const auto target = dir / "out.txt";
    EXPECT_THROW(write_atomic(target,
                              [](std::ostream& o) {
                                  o << "partial";
                                  throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
    EXPECT_FALSE(fs::exists(target));
    EXPECT_TRUE(fs::is_empty(dir));

    write_atomic(target, [](std::ostream& o) { o << "old"; });
    EXPECT_THROW(write_atomic(target, [](std::ostream&) { throw std::runtime_error("boom"); }),
                 std::runtime_error);
    EXPECT_EQ(slurp(target), "old");
    fs::remove_all(dir);
}
