// jumpkit: stage runner for the jump-detection pipeline.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "jumpkit/pipeline.hpp"

using namespace jumpkit;

int main(int argc, char** argv) {
    CLI::App app{"High-frequency jump detection pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> inputs;
    std::string output_dir;
    std::string band_file;
    std::optional<double> q;
    std::optional<int> bar_width;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;

    app.add_option("--config", config_path, "JSON config file (defaults are used for missing keys)");
    app.add_option("--input", inputs, "Input file(s); raw trade files for ingest, otherwise the stage's primary artifact");
    app.add_option("--output-dir", output_dir, "Artifact directory (default: jumpkit_out)");
    app.add_option("--band-file", band_file, "Daily low/high band file for ingest");
    app.add_option("--q", q, "FDR target level (default: 0.10)");
    app.add_option("--bar-width", bar_width, "Bar width in minutes; replaces the default 5 and 10");
    app.add_option("--seed", seed, "Simulation seed (default: 1)");
    app.add_option("--threads", threads, "Worker threads for per-day stages (default: 1)");

    const std::map<std::string, std::pair<std::string, Artifacts (*)(const PipelineConfig&)>> commands = {
        {"ingest", {"Clean raw trade legs into ticks.csv and cleaning_report.json", &cmd_ingest}},
        {"detect", {"Run the daily jump test, writing detections.csv", &cmd_detect}},
        {"fdr", {"Apply Benjamini-Hochberg selection, writing fdr.json and rejected.csv", &cmd_fdr}},
        {"features", {"Build per-period covariates, writing features_<w>m.csv", &cmd_features}},
        {"probit", {"Fit the jump probit, writing probit.json and probit.txt", &cmd_probit}},
        {"impact", {"Post-jump t-tests and price profiles", &cmd_impact}},
        {"simulate", {"Simulate tick days, writing ticks.csv and truth.csv", &cmd_simulate}},
        {"report", {"Consolidated tables and figure data", &cmd_report}},
    };
    for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
        apply_env_overrides(cfg);
        if (!inputs.empty()) cfg.inputs.assign(inputs.begin(), inputs.end());
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        if (!band_file.empty()) cfg.band_file = band_file;
        if (q) cfg.fdr_q = *q;
        if (bar_width) cfg.bar_widths_minutes = {*bar_width};
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;

        for (const auto* sub : app.get_subcommands()) {
            const auto& fn = commands.at(sub->get_name()).second;
            for (const auto& path : fn(cfg)) std::cout << path.string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "jumpkit: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}
