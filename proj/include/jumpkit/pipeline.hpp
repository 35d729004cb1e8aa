#pragma once

// Stage commands over on-disk artifacts.

#include <exception>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "jumpkit/eventstudy.hpp"
#include "jumpkit/ingest.hpp"
#include "jumpkit/jumptest.hpp"
#include "jumpkit/multiplicity.hpp"
#include "jumpkit/probit.hpp"
#include "jumpkit/simkit.hpp"

namespace jumpkit {

namespace fs = std::filesystem;

struct PipelineConfig {
    std::vector<fs::path> inputs;  // raw trade files for ingest, else a stage's primary input
    fs::path band_file;
    fs::path output_dir = "jumpkit_out";

    JumpTestConfig jump;
    std::vector<int> bar_widths_minutes{5, 10};
    double fdr_q = 0.10;
    std::vector<SubPeriod> subperiods = default_subperiods();
    ImpactConfig impact;
    int profile_minutes_before = 60;
    int profile_minutes_after = 60;
    int profile_base_minutes = 30;  // normalization bar, minutes before the jump
    CleanConfig cleaning;
    BouncebackConfig bounceback;
    ProbitOptions probit;
    SimScenario scenario;
    PanelConfig panel;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    void validate() const;  // throws ConfigError
    ProfileConfig profile_config() const;
};

// Missing keys keep their defaults.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const fs::path& file);
// JUMPKIT_INPUT (comma-separated), JUMPKIT_OUTPUT_DIR, JUMPKIT_BAND_FILE.
void apply_env_overrides(PipelineConfig& cfg);

// Each command reads documented artifacts and writes its outputs atomically
// into cfg.output_dir. Returns the paths written.
using Artifacts = std::vector<fs::path>;
Artifacts cmd_ingest(const PipelineConfig& cfg);
Artifacts cmd_detect(const PipelineConfig& cfg);
Artifacts cmd_fdr(const PipelineConfig& cfg);
Artifacts cmd_features(const PipelineConfig& cfg);
Artifacts cmd_probit(const PipelineConfig& cfg);
Artifacts cmd_impact(const PipelineConfig& cfg);
Artifacts cmd_simulate(const PipelineConfig& cfg);
Artifacts cmd_report(const PipelineConfig& cfg);

// 0 ok, 2 config error, 3 data error, 4 numerical failure, 1 anything else.
int exit_code_for(const std::exception& e);

// Writes through a temporary sibling and renames over `path`.
void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body);

// Columns: date,n,tested,reason,statistic,p_value,loc_start_us,loc_end_us,
// loc_start,loc_end,jump_size,block_size,blocks,variance,sigma2T,q2
void write_detections_csv(std::ostream& out, std::span<const DayOutcome> days);
std::vector<DayOutcome> read_detections_csv(std::istream& in);

}  // namespace jumpkit
