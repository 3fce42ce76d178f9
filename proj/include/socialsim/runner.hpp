#pragma once

#include "socialsim/cognition.hpp"
#include "socialsim/config.hpp"
#include "socialsim/records.hpp"
#include "socialsim/world.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace socialsim {

// File names the run orchestration adds to an output directory.
inline constexpr const char* kRunConfigFile = "config.json"; // inside checkpoints/
inline constexpr const char* kAblationManifestFile = "ablation_manifest.json";
inline constexpr const char* kReportJsonFile = "report.json";
inline constexpr const char* kReportCsvFile = "report.csv";

// Builds the backend the config names. The oracle inherits the run's travel
// speed plus any tuning overrides; the remote backend reads its endpoint and
// credentials from the environment.
std::unique_ptr<CognitionBackend> make_backend(const RunConfig& config);

// Inlines a POI dataset and expands a generated roster so the config stands
// alone, then revalidates the result. base_dir anchors relative input paths.
RunConfig resolve_run_config(RunConfig config, const std::string& base_dir);

// load + RFC 7386 merge patch + resolve in one step.
RunConfig load_resolved_config(const std::string& config_path, const nlohmann::json& overrides);

struct SimulateResult {
    std::string output_dir;
    std::vector<std::string> files; // trajectory, decisions, memory, transcript
    std::int64_t ticks = 0;         // simulated so far
    bool resumed = false;
};

// A simulation bound to its output directory. Construction either starts
// fresh or, when the directory holds checkpoints written by the same config,
// resumes after the last completed day (log tails past the checkpoint are
// truncated). A directory holding a different run's state is refused.
class SimSession {
public:
    explicit SimSession(RunConfig resolved);

    int total_days() const;   // partial trailing day counts as one
    int current_day() const;  // completed days
    bool done() const;
    bool resumed() const { return resumed_; }
    const std::string& output_dir() const { return out_dir_; }

    // Advances up to n simulated days. Writes a checkpoint at the configured
    // cadence and always at the end of the run; finishing also writes the
    // memory log.
    void run_days(int n);

    // Runs to the end and returns the output paths.
    SimulateResult finish();

private:
    void open_writers(bool append);
    void write_checkpoint();
    void write_memory_log();
    std::int64_t ticks_remaining() const;

    RunConfig config_;
    std::unique_ptr<CognitionBackend> backend_;
    std::unique_ptr<World> world_;
    JsonlWriter trajectory_, decisions_, transcript_;
    std::string out_dir_;
    std::string checkpoint_dir_;
    bool resumed_ = false;
    bool memory_written_ = false;
};

// Fresh-or-resumed full run.
SimulateResult simulate(const RunConfig& resolved);

struct AblateRun {
    std::string label; // full, woM, woP, woL
    std::string dir;
};

struct AblateResult {
    std::string manifest_path;
    std::vector<AblateRun> runs;
};

// Runs the full model plus one ablated variant per axis (M, P, L) with the
// same seed under <output_dir>/<label> and writes the comparison manifest.
AblateResult ablate(const RunConfig& resolved, const std::vector<std::string>& axes);

struct EvaluateOptions {
    std::optional<std::string> reference_trajectories; // canonical dataset file
    std::optional<std::string> group_profiles;         // canonical dataset file
};

// target: one run directory, or an ablation manifest (the file or the
// directory holding it). Writes report.json and report.csv next to the
// target and returns the report. Reference-dependent metrics are omitted
// when no reference is given.
nlohmann::json evaluate(const std::string& target, const EvaluateOptions& options = {});

struct IngestResult {
    std::string output_path;
    std::string manifest_path;
    nlohmann::json manifest;
};

// kind: poi_table | trajectory_reference | group_profiles. Accepts CSV with
// a header row or line-delimited JSON, writes the canonical line-delimited
// form plus a dataset manifest. Malformed rows abort the ingest; the error
// lists each offending row number. Re-ingesting a canonical file reproduces
// it byte for byte.
IngestResult ingest(const std::string& input_path, const std::string& kind,
                    const std::string& output_path);

struct ReplayResult {
    std::string text;
    std::size_t events = 0; // one narrative event per underlying log record
};

// Renders one agent's day as a narrative from the run's logs.
ReplayResult replay(const std::string& run_dir, const std::string& agent_id, int day);

} // namespace socialsim
