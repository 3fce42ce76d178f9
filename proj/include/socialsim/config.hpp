#pragma once

#include "socialsim/geo.hpp"
#include "socialsim/memory.hpp"
#include "socialsim/needs.hpp"
#include "socialsim/planning.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace socialsim {

// Every persisted document (config, logs, checkpoints, manifests) carries
// this tag; readers reject anything else.
inline constexpr const char* kSchemaTag = "socialsim/v1";

enum class ExecutionMode { sequential, concurrent };

const char* execution_mode_name(ExecutionMode mode);
ExecutionMode execution_mode_from_name(const std::string& name);

const char* coordinate_system_name(CoordinateSystem cs);
CoordinateSystem coordinate_system_from_name(const std::string& name);

struct AblationFlags {
    bool disable_motivation = false;
    bool disable_planning = false;
    bool disable_learning = false;

    bool any() const { return disable_motivation || disable_planning || disable_learning; }
};

struct PoiConfig {
    std::string id;
    std::string category;
    Point location{0.0, 0.0};
};

struct AgentSpec {
    std::string id;
    std::string name;
    int age = 30;
    std::string health_status = "good";
    std::string income_group = "other"; // high, low, other
    std::string home_poi;
    std::string work_poi;
    std::optional<TpbWeights> weights; // falls back to the run-level weights
    std::vector<std::string> social_ties;
};

struct GeneratorSpec {
    int count = 0;
    std::map<std::string, double> income_mix; // group -> share
    int ties_per_agent = 2;
};

struct NeedSpec {
    NeedTier tier = NeedTier::physiological;
    double cap = 1.0;
    std::optional<double> growth; // present = drive-governed
    double threshold = 0.6;
    std::optional<double> initial; // absent = backend-initialized
};

struct RestrictionStage {
    int from_day = 0;
    double level = 0.0;
};

// Scripted passive event: delivered at tick_of_day on every matching day.
struct ScenarioEventSpec {
    std::string description;
    std::string source = "environment";
    int tick_of_day = 0;
    int from_day = 0;
    std::optional<int> to_day; // inclusive; absent = until run end
    int every_days = 1;
    std::vector<std::string> agents; // empty = everyone
};

struct OracleOverrides {
    std::optional<double> restriction_base_delta;
    std::optional<double> caution_min;
    std::optional<double> caution_max;
    std::optional<double> attitude_jitter;
    std::optional<std::map<std::string, double>> habituation;
};

struct BackendSpec {
    std::string kind = "oracle"; // oracle | remote
    std::string prompts_dir = "prompts"; // remote only; credentials come from env
    OracleOverrides oracle;
};

struct SatisfactionSpec {
    std::string need;
    double amount = 0.0;
};

struct PlanningSpec {
    int max_candidates = 5;
    double far_distance_km = 5.0;
};

struct MemorySpec {
    RetrievalParams retrieval;
    int retrieve_limit = 5;
};

struct RunConfig {
    std::uint64_t seed = 0;
    int days = 0;                // exactly one of days/ticks is set
    std::int64_t ticks = 0;
    std::string start_date = "2024-01-01";
    CoordinateSystem coordinates = CoordinateSystem::planar_km;
    ExecutionMode execution = ExecutionMode::sequential;
    std::string weather = "clear";
    std::string output_dir = "out";

    std::vector<PoiConfig> pois; // exactly one of pois/poi_dataset
    std::string poi_dataset;

    std::vector<AgentSpec> roster; // exactly one of roster/generator
    std::optional<GeneratorSpec> generator;

    std::map<std::string, NeedSpec> needs;
    TpbWeights tpb_weights;
    BackendSpec backend;
    AblationFlags ablation;
    std::vector<RestrictionStage> restrictions;
    std::vector<ScenarioEventSpec> scenario_events;
    std::map<std::string, SatisfactionSpec> satisfaction; // category -> effect
    PlanningSpec planning;
    MemorySpec memory;
    double travel_speed_kmh = 20.0;
    int checkpoint_every_days = 1;
    bool log_needs = true; // include the need vector in trajectory records

    std::int64_t total_ticks() const;
};

// Strict structural parse: unknown keys, bad types, and out-of-range values
// all throw InputError naming the offending path. Filesystem references are
// not checked here; see resolve_config_paths.
RunConfig parse_run_config(const nlohmann::json& doc);

// Canonical serialization; parse(run_config_to_json(c)) reproduces c, and
// serialize-parse-serialize is byte-stable.
nlohmann::json run_config_to_json(const RunConfig& config);

// Reads and parses a config file, resolving poi_dataset and prompts_dir
// relative to the file's directory and requiring them to exist. output_dir
// stays relative to the working directory.
RunConfig load_run_config(const std::string& path);

// Rebases input paths onto base_dir and verifies they exist.
void resolve_config_paths(RunConfig& config, const std::string& base_dir);

} // namespace socialsim
