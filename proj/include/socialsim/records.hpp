#pragma once

#include "socialsim/geo.hpp"
#include "socialsim/planning.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace socialsim {

// Fixed file names inside a run's output directory.
inline constexpr const char* kTrajectoryFile = "trajectory.jsonl";
inline constexpr const char* kDecisionFile = "decisions.jsonl";
inline constexpr const char* kMemoryFile = "memory.jsonl";
inline constexpr const char* kTranscriptFile = "transcript.jsonl";
inline constexpr const char* kCheckpointDir = "checkpoints";

// One record per agent per tick. poi_id is empty while the agent is between
// POIs; poi_category then reads "in_transit".
struct TrajectoryRecord {
    std::string agent_id;
    std::int64_t tick = 0;
    std::string time; // ISO-8601 simulated timestamp
    std::string poi_id;
    std::string poi_category;
    Point location{0.0, 0.0};
    std::optional<std::string> activated_need;
    std::optional<std::string> action_id;
    std::map<std::string, double> needs; // optional extension; empty = omitted

    nlohmann::json to_json() const;
    static TrajectoryRecord from_json(const nlohmann::json& j);
};

struct ScoredCandidateRecord {
    BehaviorCandidate candidate;
    std::optional<TpbScores> scores; // absent when planning is ablated
    std::optional<double> intention;
};

// One record per planning decision (not per tick).
struct DecisionRecord {
    std::string agent_id;
    std::int64_t tick = 0;
    std::string time;
    std::string activated_need;
    std::map<std::string, double> needs;
    std::vector<ScoredCandidateRecord> candidates;
    TpbWeights weights;
    std::string chosen_id;
    std::size_t chosen_index = 0;
    bool scored = true;     // false when planning is ablated
    bool tie_broken = false;
    bool fallback = false;  // backend failed; in-place rest substituted
    std::vector<ActionStep> steps;
    std::map<std::string, double> satisfies;

    nlohmann::json to_json() const;
    static DecisionRecord from_json(const nlohmann::json& j);
};

// Line-delimited JSON writer. The first line of every file is a header record
// {"kind": ..., "schema": "socialsim/v1"}; appends skip the header.
class JsonlWriter {
public:
    JsonlWriter() = default;
    JsonlWriter(const std::string& path, const std::string& kind, bool append = false);

    void open(const std::string& path, const std::string& kind, bool append = false);
    void write(const nlohmann::json& record);
    void flush();
    std::uint64_t bytes() const; // current file size, valid after flush

    bool is_open() const { return out_.is_open(); }

private:
    std::ofstream out_;
    std::string path_;
};

// Reads a line-delimited file, validating the header's kind and schema.
// Returns the records after the header.
std::vector<nlohmann::json> read_jsonl(const std::string& path, const std::string& expected_kind);

// Truncates a log file to byte_count bytes (used when resuming from a
// checkpoint that predates the file tail).
void truncate_file(const std::string& path, std::uint64_t byte_count);

nlohmann::json jsonl_header(const std::string& kind);

} // namespace socialsim
