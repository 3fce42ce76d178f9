#pragma once

#include "socialsim/geo.hpp"
#include "socialsim/memory.hpp"
#include "socialsim/needs.hpp"
#include "socialsim/planning.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace socialsim {

// ---- prompt templates ----

struct PromptTemplate {
    std::string name;
    std::string body;
};

// Substitutes {variable} placeholders. Placeholders are word-shaped
// ({foo_bar}); braces around JSON in example-output blocks stay untouched.
// A placeholder with no matching context entry is an error naming it.
std::string render_prompt(const PromptTemplate& tpl,
                          const std::map<std::string, std::string>& context);

// Placeholder names appearing in a template body, in order of first use.
std::vector<std::string> template_placeholders(const std::string& body);

// The eleven template names, fixed order: motivation 1-3, planning 1-3,
// learning 1-5. File names under the prompt directory are "<name>.txt".
const std::vector<std::string>& template_names();

using PromptLibrary = std::map<std::string, PromptTemplate>;
PromptLibrary load_prompt_library(const std::string& dir);

// Validates a structured response against the template's expected shape.
// Returns human-readable violations; empty means conforming.
std::vector<std::string> validate_response(const std::string& template_name,
                                           const nlohmann::json& doc);

// ---- backend interface ----

struct PoiSnapshot {
    std::string id;
    std::string category;
    Point location{0.0, 0.0};
    double distance_km = 0.0;
};

struct ProfileSnapshot {
    std::string id;
    std::string name;
    int age = 0;
    std::string health_status;
    std::string income_group; // high, low, other
    std::string home_poi;
    std::string work_poi;
};

// Everything a backend may look at for one request. Built fresh per call from
// the previous tick's world snapshot, so concurrent agents cannot see each
// other's in-tick mutations.
struct CognitionContext {
    std::uint64_t seed = 0;
    std::string agent_id;
    std::int64_t tick = 0;
    std::string current_time;
    std::string weather;
    ProfileSnapshot profile;
    std::map<std::string, double> needs;
    std::set<std::string> drive_needs; // evolve only via drive accumulation, never appraised
    std::optional<std::string> activated_need;
    std::string location_poi; // empty while in transit
    Point location{0.0, 0.0};
    CoordinateSystem coords = CoordinateSystem::planar_km;
    std::vector<PoiSnapshot> pois; // sorted by (distance, id)
    std::vector<std::pair<std::string, std::string>> friend_homes; // (agent, poi)
    double restriction_level = 0.0;
    std::vector<EventRecord> active_events;
    std::vector<EventRecord> passive_events;
    const MemoryStore* memory = nullptr; // null when learning is ablated
    std::vector<std::string> memory_results;
    double far_distance_km = 5.0;
};

struct BasicNeedsInit {
    double hunger = 0.3;
    double fatigue = 0.2;
    bool conforming = true;
};

struct HighLevelNeedsInit {
    std::map<std::string, double> values;
    std::string reasoning;
    bool conforming = true;
};

struct AppraisalResult {
    std::vector<EventAppraisal> appraisals;
    std::string reasoning;
    bool conforming = true;
};

struct CandidateResult {
    std::vector<BehaviorCandidate> candidates;
    bool conforming = true;
};

struct ScoreResult {
    TpbScores scores;
    bool conforming = true;
};

struct GroundResult {
    ActionSequence sequence;
    bool conforming = true;
};

struct ThoughtsResult {
    std::string thoughts;
    std::string attitude;
    std::string reflection;
    bool conforming = true;
};

struct EmotionResult {
    std::string updated_emotion;
    std::string reasoning;
    bool conforming = true;
};

struct StructuredExperience {
    std::string event;
    std::string emotion;
    std::string outcome;
};

struct ExperiencesResult {
    std::vector<StructuredExperience> entries;
    bool conforming = true;
};

struct QueriesResult {
    std::vector<MemoryQuery> queries;
    bool conforming = true;
};

struct StrategiesResult {
    std::vector<std::string> strategies;
    bool conforming = true;
};

using TranscriptSink = std::function<void(const nlohmann::json&)>;

class CognitionBackend {
public:
    virtual ~CognitionBackend() = default;

    virtual std::string kind() const = 0;

    // True when concurrent agents may call into the backend from worker
    // threads. Backends holding per-request connection state say no and the
    // world falls back to sequential stepping.
    virtual bool thread_safe() const { return false; }

    virtual BasicNeedsInit init_basic_needs(const CognitionContext& ctx) = 0;
    virtual HighLevelNeedsInit init_high_level_needs(const CognitionContext& ctx) = 0;
    virtual AppraisalResult appraise_events(const CognitionContext& ctx) = 0;
    virtual CandidateResult generate_candidates(const CognitionContext& ctx) = 0;
    virtual ScoreResult score_candidate(const CognitionContext& ctx,
                                        const BehaviorCandidate& candidate) = 0;
    virtual GroundResult ground_action(const CognitionContext& ctx, const Intention& intention) = 0;
    virtual ThoughtsResult generate_thoughts(const CognitionContext& ctx,
                                             const EventRecord& event) = 0;
    virtual EmotionResult update_emotion(const CognitionContext& ctx) = 0;
    virtual ExperiencesResult structure_experiences(const CognitionContext& ctx) = 0;
    virtual QueriesResult formulate_queries(const CognitionContext& ctx) = 0;
    virtual StrategiesResult abstract_strategies(const CognitionContext& ctx,
                                                 const std::vector<const MemoryNode*>& nodes) = 0;

    void set_transcript_sink(TranscriptSink sink) { sink_ = std::move(sink); }

protected:
    void log_exchange(const CognitionContext& ctx, const std::string& op,
                      const nlohmann::json& request, const nlohmann::json& response,
                      bool conforming) const;

private:
    TranscriptSink sink_;
};

// Clamps scores into [0, 1]; sets *flagged when anything was out of range.
TpbScores clamp_scores(TpbScores scores, bool* flagged = nullptr);

} // namespace socialsim
