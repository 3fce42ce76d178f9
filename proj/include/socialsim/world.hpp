#pragma once

#include "socialsim/cognition.hpp"
#include "socialsim/config.hpp"
#include "socialsim/records.hpp"
#include "socialsim/util.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace socialsim {

// Resolved agent identity; weights already fall back to the run-level ones.
struct AgentProfile {
    std::string id;
    std::string name;
    int age = 30;
    std::string health_status = "good";
    std::string income_group = "other";
    std::string home_poi;
    std::string work_poi;
    TpbWeights weights;
    std::vector<std::string> social_ties;
};

struct TransitState {
    std::string to_poi;
    Point from{0.0, 0.0};
    std::int64_t total = 0;   // ticks for the whole leg
    std::int64_t elapsed = 0; // ticks already spent
};

// An action being executed: candidate, grounded steps, and progress.
struct PlanState {
    BehaviorCandidate candidate;
    ActionSequence sequence;
    std::string need; // the activated need that motivated the plan
    std::size_t step = 0;
    std::int64_t dwell_done = 0;
    std::optional<TransitState> transit;
};

// Full per-agent simulation state. Copyable: the tick loop computes each
// agent's next state from an immutable snapshot and commits at the barrier.
struct AgentRuntime {
    AgentProfile profile;
    NeedState needs;
    MemoryStore memory;
    std::string at_poi; // empty while in transit
    Point position{0.0, 0.0};
    std::optional<PlanState> plan;
    SatisfactionDelta pending_satisfaction;        // applied next tick
    std::vector<EventAppraisal> pending_completions; // applied next tick
    std::vector<EventRecord> pending_active;       // context for next tick
    std::vector<std::uint64_t> day_nodes;          // stream nodes written today
};

// A passive event waiting for delivery to one agent.
struct QueuedEvent {
    std::string agent_id;
    EventRecord event;
    std::int64_t deliver_tick = 0;
};

struct WorldSinks {
    std::function<void(const TrajectoryRecord&)> trajectory;
    std::function<void(const DecisionRecord&)> decision;
    std::function<void(const nlohmann::json&)> transcript;
};

// Expands a generated roster into concrete agent specs (deterministic in the
// run seed); an inline roster passes through unchanged.
std::vector<AgentSpec> expand_roster(const RunConfig& config, const std::vector<PoiConfig>& pois);

// The discrete-time kernel. One step() advances every agent by one tick:
// event delivery, need dynamics, activation, planning, one execution step,
// then learning. Agents are processed against the previous tick's snapshot
// and committed at the tick barrier in agent-id order, so sequential and
// concurrent execution produce identical logs.
class World {
public:
    // Expects a resolved config: POIs inline and the roster expanded.
    // Throws InputError on duplicate POI ids or dangling references.
    World(RunConfig config, CognitionBackend& backend);

    void set_sinks(WorldSinks sinks) { sinks_ = std::move(sinks); }

    // Fresh start: asks the backend for initial need levels (unless the
    // config pins them) and places agents at home. Call exactly one of
    // init_agents/restore before stepping.
    void init_agents();

    // Resumes from a checkpoint() snapshot.
    void restore(const nlohmann::json& snapshot);
    nlohmann::json checkpoint() const;

    void step();

    std::int64_t clock() const { return clock_; }
    int day() const { return static_cast<int>(clock_ / kTicksPerDay); }
    double restriction_level() const { return restriction_; }

    const std::vector<std::string>& agent_ids() const { return agent_ids_; }
    const AgentRuntime& agent(const std::string& id) const;
    const std::map<std::string, PoiConfig>& pois() const { return pois_; }
    const RunConfig& config() const { return config_; }

private:
    struct Outcome {
        AgentRuntime next;
        TrajectoryRecord trajectory;
        std::optional<DecisionRecord> decision;
        std::vector<QueuedEvent> outbound;
        std::vector<nlohmann::json> transcripts;
    };

    // One learned-this-tick item: a completed action or a delivered passive.
    struct LearnedEvent {
        EventRecord event;
        bool completion = false;
        BehaviorCandidate candidate; // valid when completion
        double assoc_delta = 0.0;    // largest need change tied to the event
    };

    void begin_tick();
    Outcome process_agent(const AgentRuntime& prev) const;
    void commit(std::vector<Outcome>& outcomes);

    CognitionContext build_context(const AgentRuntime& a, std::int64_t t) const;
    std::vector<std::string> retrieve_contents(const AgentRuntime& a, const std::string& question,
                                               std::int64_t t) const;
    void plan_agent(AgentRuntime& a, const std::string& need, std::int64_t t,
                    Outcome& out) const;
    void execute_tick(AgentRuntime& a, std::int64_t t, Outcome& out,
                      std::vector<LearnedEvent>& learned) const;
    void learn_tick(AgentRuntime& a, std::int64_t t, std::vector<LearnedEvent>& learned,
                    const std::optional<std::string>& need_context) const;
    void complete_sequence(AgentRuntime& a, std::int64_t t, Outcome& out,
                           std::vector<LearnedEvent>& learned) const;
    const PoiConfig& poi_at(const std::string& id) const;
    double agent_distance(const AgentRuntime& a, const std::string& poi_id) const;

    RunConfig config_;
    CognitionBackend& backend_;
    WorldSinks sinks_;

    std::map<std::string, PoiConfig> pois_;
    std::map<std::string, AgentProfile> profiles_;
    std::vector<std::string> agent_ids_; // sorted; processing and commit order
    std::map<std::string, AgentRuntime> agents_;
    std::vector<QueuedEvent> queue_;
    std::map<std::string, double> thresholds_;

    std::int64_t clock_ = 0;
    double restriction_ = 0.0;
    std::int64_t epoch_day_ = 0;
    bool initialized_ = false;
};

} // namespace socialsim
