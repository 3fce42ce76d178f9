#pragma once

#include "socialsim/cognition.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>

namespace socialsim {

// Tunables for the rule-table backend. Defaults are the documented engine
// defaults; config can override the satisfaction table.
struct OracleParams {
    double travel_speed_kmh = 20.0;
    // Safety appraisal of a restriction event decays with the number of
    // restriction memories the agent holds (habituation). Rate depends on
    // income group; with no memory the delta stays at base, so learning is
    // what bends the adaptation curve.
    double restriction_base_delta = 0.016;
    std::map<std::string, double> habituation = {
        {"high", 0.35}, {"low", 0.12}, {"other", 0.20}};
    // Per-agent sensitivity of physical-action attitude to the safety level,
    // drawn reciprocal-uniformly across [caution_min, caution_max]. The wide
    // spread staggers when agents give up outings as caution builds. Both
    // bounds must stay positive.
    double caution_min = 0.3;
    double caution_max = 2.2;
    // Per-agent attitude jitter amplitude; zero makes scores exactly the
    // base-table values, which pinned tests rely on.
    double attitude_jitter = 0.08;
    double distance_control_penalty = 0.08; // control lost per km to the target
    double norm_restriction_penalty = 0.2;  // norm lost at full restriction
    double remote_far_bonus = 0.1; // control bonus when physical options are far
    // category -> (need, reduction applied when the action completes)
    std::map<std::string, std::pair<std::string, double>> satisfaction = {
        {"eat", {"hunger", 0.6}},       {"rest", {"fatigue", 0.7}},
        {"social", {"social_need", 0.45}}, {"growth", {"esteem", 0.4}},
        {"enrich", {"self_actualization", 0.4}}, {"safety", {"safety", 0.3}},
    };
};

class OracleBackend : public CognitionBackend {
public:
    explicit OracleBackend(std::uint64_t seed, OracleParams params = {})
        : seed_(seed), params_(std::move(params)) {}

    std::string kind() const override { return "oracle"; }
    bool thread_safe() const override { return true; }

    BasicNeedsInit init_basic_needs(const CognitionContext& ctx) override;
    HighLevelNeedsInit init_high_level_needs(const CognitionContext& ctx) override;
    AppraisalResult appraise_events(const CognitionContext& ctx) override;
    CandidateResult generate_candidates(const CognitionContext& ctx) override;
    ScoreResult score_candidate(const CognitionContext& ctx,
                                const BehaviorCandidate& candidate) override;
    GroundResult ground_action(const CognitionContext& ctx, const Intention& intention) override;
    ThoughtsResult generate_thoughts(const CognitionContext& ctx,
                                     const EventRecord& event) override;
    EmotionResult update_emotion(const CognitionContext& ctx) override;
    ExperiencesResult structure_experiences(const CognitionContext& ctx) override;
    QueriesResult formulate_queries(const CognitionContext& ctx) override;
    StrategiesResult abstract_strategies(const CognitionContext& ctx,
                                         const std::vector<const MemoryNode*>& nodes) override;

    const OracleParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }

    // Per-agent stable draw in [0,1), independent of tick.
    double agent_draw(const std::string& agent_id, const std::string& salt) const;

private:
    std::uint64_t seed_;
    OracleParams params_;
};

} // namespace socialsim
