#pragma once

#include "socialsim/cognition.hpp"
#include "socialsim/oracle.hpp"

#include <memory>
#include <string>

namespace socialsim {

// Connection settings for a generic chat-completion endpoint. Credentials come
// from SOCIALSIM_REMOTE_BASE_URL, SOCIALSIM_REMOTE_MODEL and
// SOCIALSIM_REMOTE_API_KEY; only the base URL is mandatory.
struct RemoteConfig {
    std::string base_url;
    std::string model = "default";
    std::string api_key;
    std::string prompts_dir = "prompts";
    int timeout_seconds = 30;
    int max_attempts = 2; // first try plus one retry on nonconforming output
};

RemoteConfig remote_config_from_env(const std::string& prompts_dir);

// Renders the Appendix-style templates, posts them to the endpoint, parses the
// structured reply, and falls back to conservative defaults when the reply
// stays nonconforming after a retry. Satisfaction magnitudes and grounding
// fall-backs reuse the oracle defaults so both backends steer the same world.
class RemoteBackend : public CognitionBackend {
public:
    explicit RemoteBackend(RemoteConfig config);
    ~RemoteBackend() override;

    std::string kind() const override { return "remote"; }

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

private:
    struct Impl;

    // Renders template `name` with `vars`, posts it (plus an optional inline
    // context block for placeholder-free templates), and returns the parsed
    // document once it validates. Nullopt after all attempts fail.
    std::optional<nlohmann::json> exchange(const CognitionContext& ctx, const std::string& name,
                                           const std::map<std::string, std::string>& vars,
                                           const std::string& extra_context,
                                           bool* range_flagged = nullptr);

    RemoteConfig config_;
    PromptLibrary prompts_;
    OracleParams defaults_;
    std::unique_ptr<Impl> impl_;
};

// Pulls the assistant text out of a chat-completion reply and strips an
// optional markdown code fence. Exposed for tests.
std::string extract_completion_text(const nlohmann::json& reply);
std::string strip_code_fence(const std::string& text);

} // namespace socialsim
