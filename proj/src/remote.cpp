#include "socialsim/remote.hpp"

#include "socialsim/util.hpp"

#include <httplib.h>

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace socialsim {

namespace {

std::string env_or(const char* key, const std::string& fallback) {
    const char* v = std::getenv(key);
    return v && *v ? std::string(v) : fallback;
}

std::string join_events(const std::vector<EventRecord>& events) {
    if (events.empty()) return "(none)";
    std::string out;
    for (const auto& e : events) {
        if (!out.empty()) out += "; ";
        out += e.description;
    }
    return out;
}

std::string join_memory(const std::vector<std::string>& results) {
    if (results.empty()) return "(none)";
    std::string out;
    for (const auto& r : results) {
        if (!out.empty()) out += "\n";
        out += r;
    }
    return out;
}

std::string profile_text(const ProfileSnapshot& p) {
    std::ostringstream out;
    out << p.name << ", age " << p.age << ", health: " << p.health_status
        << ", income group: " << p.income_group;
    return out.str();
}

std::string needs_text(const std::map<std::string, double>& needs) {
    return nlohmann::json(needs).dump();
}

std::string infer_category(const std::string& description) {
    struct Rule {
        const char* category;
        std::vector<const char*> words;
    };
    static const std::vector<Rule> rules = {
        {"eat", {"eat", "food", "dinner", "meal", "restaurant", "cook", "delivery", "lunch",
                 "breakfast", "hungry"}},
        {"rest", {"rest", "sleep", "nap", "relax"}},
        {"social", {"friend", "friends", "social", "visit", "call", "meet", "party"}},
        {"safety", {"safe", "safety", "secure", "supplies", "shelter"}},
        {"growth", {"study", "exercise", "project", "learn", "practice", "library"}},
        {"enrich", {"museum", "journal", "reflect", "art", "culture", "exhibit"}},
    };
    for (const auto& rule : rules)
        for (const char* word : rule.words)
            if (contains_word(description, word)) return rule.category;
    return "general";
}

const PoiSnapshot* nearest_category(const CognitionContext& ctx,
                                    const std::vector<const char*>& categories) {
    for (const auto& poi : ctx.pois)
        for (const char* category : categories)
            if (poi.category == category) return &poi;
    return nullptr;
}

bool poi_exists(const CognitionContext& ctx, const std::string& id) {
    for (const auto& poi : ctx.pois)
        if (poi.id == id) return true;
    return false;
}

// Deterministic mapping from a free-text step or action to a world POI.
std::optional<std::string> infer_target(const CognitionContext& ctx, const std::string& text) {
    if (contains_word(text, "home") && poi_exists(ctx, ctx.profile.home_poi))
        return ctx.profile.home_poi;
    if ((contains_word(text, "office") || contains_word(text, "work")) &&
        poi_exists(ctx, ctx.profile.work_poi))
        return ctx.profile.work_poi;
    struct Rule {
        const char* word;
        std::vector<const char*> categories;
    };
    static const std::vector<Rule> rules = {
        {"restaurant", {"restaurant"}}, {"grocery", {"commerce"}}, {"store", {"commerce"}},
        {"shop", {"commerce"}},         {"library", {"library"}},  {"park", {"park"}},
        {"museum", {"museum"}},
    };
    for (const auto& rule : rules) {
        if (!contains_word(text, rule.word)) continue;
        if (const PoiSnapshot* poi = nearest_category(ctx, rule.categories)) return poi->id;
    }
    if (contains_word(text, "friend") &&
        (contains_word(text, "visit") || contains_word(text, "travel") ||
         contains_word(text, "go")) &&
        !ctx.friend_homes.empty() && poi_exists(ctx, ctx.friend_homes.front().second))
        return ctx.friend_homes.front().second;
    return std::nullopt;
}

} // namespace

RemoteConfig remote_config_from_env(const std::string& prompts_dir) {
    RemoteConfig config;
    config.base_url = env_or("SOCIALSIM_REMOTE_BASE_URL", "");
    config.model = env_or("SOCIALSIM_REMOTE_MODEL", "default");
    config.api_key = env_or("SOCIALSIM_REMOTE_API_KEY", "");
    config.prompts_dir = prompts_dir;
    if (config.base_url.empty())
        throw InputError("remote backend selected but SOCIALSIM_REMOTE_BASE_URL is not set");
    return config;
}

std::string extract_completion_text(const nlohmann::json& reply) {
    if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty())
        return "";
    const auto& first = reply["choices"][0];
    if (!first.contains("message") || !first["message"].contains("content") ||
        !first["message"]["content"].is_string())
        return "";
    return first["message"]["content"].get<std::string>();
}

std::string strip_code_fence(const std::string& text) {
    std::size_t begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return text;
    if (text.compare(begin, 3, "```") != 0) return text;
    std::size_t body_start = text.find('\n', begin);
    if (body_start == std::string::npos) return text;
    ++body_start;
    std::size_t fence_end = text.rfind("```");
    if (fence_end <= body_start) return text;
    std::size_t body_end = text.find_last_not_of(" \t\r\n", fence_end - 1);
    if (body_end == std::string::npos || body_end < body_start) return "";
    return text.substr(body_start, body_end - body_start + 1);
}

struct RemoteBackend::Impl {
    explicit Impl(const RemoteConfig& config) : client(config.base_url) {
        client.set_connection_timeout(config.timeout_seconds);
        client.set_read_timeout(config.timeout_seconds);
    }
    httplib::Client client;
};

RemoteBackend::RemoteBackend(RemoteConfig config)
    : config_(std::move(config)),
      prompts_(load_prompt_library(config_.prompts_dir)),
      impl_(std::make_unique<Impl>(config_)) {}

RemoteBackend::~RemoteBackend() = default;

std::optional<nlohmann::json> RemoteBackend::exchange(
    const CognitionContext& ctx, const std::string& name,
    const std::map<std::string, std::string>& vars, const std::string& extra_context,
    bool* range_flagged) {
    if (range_flagged) *range_flagged = false;
    std::string rendered = render_prompt(prompts_.at(name), vars);

    nlohmann::json request;
    request["model"] = config_.model;
    request["messages"] = nlohmann::json::array();
    request["messages"].push_back({{"role", "user"}, {"content", rendered}});
    if (!extra_context.empty())
        request["messages"].push_back({{"role", "user"}, {"content", extra_context}});

    httplib::Headers headers;
    if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);

    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
        auto res = impl_->client.Post("/v1/chat/completions", headers, request.dump(),
                                      "application/json");
        if (!res || res->status != 200) {
            log_exchange(ctx, name, {{"attempt", attempt}},
                         {{"transport_error", res ? res->status : -1}}, false);
            continue;
        }
        nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
        if (reply.is_discarded()) {
            log_exchange(ctx, name, {{"attempt", attempt}}, {{"parse_error", "envelope"}}, false);
            continue;
        }
        std::string text = strip_code_fence(extract_completion_text(reply));
        nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
        if (doc.is_discarded()) {
            log_exchange(ctx, name, {{"attempt", attempt}}, {{"parse_error", "content"}}, false);
            continue;
        }
        auto violations = validate_response(name, doc);
        bool ranged = false;
        std::vector<std::string> hard;
        for (const auto& violation : violations) {
            if (violation.find("out of [0,1]: ") != std::string::npos)
                ranged = true; // numeric but out of range: clamp downstream, keep the reply
            else
                hard.push_back(violation);
        }
        if (!hard.empty()) {
            log_exchange(ctx, name, {{"attempt", attempt}}, {{"violations", hard}}, false);
            continue;
        }
        if (range_flagged) *range_flagged = ranged;
        log_exchange(ctx, name, {{"attempt", attempt}, {"prompt_bytes", rendered.size()}},
                     {{"doc", doc}}, !ranged);
        return doc;
    }
    return std::nullopt;
}

BasicNeedsInit RemoteBackend::init_basic_needs(const CognitionContext& ctx) {
    std::map<std::string, std::string> vars = {
        {"name", ctx.profile.name},
        {"age", std::to_string(ctx.profile.age)},
        {"health_status", ctx.profile.health_status},
        {"current_time", ctx.current_time},
        {"weather", ctx.weather},
    };
    bool ranged = false;
    BasicNeedsInit out;
    if (auto doc = exchange(ctx, "motivation_init_basic_needs", vars, "", &ranged)) {
        out.hunger = clamp01((*doc)["hunger"].get<double>());
        out.fatigue = clamp01((*doc)["fatigue"].get<double>());
        out.conforming = !ranged;
    } else {
        out.hunger = 0.3; // config defaults after a failed retry
        out.fatigue = 0.2;
        out.conforming = false;
    }
    return out;
}

HighLevelNeedsInit RemoteBackend::init_high_level_needs(const CognitionContext& ctx) {
    std::map<std::string, std::string> vars = {
        {"profile", profile_text(ctx.profile)},
        {"retrieved_social_memory", join_memory(ctx.memory_results)},
    };
    HighLevelNeedsInit out;
    bool ranged = false;
    if (auto doc = exchange(ctx, "motivation_init_high_level_needs", vars, "", &ranged)) {
        for (const auto& [key, value] : doc->items()) {
            if (key == "reasoning") continue;
            if (ctx.needs.count(key) && !ctx.drive_needs.count(key))
                out.values[key] = clamp01(value.get<double>());
        }
        out.reasoning = (*doc)["reasoning"].get<std::string>();
        out.conforming = !ranged;
    } else {
        out.conforming = false;
        out.reasoning = "Defaults applied after nonconforming backend output.";
    }
    // any need the backend left out gets a neutral prior
    for (const auto& [need, value] : ctx.needs) {
        (void)value;
        if (!ctx.drive_needs.count(need) && !out.values.count(need)) out.values[need] = 0.5;
    }
    return out;
}

AppraisalResult RemoteBackend::appraise_events(const CognitionContext& ctx) {
    std::map<std::string, std::string> vars = {
        {"current_needs", needs_text(ctx.needs)},
        {"active_events", join_events(ctx.active_events)},
        {"passive_events", join_events(ctx.passive_events)},
        {"retrieved_memory", join_memory(ctx.memory_results)},
    };
    AppraisalResult out;
    if (auto doc = exchange(ctx, "motivation_update_needs", vars, "")) {
        // deltas recomputed from (updated - current); the reply's arithmetic
        // is never trusted directly
        EventAppraisal synthetic;
        synthetic.event.kind = EventRecord::Kind::active;
        synthetic.event.description = "needs update";
        synthetic.event.timestamp = ctx.tick;
        synthetic.event.source = "remote";
        for (const auto& [key, value] : (*doc)["updated_needs"].items()) {
            auto current = ctx.needs.find(key);
            if (current == ctx.needs.end() || ctx.drive_needs.count(key)) continue;
            double delta = clamp01(value.get<double>()) - current->second;
            if (delta != 0.0) synthetic.deltas[key] = delta;
        }
        if (!synthetic.deltas.empty()) out.appraisals.push_back(std::move(synthetic));
        out.reasoning = (*doc)["reasoning"].get<std::string>();
    } else {
        out.conforming = false;
        out.reasoning = "No appraisal: backend output stayed nonconforming.";
    }
    return out;
}

CandidateResult RemoteBackend::generate_candidates(const CognitionContext& ctx) {
    std::string need = ctx.activated_need.value_or("none");
    double level = 0.0;
    if (auto it = ctx.needs.find(need); it != ctx.needs.end()) level = it->second;
    char desc[96];
    std::snprintf(desc, sizeof(desc), "%s at level %.2f", need.c_str(), level);

    CandidateResult out;
    if (auto doc = exchange(ctx, "planning_generate_candidates", {{"need_description", desc}}, "")) {
        for (const auto& item : *doc) {
            std::string text = item.get<std::string>();
            BehaviorCandidate c;
            c.id = "llm:" + slugify(text);
            c.description = text;
            c.category = infer_category(text);
            c.target_poi = infer_target(ctx, text);
            c.modality = c.target_poi ? BehaviorCandidate::Modality::physical
                                      : BehaviorCandidate::Modality::remote;
            out.candidates.push_back(std::move(c));
        }
    }
    if (out.candidates.empty()) {
        out.candidates.push_back(rest_candidate());
        out.conforming = false;
    }
    return out;
}

ScoreResult RemoteBackend::score_candidate(const CognitionContext& ctx,
                                           const BehaviorCandidate& candidate) {
    std::map<std::string, std::string> vars = {
        {"action_description", candidate.description},
        {"retrieved_memory", join_memory(ctx.memory_results)},
    };
    ScoreResult out;
    bool ranged = false;
    if (auto doc = exchange(ctx, "planning_score_candidates", vars, "", &ranged)) {
        const nlohmann::json* row = &(*doc)[0];
        for (const auto& item : *doc)
            if (item["action"].get<std::string>() == candidate.description) row = &item;
        TpbScores raw{(*row)["attitude"].get<double>(), (*row)["subjective_norm"].get<double>(),
                      (*row)["perceived_control"].get<double>(), ""};
        bool clamped = false;
        out.scores = clamp_scores(raw, &clamped);
        out.scores.rationale = "remote backend score for " + candidate.description;
        out.conforming = !clamped && !ranged;
    } else {
        out.scores = {0.5, 0.5, 0.5, "Default scores after nonconforming backend output."};
        out.conforming = false;
    }
    return out;
}

GroundResult RemoteBackend::ground_action(const CognitionContext& ctx,
                                          const Intention& intention) {
    GroundResult out;
    if (auto doc = exchange(ctx, "planning_action_sequence",
                            {{"best_action", intention.candidate.description}}, "")) {
        for (const auto& item : *doc) {
            std::string text = item.get<std::string>();
            ActionStep step;
            step.verb = text;
            step.target = infer_target(ctx, text);
            step.duration = 1;
            out.sequence.steps.push_back(std::move(step));
        }
        if (!out.sequence.steps.empty()) out.sequence.steps.back().duration = 2;
    }
    if (out.sequence.steps.empty()) {
        out.sequence = rest_sequence();
        out.conforming = false;
        return out;
    }
    auto satisfied = defaults_.satisfaction.find(intention.candidate.category);
    if (satisfied != defaults_.satisfaction.end())
        out.sequence.satisfies.deltas[satisfied->second.first] = satisfied->second.second;
    return out;
}

ThoughtsResult RemoteBackend::generate_thoughts(const CognitionContext& ctx,
                                                const EventRecord& event) {
    std::map<std::string, std::string> vars = {
        {"profile", profile_text(ctx.profile)},
        {"event_description", event.description},
        {"retrieved_memory", join_memory(ctx.memory_results)},
    };
    ThoughtsResult out;
    if (auto doc = exchange(ctx, "learning_thoughts", vars, "")) {
        out.thoughts = (*doc)["thoughts"].get<std::string>();
        out.attitude = (*doc)["attitude"].get<std::string>();
        out.reflection = (*doc)["reflection"].get<std::string>();
    } else {
        out.thoughts = "Another ordinary moment in the day.";
        out.attitude = "Neutral towards routine events.";
        out.reflection = "I will keep my current approach.";
        out.conforming = false;
    }
    return out;
}

EmotionResult RemoteBackend::update_emotion(const CognitionContext& ctx) {
    std::string current = "neutral";
    if (ctx.memory)
        if (auto state = ctx.memory->current_state("emotion")) current = *state;
    std::vector<EventRecord> recent = ctx.active_events;
    recent.insert(recent.end(), ctx.passive_events.begin(), ctx.passive_events.end());
    std::map<std::string, std::string> vars = {
        {"current_emotion", current},
        {"recent_events", join_events(recent)},
        {"retrieved_memory", join_memory(ctx.memory_results)},
    };
    EmotionResult out;
    if (auto doc = exchange(ctx, "learning_update_emotion", vars, "")) {
        out.updated_emotion = (*doc)["updated_emotion"].get<std::string>();
        out.reasoning = (*doc)["reasoning"].get<std::string>();
    } else {
        out.updated_emotion = current;
        out.reasoning = "Emotion carried over after nonconforming backend output.";
        out.conforming = false;
    }
    return out;
}

ExperiencesResult RemoteBackend::structure_experiences(const CognitionContext& ctx) {
    // placeholder-free template: the events ride along as a second message
    std::string context_block = "Recent events:\nActive: " + join_events(ctx.active_events) +
                                "\nPassive: " + join_events(ctx.passive_events);
    ExperiencesResult out;
    if (auto doc = exchange(ctx, "learning_structure_experiences", {}, context_block)) {
        for (const auto& item : *doc) {
            StructuredExperience entry;
            entry.event = item["event"].get<std::string>();
            entry.emotion = item["emotion"].get<std::string>();
            entry.outcome = item["outcome"].get<std::string>();
            out.entries.push_back(std::move(entry));
        }
    } else {
        out.conforming = false;
    }
    return out;
}

QueriesResult RemoteBackend::formulate_queries(const CognitionContext& ctx) {
    std::ostringstream context;
    context << "Time " << ctx.current_time << ", weather " << ctx.weather;
    if (ctx.activated_need) context << ", activated need " << *ctx.activated_need;
    context << ", needs " << needs_text(ctx.needs);

    QueriesResult out;
    if (auto doc = exchange(ctx, "learning_retrieval_queries", {{"context", context.str()}}, "")) {
        for (const auto& item : *doc) {
            if (out.queries.size() >= 3) break;
            MemoryQuery q;
            q.question = item.get<std::string>();
            q.limit = 3;
            out.queries.push_back(std::move(q));
        }
    }
    if (out.queries.empty()) {
        MemoryQuery q;
        q.question = "recent experiences";
        q.limit = 3;
        out.queries.push_back(std::move(q));
        out.conforming = false;
    }
    return out;
}

StrategiesResult RemoteBackend::abstract_strategies(const CognitionContext& ctx,
                                                    const std::vector<const MemoryNode*>& nodes) {
    std::string context_block = "Accumulated memories:";
    for (const MemoryNode* node : nodes) context_block += "\n- " + node->content;

    StrategiesResult out;
    if (auto doc = exchange(ctx, "learning_abstract_strategies", {}, context_block)) {
        for (const auto& [key, value] : doc->items()) {
            (void)key;
            if (out.strategies.size() >= 3) break;
            out.strategies.push_back(value.get<std::string>());
        }
    }
    if (out.strategies.empty()) {
        out.strategies.push_back("Maintain a balanced daily routine.");
        out.conforming = false;
    }
    return out;
}

} // namespace socialsim
