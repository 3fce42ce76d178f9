#include "socialsim/oracle.hpp"

#include "socialsim/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace socialsim {

namespace {

const PoiSnapshot* find_poi(const CognitionContext& ctx, const std::string& id) {
    for (const auto& poi : ctx.pois)
        if (poi.id == id) return &poi;
    return nullptr;
}

// ctx.pois is sorted by (distance, id), so the first hit is the nearest.
const PoiSnapshot* nearest_of(const CognitionContext& ctx,
                              std::initializer_list<const char*> categories) {
    for (const auto& poi : ctx.pois)
        for (const char* category : categories)
            if (poi.category == category) return &poi;
    return nullptr;
}

double distance_to(const CognitionContext& ctx, const std::string& poi_id) {
    const PoiSnapshot* poi = find_poi(ctx, poi_id);
    return poi ? poi->distance_km : std::numeric_limits<double>::infinity();
}

// Nearest friend's home by distance, then agent id for stability.
const std::pair<std::string, std::string>* nearest_friend(const CognitionContext& ctx) {
    const std::pair<std::string, std::string>* best = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& entry : ctx.friend_homes) {
        double d = distance_to(ctx, entry.second);
        if (d < best_dist || (d == best_dist && best && entry.first < best->first)) {
            best = &entry;
            best_dist = d;
        }
    }
    return best;
}

bool mentions(const std::string& text, std::initializer_list<const char*> words) {
    for (const char* word : words)
        if (contains_word(text, word)) return true;
    return false;
}

struct BaseScores {
    double att, norm, ctrl;
};

// Fixed affinity table, keyed by candidate id. These are the scores an
// average agent would give before distance, memory, and caution adjustments.
BaseScores base_scores(const BehaviorCandidate& c) {
    static const std::map<std::string, BaseScores> table = {
        {"eat:cook_home", {0.9, 0.8, 0.7}},
        {"eat:delivery", {0.5, 0.6, 0.9}},
        {"eat:restaurant", {0.6, 0.7, 0.5}},
        {"rest:sleep_home", {0.8, 0.8, 0.8}},
        {"rest:in_place", {0.6, 0.6, 0.95}},
        {"social:visit_friend", {0.7, 0.75, 0.8}},
        {"social:meet_nearby", {0.65, 0.7, 0.75}},
        {"social:call_online", {0.55, 0.65, 0.9}},
        {"safety:secure_home", {0.7, 0.8, 0.85}},
        {"safety:review_plans", {0.5, 0.6, 0.95}},
        {"growth:study_library", {0.85, 0.65, 0.7}},
        {"growth:exercise_park", {0.8, 0.6, 0.7}},
        {"growth:practice_in_place", {0.45, 0.5, 0.9}},
        {"enrich:visit_museum", {0.8, 0.6, 0.65}},
        {"enrich:reflect", {0.5, 0.5, 0.95}},
    };
    auto it = table.find(c.id);
    if (it != table.end()) return it->second;
    if (c.modality == BehaviorCandidate::Modality::physical) return {0.55, 0.55, 0.7};
    return {0.5, 0.5, 0.85};
}

// Distance an agent would have to cover for the closest physical way to serve
// this category; drives the remote-option control bonus.
double nearest_physical_km(const CognitionContext& ctx, const std::string& category) {
    double home = distance_to(ctx, ctx.profile.home_poi);
    if (category == "eat") {
        const PoiSnapshot* r = nearest_of(ctx, {"restaurant"});
        return std::min(home, r ? r->distance_km : home);
    }
    if (category == "social") {
        double best = std::numeric_limits<double>::infinity();
        const auto* friend_home = nearest_friend(ctx);
        if (friend_home) best = distance_to(ctx, friend_home->second);
        const PoiSnapshot* venue = nearest_of(ctx, {"park", "commerce", "restaurant"});
        if (venue) best = std::min(best, venue->distance_km);
        return best;
    }
    if (category == "growth") {
        const PoiSnapshot* spot = nearest_of(ctx, {"library", "park"});
        return spot ? spot->distance_km : home;
    }
    if (category == "enrich") {
        const PoiSnapshot* spot = nearest_of(ctx, {"museum", "library"});
        return spot ? spot->distance_km : home;
    }
    return home; // rest, safety: home is the physical option
}

} // namespace

double OracleBackend::agent_draw(const std::string& agent_id, const std::string& salt) const {
    return u01(hash_combine({seed_, fnv1a64(agent_id), fnv1a64(salt)}));
}

BasicNeedsInit OracleBackend::init_basic_needs(const CognitionContext& ctx) {
    BasicNeedsInit out;
    out.hunger = clamp01(0.3 + 0.2 * agent_draw(ctx.agent_id, "init_hunger"));
    out.fatigue = clamp01(0.15 + 0.15 * agent_draw(ctx.agent_id, "init_fatigue"));
    if (mentions(ctx.profile.health_status, {"poor", "chronic"}))
        out.fatigue = clamp01(out.fatigue + 0.1);
    log_exchange(ctx, "motivation_init_basic_needs", {{"health", ctx.profile.health_status}},
                 {{"hunger", out.hunger}, {"fatigue", out.fatigue}}, true);
    return out;
}

HighLevelNeedsInit OracleBackend::init_high_level_needs(const CognitionContext& ctx) {
    HighLevelNeedsInit out;
    std::size_t social_count =
        ctx.memory ? ctx.memory->count_with_tags({"social"}) : 0;
    bool empty_memory = !ctx.memory || ctx.memory->size() == 0;

    for (const auto& [need, value] : ctx.needs) {
        (void)value;
        if (ctx.drive_needs.count(need)) continue;
        if (need == "social_need") {
            out.values[need] =
                empty_memory
                    ? 0.5
                    : clamp01(0.85 - 0.10 * static_cast<double>(std::min<std::size_t>(social_count, 7)));
        } else if (need == "safety") {
            out.values[need] = 0.05;
        } else if (need == "esteem") {
            out.values[need] = 0.3;
        } else if (need == "self_actualization") {
            out.values[need] = 0.25;
        } else {
            out.values[need] = 0.3;
        }
    }
    if (empty_memory)
        out.reasoning = "No prior experiences recorded; assuming a neutral baseline.";
    else if (social_count <= 2)
        out.reasoning =
            "Agent has limited recent social interactions but active social network presence.";
    else
        out.reasoning = "Agent has frequent recent social interactions.";
    log_exchange(ctx, "motivation_init_high_level_needs", {{"social_nodes", social_count}},
                 {{"values", out.values}, {"reasoning", out.reasoning}}, true);
    return out;
}

AppraisalResult OracleBackend::appraise_events(const CognitionContext& ctx) {
    AppraisalResult out;
    std::size_t restriction_memories =
        ctx.memory ? ctx.memory->count_with_tags({"restriction"}) : 0;
    auto habit = params_.habituation.find(ctx.profile.income_group);
    double h = habit != params_.habituation.end() ? habit->second
                                                  : params_.habituation.at("other");

    auto appraise = [&](const EventRecord& event) {
        const std::string& d = event.description;
        std::map<std::string, double> deltas;
        if (mentions(d, {"rejection"}) ||
            (contains_word(d, "negative") && mentions(d, {"feedback", "social"}))) {
            deltas["social_need"] = 0.05;
        } else if (mentions(d, {"cancelled", "canceled", "cancellation"})) {
            deltas["social_need"] = 0.04;
        } else if (contains_word(d, "restriction") || contains_word(d, "restrictions")) {
            if (mentions(d, {"lifted", "eased"})) {
                deltas["safety"] = -0.05;
            } else {
                deltas["safety"] = params_.restriction_base_delta /
                                   (1.0 + h * static_cast<double>(restriction_memories));
            }
        } else if (mentions(d, {"visited", "dropped"}) && contains_word(d, "you")) {
            deltas["social_need"] = -0.10;
        } else if (contains_word(d, "called") && contains_word(d, "you")) {
            deltas["social_need"] = -0.08;
        } else if (mentions(d, {"routine", "begins"})) {
            deltas["esteem"] = 0.15;
            deltas["social_need"] = 0.08;
            deltas["self_actualization"] = 0.05;
        }
        // Only known subjective needs may be appraised.
        std::map<std::string, double> kept;
        for (const auto& [need, delta] : deltas)
            if (ctx.needs.count(need) && !ctx.drive_needs.count(need)) kept[need] = delta;
        if (kept.empty()) return;
        EventAppraisal appraisal;
        appraisal.event = event;
        appraisal.deltas = std::move(kept);
        out.appraisals.push_back(std::move(appraisal));
    };

    for (const auto& event : ctx.active_events) appraise(event);
    for (const auto& event : ctx.passive_events) appraise(event);
    out.reasoning = out.appraisals.empty() ? "No events with an appreciable effect."
                                           : "Keyword appraisal of recent events.";
    log_exchange(ctx, "motivation_update_needs",
                 {{"active", ctx.active_events.size()}, {"passive", ctx.passive_events.size()}},
                 {{"appraisals", out.appraisals.size()}}, true);
    return out;
}

CandidateResult OracleBackend::generate_candidates(const CognitionContext& ctx) {
    CandidateResult out;
    const std::string need = ctx.activated_need.value_or("");
    auto physical = [](std::string id, std::string desc, std::string category,
                       std::string target) {
        BehaviorCandidate c;
        c.id = std::move(id);
        c.description = std::move(desc);
        c.category = std::move(category);
        c.target_poi = std::move(target);
        c.modality = BehaviorCandidate::Modality::physical;
        return c;
    };
    auto remote = [](std::string id, std::string desc, std::string category) {
        BehaviorCandidate c;
        c.id = std::move(id);
        c.description = std::move(desc);
        c.category = std::move(category);
        c.modality = BehaviorCandidate::Modality::remote;
        return c;
    };

    const bool has_home = find_poi(ctx, ctx.profile.home_poi) != nullptr;
    if (need == "hunger") {
        if (has_home)
            out.candidates.push_back(
                physical("eat:cook_home", "Go home and cook dinner", "eat", ctx.profile.home_poi));
        out.candidates.push_back(remote("eat:delivery", "Order food delivery", "eat"));
        if (const PoiSnapshot* r = nearest_of(ctx, {"restaurant"}))
            out.candidates.push_back(
                physical("eat:restaurant", "Visit a nearby restaurant", "eat", r->id));
    } else if (need == "fatigue") {
        if (has_home)
            out.candidates.push_back(
                physical("rest:sleep_home", "Go home and sleep", "rest", ctx.profile.home_poi));
        out.candidates.push_back(rest_candidate());
    } else if (need == "social_need") {
        if (const auto* friend_home = nearest_friend(ctx)) {
            if (find_poi(ctx, friend_home->second))
                out.candidates.push_back(physical("social:visit_friend", "Visit a friend's home",
                                                  "social", friend_home->second));
        }
        if (const PoiSnapshot* venue = nearest_of(ctx, {"park", "commerce", "restaurant"}))
            out.candidates.push_back(physical("social:meet_nearby",
                                              "Meet a friend at a nearby venue", "social",
                                              venue->id));
        out.candidates.push_back(remote("social:call_online", "Call a friend online", "social"));
    } else if (need == "safety") {
        if (has_home)
            out.candidates.push_back(physical("safety:secure_home", "Stay home and secure supplies",
                                              "safety", ctx.profile.home_poi));
        out.candidates.push_back(
            remote("safety:review_plans", "Review safety plans where you are", "safety"));
    } else if (need == "esteem") {
        if (const PoiSnapshot* library = nearest_of(ctx, {"library"}))
            out.candidates.push_back(physical("growth:study_library",
                                              "Work on a personal project at the library", "growth",
                                              library->id));
        if (const PoiSnapshot* park = nearest_of(ctx, {"park"}))
            out.candidates.push_back(
                physical("growth:exercise_park", "Exercise at the park", "growth", park->id));
        out.candidates.push_back(
            remote("growth:practice_in_place", "Practice skills where you are", "growth"));
    } else if (need == "self_actualization") {
        if (const PoiSnapshot* venue = nearest_of(ctx, {"museum", "library"}))
            out.candidates.push_back(physical("enrich:visit_museum",
                                              "Visit a museum or cultural venue", "enrich",
                                              venue->id));
        out.candidates.push_back(
            remote("enrich:reflect", "Reflect and write in a journal", "enrich"));
    }
    if (out.candidates.empty()) out.candidates.push_back(rest_candidate());

    nlohmann::json ids = nlohmann::json::array();
    for (const auto& c : out.candidates) ids.push_back(c.id);
    log_exchange(ctx, "planning_generate_candidates", {{"need", need}}, {{"candidates", ids}},
                 true);
    return out;
}

ScoreResult OracleBackend::score_candidate(const CognitionContext& ctx,
                                           const BehaviorCandidate& candidate) {
    ScoreResult out;
    const bool degenerate = ctx.profile.name.empty() &&
                            (!ctx.memory || ctx.memory->size() == 0) && ctx.pois.empty();
    if (degenerate) {
        out.scores = {0.5, 0.5, 0.5,
                      "Uninformed prior: no profile, memory, or environment information."};
        log_exchange(ctx, "planning_score_candidates", {{"candidate", candidate.id}},
                     {{"attitude", 0.5}, {"norm", 0.5}, {"control", 0.5}}, true);
        return out;
    }

    BaseScores base = base_scores(candidate);
    double att = base.att;
    double norm = base.norm;
    double ctrl = base.ctrl;
    const bool is_physical = candidate.modality == BehaviorCandidate::Modality::physical;

    double dist = 0.0;
    if (is_physical && candidate.target_poi) {
        dist = distance_to(ctx, *candidate.target_poi);
        if (!std::isfinite(dist)) dist = 0.0;
        ctrl = std::max(0.05, ctrl - params_.distance_control_penalty * dist);
    }

    att += params_.attitude_jitter *
           (agent_draw(ctx.agent_id, "affinity:" + candidate.category) - 0.5);

    std::size_t successes = 0, failures = 0;
    if (ctx.memory) {
        successes = ctx.memory->count_with_tags({candidate.id, "success"});
        failures = ctx.memory->count_with_tags({candidate.id, "failure"});
    }
    att += 0.04 * static_cast<double>(std::min<std::size_t>(successes, 3));
    att -= 0.04 * static_cast<double>(std::min<std::size_t>(failures, 3));

    if (is_physical) {
        double safety = 0.0;
        if (auto it = ctx.needs.find("safety"); it != ctx.needs.end()) safety = it->second;
        // Reciprocal-uniform caution: 1/caution is the uniform draw, so the
        // share of agents pushed past any fixed score margin grows linearly
        // with the safety level and aggregate withdrawal follows the shape of
        // safety accumulation itself.
        double inv_lo = 1.0 / params_.caution_max;
        double inv_hi = 1.0 / params_.caution_min;
        double caution =
            1.0 / (inv_lo + (inv_hi - inv_lo) * agent_draw(ctx.agent_id, "caution"));
        att -= caution * safety;
        norm -= params_.norm_restriction_penalty * ctx.restriction_level;
    } else if (nearest_physical_km(ctx, candidate.category) > ctx.far_distance_km) {
        ctrl += params_.remote_far_bonus;
    }

    out.scores.attitude = clamp01(att);
    out.scores.norm = clamp01(norm);
    out.scores.control = clamp01(ctrl);
    char rationale[160];
    std::snprintf(rationale, sizeof(rationale),
                  "Affinity for %s; distance %.2f km; %zu prior successes, %zu failures.",
                  candidate.category.c_str(), dist, successes, failures);
    out.scores.rationale = rationale;

    log_exchange(ctx, "planning_score_candidates", {{"candidate", candidate.id}},
                 {{"attitude", out.scores.attitude},
                  {"norm", out.scores.norm},
                  {"control", out.scores.control}},
                 true);
    return out;
}

GroundResult OracleBackend::ground_action(const CognitionContext& ctx,
                                          const Intention& intention) {
    GroundResult out;
    const BehaviorCandidate& c = intention.candidate;

    // Resolve the target; fall back to the nearest POI of the same category,
    // then to resting in place.
    std::string target;
    if (c.target_poi) {
        if (find_poi(ctx, *c.target_poi)) {
            target = *c.target_poi;
        } else {
            const PoiSnapshot* best = nullptr;
            for (const auto& poi : ctx.pois) {
                if (best == nullptr || poi.distance_km < best->distance_km) best = &poi;
            }
            if (c.id == "eat:restaurant") {
                const PoiSnapshot* r = nearest_of(ctx, {"restaurant"});
                best = r ? r : best;
            }
            if (!best) {
                out.sequence = rest_sequence();
                log_exchange(ctx, "planning_action_sequence", {{"candidate", c.id}},
                             {{"steps", 1}, {"fallback", true}}, true);
                return out;
            }
            target = best->id;
        }
    }

    auto step = [](std::string verb, std::optional<std::string> poi, std::int64_t duration) {
        return ActionStep{std::move(verb), std::move(poi), duration};
    };
    std::vector<ActionStep>& steps = out.sequence.steps;
    const bool at_home = ctx.location_poi == ctx.profile.home_poi;
    const bool at_work = !ctx.profile.work_poi.empty() && ctx.location_poi == ctx.profile.work_poi;

    if (c.id == "eat:cook_home") {
        const PoiSnapshot* grocery = nearest_of(ctx, {"commerce"});
        if (at_work && grocery) {
            steps.push_back(step("Finish current work tasks", ctx.profile.work_poi, 1));
            steps.push_back(step("Leave office", std::nullopt, 1));
            steps.push_back(step("Go to grocery store to buy ingredients", grocery->id, 1));
            steps.push_back(step("Return home", target, 1));
            steps.push_back(step("Cook and eat dinner", target, 2));
        } else if (!at_home) {
            steps.push_back(step("Return home", target, 1));
            steps.push_back(step("Cook and eat dinner", target, 2));
        } else {
            steps.push_back(step("Cook and eat dinner", target, 2));
        }
    } else if (c.id == "eat:restaurant") {
        steps.push_back(step("Go to the restaurant", target, 1));
        steps.push_back(step("Eat a meal", target, 2));
    } else if (c.id == "eat:delivery") {
        steps.push_back(step("Order food delivery", std::nullopt, 1));
        steps.push_back(step("Wait for the delivery", std::nullopt, 1));
        steps.push_back(step("Eat at current location", std::nullopt, 1));
    } else if (c.id == "rest:sleep_home") {
        if (!at_home) steps.push_back(step("Head home", target, 1));
        steps.push_back(step("Sleep", target, 14));
    } else if (c.id == "rest:in_place") {
        steps.push_back(step("Rest and recover", std::nullopt, 2));
    } else if (c.id == "social:visit_friend") {
        steps.push_back(step("Travel to the friend's home", target, 1));
        steps.push_back(step("Visit and socialize", target, 4));
    } else if (c.id == "social:meet_nearby") {
        steps.push_back(step("Head to the venue", target, 1));
        steps.push_back(step("Spend time together", target, 3));
    } else if (c.id == "social:call_online") {
        steps.push_back(step("Call a friend online", std::nullopt, 2));
    } else if (c.id == "safety:secure_home") {
        if (!at_home) steps.push_back(step("Return home", target, 1));
        steps.push_back(step("Secure supplies and stay in", target, 4));
    } else if (c.id == "safety:review_plans") {
        steps.push_back(step("Review safety plans", std::nullopt, 1));
    } else if (c.id == "growth:study_library") {
        steps.push_back(step("Go to the library", target, 1));
        steps.push_back(step("Work on the personal project", target, 4));
    } else if (c.id == "growth:exercise_park") {
        steps.push_back(step("Go to the park", target, 1));
        steps.push_back(step("Exercise", target, 3));
    } else if (c.id == "growth:practice_in_place") {
        steps.push_back(step("Practice skills", std::nullopt, 3));
    } else if (c.id == "enrich:visit_museum") {
        steps.push_back(step("Travel to the museum", target, 1));
        steps.push_back(step("Explore the exhibits", target, 4));
    } else if (c.id == "enrich:reflect") {
        steps.push_back(step("Reflect and write in a journal", std::nullopt, 2));
    } else {
        out.sequence = rest_sequence();
        log_exchange(ctx, "planning_action_sequence", {{"candidate", c.id}},
                     {{"steps", 1}, {"fallback", true}}, true);
        return out;
    }

    auto satisfied = params_.satisfaction.find(c.category);
    if (satisfied != params_.satisfaction.end())
        out.sequence.satisfies.deltas[satisfied->second.first] = satisfied->second.second;

    // Travel steps show their expected transit time for readability; the
    // kernel recomputes the real transit from positions during execution.
    for (auto& s : steps) {
        if (s.target && *s.target != ctx.location_poi) {
            double d = distance_to(ctx, *s.target);
            if (std::isfinite(d) && d > 0)
                s.duration = std::max(s.duration, travel_ticks(d, params_.travel_speed_kmh));
        }
    }

    log_exchange(ctx, "planning_action_sequence", {{"candidate", c.id}},
                 {{"steps", steps.size()}}, true);
    return out;
}

ThoughtsResult OracleBackend::generate_thoughts(const CognitionContext& ctx,
                                               const EventRecord& event) {
    ThoughtsResult out;
    const std::string& d = event.description;
    if (mentions(d, {"cancelled", "canceled", "cancellation", "cancel"})) {
        out.thoughts = "I feel disappointed by the cancellation but understand the reasons.";
        out.attitude = "Negative towards last-minute changes.";
        out.reflection = "I should prepare backup plans in future.";
    } else if (mentions(d, {"rejection", "negative"})) {
        out.thoughts = "That interaction was discouraging.";
        out.attitude = "Negative towards social rejection.";
        out.reflection = "I should invest in supportive relationships.";
    } else if (mentions(d, {"restriction", "restrictions"})) {
        out.thoughts = "Movement is getting harder; I should plan around the rules.";
        out.attitude = "Cautious towards non-essential outings.";
        out.reflection = "I will favor nearby or remote options for a while.";
    } else if (mentions(d, {"visited", "friend", "together"})) {
        out.thoughts = "Spending time with others felt good.";
        out.attitude = "Positive towards social visits.";
        out.reflection = "I should keep in touch more regularly.";
    } else {
        out.thoughts = "Another ordinary moment in the day.";
        out.attitude = "Neutral towards routine events.";
        out.reflection = "I will keep my current approach.";
    }
    log_exchange(ctx, "learning_thoughts", {{"event", d}},
                 {{"thoughts", out.thoughts}, {"attitude", out.attitude}}, true);
    return out;
}

EmotionResult OracleBackend::update_emotion(const CognitionContext& ctx) {
    int negatives = 0;
    bool social_positive = false;
    auto scan = [&](const std::vector<EventRecord>& events) {
        for (const auto& event : events) {
            if (mentions(event.description,
                         {"rejection", "negative", "cancelled", "canceled", "cancellation",
                          "delay", "delays", "restriction", "restrictions"}))
                ++negatives;
            else if (mentions(event.description, {"visited", "friend", "together", "called"}))
                social_positive = true;
        }
    };
    scan(ctx.active_events);
    scan(ctx.passive_events);

    EmotionResult out;
    if (negatives >= 2) {
        out.updated_emotion = "frustrated";
        out.reasoning = "Repeated delays in plans cause increased frustration.";
    } else if (negatives == 1) {
        out.updated_emotion = "uneasy";
        out.reasoning = "A recent setback is weighing on the agent.";
    } else if (social_positive) {
        out.updated_emotion = "content";
        out.reasoning = "Recent social time lifted the mood.";
    } else {
        out.updated_emotion = "neutral";
        out.reasoning = "No notable emotional drivers in recent events.";
    }
    log_exchange(ctx, "learning_update_emotion", {{"negatives", negatives}},
                 {{"updated_emotion", out.updated_emotion}}, true);
    return out;
}

ExperiencesResult OracleBackend::structure_experiences(const CognitionContext& ctx) {
    ExperiencesResult out;
    auto classify = [&](const EventRecord& event) {
        const std::string& d = event.description;
        StructuredExperience entry;
        entry.event = d;
        if (mentions(d, {"restaurant", "meal", "dinner", "ate"})) {
            entry.emotion = "satisfied";
            entry.outcome = "hunger reduced";
        } else if (mentions(d, {"negative", "rejection"})) {
            entry.emotion = "disappointed";
            entry.outcome = "increased social need";
        } else if (mentions(d, {"friend", "visited", "together"})) {
            entry.emotion = "happy";
            entry.outcome = "social need met";
        } else if (mentions(d, {"restriction", "restrictions"})) {
            entry.emotion = "worried";
            entry.outcome = "heightened safety concern";
        } else if (mentions(d, {"sleep", "slept", "rest", "rested"})) {
            entry.emotion = "rested";
            entry.outcome = "fatigue reduced";
        } else {
            entry.emotion = "neutral";
            entry.outcome = "no notable change";
        }
        out.entries.push_back(std::move(entry));
    };
    for (const auto& event : ctx.active_events) classify(event);
    for (const auto& event : ctx.passive_events) classify(event);
    log_exchange(ctx, "learning_structure_experiences",
                 {{"events", ctx.active_events.size() + ctx.passive_events.size()}},
                 {{"entries", out.entries.size()}}, true);
    return out;
}

QueriesResult OracleBackend::formulate_queries(const CognitionContext& ctx) {
    QueriesResult out;
    auto add = [&](std::string question) {
        if (out.queries.size() >= 3) return;
        MemoryQuery q;
        q.question = std::move(question);
        q.limit = 3;
        out.queries.push_back(std::move(q));
    };
    if (ctx.activated_need) {
        const std::string& need = *ctx.activated_need;
        if (need == "hunger")
            add("What did I eat recently and how did it work out?");
        else if (need == "fatigue")
            add("What actions did I take after feeling fatigued?");
        else if (need == "social_need")
            add("What social activities improved my mood previously?");
        else if (need == "safety")
            add("How did I stay safe under similar conditions?");
        else if (need == "esteem")
            add("Which personal projects gave me a sense of accomplishment?");
        else
            add("What experiences relate to " + need + "?");
    }
    if (!ctx.weather.empty() && ctx.weather != "clear")
        add("How did I react to similar weather conditions?");
    if (!ctx.active_events.empty() || !ctx.passive_events.empty())
        add("How did recent events like these affect me?");
    if (out.queries.empty()) add("recent experiences");

    nlohmann::json qs = nlohmann::json::array();
    for (const auto& q : out.queries) qs.push_back(q.question);
    log_exchange(ctx, "learning_retrieval_queries", {}, {{"queries", qs}}, true);
    return out;
}

StrategiesResult OracleBackend::abstract_strategies(const CognitionContext& ctx,
                                                    const std::vector<const MemoryNode*>& nodes) {
    int eat = 0, weather = 0, social = 0, restriction = 0;
    for (const MemoryNode* node : nodes) {
        const std::string& content = node->content;
        if (mentions(content, {"hunger", "hungry", "dinner", "meal", "restaurant", "cook"})) ++eat;
        if (mentions(content, {"weather", "rain", "storm"})) ++weather;
        if (mentions(content, {"social", "isolated", "friend", "lonely"})) ++social;
        if (mentions(content, {"restriction", "restrictions"})) ++restriction;
    }
    StrategiesResult out;
    if (eat >= 2) out.strategies.push_back("Prefer short trips when moderately hungry.");
    if (weather >= 2)
        out.strategies.push_back("Avoid outdoor social activities during bad weather.");
    if (social >= 2) out.strategies.push_back("Seek social support when feeling isolated.");
    if (restriction >= 2)
        out.strategies.push_back("Limit non-essential outings while restrictions are in effect.");
    if (out.strategies.empty())
        out.strategies.push_back("Maintain a balanced daily routine.");
    if (out.strategies.size() > 3) out.strategies.resize(3);

    log_exchange(ctx, "learning_abstract_strategies", {{"nodes", nodes.size()}},
                 {{"strategies", out.strategies.size()}}, true);
    return out;
}

} // namespace socialsim
