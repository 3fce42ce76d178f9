#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "socialsim/oracle.hpp"
#include "socialsim/util.hpp"

#include <cmath>

using namespace socialsim;

namespace {

PoiSnapshot poi(const std::string& id, const std::string& category, double distance) {
    PoiSnapshot p;
    p.id = id;
    p.category = category;
    p.distance_km = distance;
    return p;
}

// Agent standing at home with a restaurant and grocery on the same block.
CognitionContext home_context() {
    CognitionContext ctx;
    ctx.seed = 42;
    ctx.agent_id = "agent_0";
    ctx.tick = 16;
    ctx.current_time = "2024-01-01T08:00:00";
    ctx.weather = "clear";
    ctx.profile.id = "agent_0";
    ctx.profile.name = "Alex Chen";
    ctx.profile.age = 34;
    ctx.profile.health_status = "good";
    ctx.profile.income_group = "high";
    ctx.profile.home_poi = "home_0";
    ctx.profile.work_poi = "office_0";
    ctx.needs = {{"hunger", 0.7}, {"fatigue", 0.3}, {"social_need", 0.4}};
    ctx.drive_needs = {"hunger", "fatigue"};
    ctx.activated_need = "hunger";
    ctx.location_poi = "home_0";
    ctx.pois = {
        poi("home_0", "residential", 0.0),
        poi("restaurant_0", "restaurant", 0.0),
        poi("grocery_0", "commerce", 0.4),
        poi("office_0", "office", 2.0),
    };
    return ctx;
}

OracleParams pinned_params() {
    OracleParams p;
    p.attitude_jitter = 0.0; // pin attitudes to the base table
    return p;
}

EventRecord event_of(const std::string& desc, EventRecord::Kind kind = EventRecord::Kind::passive) {
    EventRecord e;
    e.kind = kind;
    e.description = desc;
    e.timestamp = 0;
    e.source = "test";
    return e;
}

} // namespace

TEST_CASE("oracle is deterministic across instances") {
    CognitionContext ctx = home_context();
    OracleBackend a(ctx.seed), b(ctx.seed);

    auto ca = a.generate_candidates(ctx);
    auto cb = b.generate_candidates(ctx);
    REQUIRE(ca.candidates.size() == cb.candidates.size());
    for (std::size_t i = 0; i < ca.candidates.size(); ++i) {
        CHECK(ca.candidates[i].id == cb.candidates[i].id);
        auto sa = a.score_candidate(ctx, ca.candidates[i]);
        auto sb = b.score_candidate(ctx, cb.candidates[i]);
        CHECK(sa.scores.attitude == sb.scores.attitude);
        CHECK(sa.scores.norm == sb.scores.norm);
        CHECK(sa.scores.control == sb.scores.control);
    }

    auto ia = a.init_basic_needs(ctx);
    auto ib = b.init_basic_needs(ctx);
    CHECK(ia.hunger == ib.hunger);
    CHECK(ia.fatigue == ib.fatigue);

    // different seed shifts the draws
    OracleBackend c(ctx.seed + 1);
    auto ic = c.init_basic_needs(ctx);
    CHECK(ic.hunger != ia.hunger);
}

TEST_CASE("basic needs init ranges and health adjustment") {
    CognitionContext ctx = home_context();
    OracleBackend backend(7);
    auto out = backend.init_basic_needs(ctx);
    CHECK(out.hunger >= 0.3);
    CHECK(out.hunger <= 0.5);
    CHECK(out.fatigue >= 0.15);
    CHECK(out.fatigue <= 0.3);

    CognitionContext frail = ctx;
    frail.profile.health_status = "chronic back pain";
    auto adjusted = backend.init_basic_needs(frail);
    CHECK(adjusted.fatigue == doctest::Approx(out.fatigue + 0.1));
}

TEST_CASE("high level needs follow the social memory table") {
    CognitionContext ctx = home_context();
    ctx.needs = {{"hunger", 0.3}, {"fatigue", 0.3}, {"social_need", 0.0}, {"safety", 0.0},
                 {"esteem", 0.0}, {"self_actualization", 0.0}};
    OracleBackend backend(42);

    SUBCASE("no memory: neutral prior") {
        ctx.memory = nullptr;
        auto out = backend.init_high_level_needs(ctx);
        CHECK(out.values.at("social_need") == 0.5);
        CHECK(out.values.at("safety") == 0.05);
        CHECK(out.values.at("esteem") == 0.3);
        CHECK(out.values.at("self_actualization") == 0.25);
        CHECK(out.values.count("hunger") == 0);
        CHECK(out.reasoning == "No prior experiences recorded; assuming a neutral baseline.");
    }

    SUBCASE("one social memory: the worked 0.75") {
        MemoryStore m;
        m.append_stream(event_of("Texted a friend", EventRecord::Kind::active), "", "", "", 0.5,
                        {"social"});
        ctx.memory = &m;
        auto out = backend.init_high_level_needs(ctx);
        CHECK(out.values.at("social_need") == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(out.reasoning ==
              "Agent has limited recent social interactions but active social network presence.");
    }

    SUBCASE("rich social memory scores lower than sparse") {
        MemoryStore m;
        for (int i = 0; i < 5; ++i)
            m.append_stream(event_of("Met friends"), "", "", "", 0.5, {"social"});
        ctx.memory = &m;
        auto rich = backend.init_high_level_needs(ctx);
        CHECK(rich.values.at("social_need") < 0.75);
        CHECK(rich.reasoning == "Agent has frequent recent social interactions.");
    }
}

TEST_CASE("event appraisal rule table") {
    CognitionContext ctx = home_context();
    ctx.needs["safety"] = 0.1;
    ctx.needs["esteem"] = 0.2;
    ctx.needs["self_actualization"] = 0.2;
    OracleBackend backend(42);

    SUBCASE("negative social feedback raises social need") {
        ctx.passive_events = {event_of("Received negative social feedback")};
        auto out = backend.appraise_events(ctx);
        REQUIRE(out.appraisals.size() == 1);
        CHECK(out.appraisals[0].deltas.at("social_need") == doctest::Approx(0.05));
    }

    SUBCASE("no events, no appraisals") {
        auto out = backend.appraise_events(ctx);
        CHECK(out.appraisals.empty());
    }

    SUBCASE("drive needs are never appraised") {
        ctx.active_events = {event_of("Ate a large dinner", EventRecord::Kind::active)};
        auto out = backend.appraise_events(ctx);
        for (const auto& a : out.appraisals) {
            CHECK(a.deltas.count("hunger") == 0);
            CHECK(a.deltas.count("fatigue") == 0);
        }
    }

    SUBCASE("restriction delta habituates with memory") {
        ctx.passive_events = {event_of("New mobility restrictions announced")};
        ctx.memory = nullptr;
        auto fresh = backend.appraise_events(ctx);
        REQUIRE(fresh.appraisals.size() == 1);
        double base = fresh.appraisals[0].deltas.at("safety");
        CHECK(base == doctest::Approx(0.016));

        MemoryStore m;
        m.append_stream(event_of("restrictions announced"), "", "", "", 0.5, {"restriction"});
        m.append_stream(event_of("restrictions reminder"), "", "", "", 0.5, {"restriction"});
        ctx.memory = &m;
        auto habituated = backend.appraise_events(ctx);
        REQUIRE(habituated.appraisals.size() == 1);
        // high income: h = 0.35, n = 2 -> 0.016 / 1.7
        CHECK(habituated.appraisals[0].deltas.at("safety") ==
              doctest::Approx(0.016 / 1.7).epsilon(1e-12));

        ctx.profile.income_group = "low";
        auto slow = backend.appraise_events(ctx);
        CHECK(slow.appraisals[0].deltas.at("safety") >
              habituated.appraisals[0].deltas.at("safety"));
    }

    SUBCASE("lifted restrictions reduce safety need") {
        ctx.passive_events = {event_of("Mobility restrictions lifted today")};
        auto out = backend.appraise_events(ctx);
        REQUIRE(out.appraisals.size() == 1);
        CHECK(out.appraisals[0].deltas.at("safety") == doctest::Approx(-0.05));
    }

    SUBCASE("friend visit satisfies social need") {
        ctx.passive_events = {event_of("Jordan visited you at home")};
        auto out = backend.appraise_events(ctx);
        REQUIRE(out.appraisals.size() == 1);
        CHECK(out.appraisals[0].deltas.at("social_need") == doctest::Approx(-0.10));
    }

    SUBCASE("daily routine nudges subjective needs up") {
        ctx.active_events = {event_of("A new day begins with the usual routine",
                                      EventRecord::Kind::active)};
        auto out = backend.appraise_events(ctx);
        REQUIRE(out.appraisals.size() == 1);
        CHECK(out.appraisals[0].deltas.at("esteem") == doctest::Approx(0.15));
        CHECK(out.appraisals[0].deltas.at("social_need") == doctest::Approx(0.08));
        CHECK(out.appraisals[0].deltas.at("self_actualization") == doctest::Approx(0.05));
    }
}

TEST_CASE("hunger candidates mirror the worked list") {
    CognitionContext ctx = home_context();
    OracleBackend backend(42);
    auto out = backend.generate_candidates(ctx);
    REQUIRE(out.candidates.size() == 3);
    CHECK(out.candidates[0].id == "eat:cook_home");
    CHECK(out.candidates[0].description == "Go home and cook dinner");
    CHECK(out.candidates[1].id == "eat:delivery");
    CHECK(out.candidates[1].description == "Order food delivery");
    CHECK(out.candidates[2].id == "eat:restaurant");
    CHECK(out.candidates[2].description == "Visit a nearby restaurant");
    CHECK(out.candidates[2].target_poi == std::optional<std::string>("restaurant_0"));
}

TEST_CASE("social candidates with three nearby POIs, seed 42") {
    CognitionContext ctx = home_context();
    ctx.activated_need = "social_need";
    ctx.pois = {
        poi("home_0", "residential", 0.0),
        poi("friend_home_1", "residential", 1.2),
        poi("park_0", "park", 0.8),
    };
    ctx.friend_homes = {{"agent_1", "friend_home_1"}};
    OracleBackend backend(42);
    auto out = backend.generate_candidates(ctx);
    REQUIRE(out.candidates.size() == 3);
    CHECK(out.candidates[0].id == "social:visit_friend");
    CHECK(out.candidates[0].target_poi == std::optional<std::string>("friend_home_1"));
    CHECK(out.candidates[1].id == "social:meet_nearby");
    CHECK(out.candidates[1].target_poi == std::optional<std::string>("park_0"));
    CHECK(out.candidates[2].id == "social:call_online");
    CHECK(out.candidates[2].modality == BehaviorCandidate::Modality::remote);
}

TEST_CASE("unknown need falls back to resting") {
    CognitionContext ctx = home_context();
    ctx.activated_need.reset();
    OracleBackend backend(42);
    auto out = backend.generate_candidates(ctx);
    REQUIRE(out.candidates.size() == 1);
    CHECK(out.candidates[0].id == "rest:in_place");
}

TEST_CASE("worked TPB scores with jitter pinned to zero") {
    CognitionContext ctx = home_context();
    OracleBackend backend(42, pinned_params());
    auto candidates = backend.generate_candidates(ctx).candidates;
    REQUIRE(candidates.size() == 3);

    auto s0 = backend.score_candidate(ctx, candidates[0]).scores; // cook at home
    CHECK(s0.attitude == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(s0.norm == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(s0.control == doctest::Approx(0.7).epsilon(1e-12));

    auto s1 = backend.score_candidate(ctx, candidates[1]).scores; // delivery
    CHECK(s1.attitude == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s1.norm == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(s1.control == doctest::Approx(0.9).epsilon(1e-12));

    auto s2 = backend.score_candidate(ctx, candidates[2]).scores; // restaurant next door
    CHECK(s2.attitude == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(s2.norm == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(s2.control == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(!s2.rationale.empty());
}

TEST_CASE("degenerate context gets the uninformed prior") {
    CognitionContext ctx;
    ctx.seed = 42;
    ctx.agent_id = "ghost";
    OracleBackend backend(42);
    BehaviorCandidate c = rest_candidate();
    auto out = backend.score_candidate(ctx, c);
    CHECK(out.scores.attitude == 0.5);
    CHECK(out.scores.norm == 0.5);
    CHECK(out.scores.control == 0.5);
    CHECK(out.scores.rationale ==
          "Uninformed prior: no profile, memory, or environment information.");
}

TEST_CASE("distance lowers control, restriction lowers norm, safety lowers attitude") {
    CognitionContext ctx = home_context();
    OracleBackend backend(42, pinned_params());
    BehaviorCandidate far;
    far.id = "eat:restaurant";
    far.description = "Visit a nearby restaurant";
    far.category = "eat";
    far.target_poi = "restaurant_far";
    far.modality = BehaviorCandidate::Modality::physical;
    ctx.pois.push_back(poi("restaurant_far", "restaurant", 3.0));

    auto base = backend.score_candidate(ctx, far).scores;
    CHECK(base.control == doctest::Approx(0.5 - 0.08 * 3.0).epsilon(1e-12));

    CognitionContext restricted = ctx;
    restricted.restriction_level = 0.8;
    auto under = backend.score_candidate(restricted, far).scores;
    CHECK(under.norm == doctest::Approx(base.norm - 0.2 * 0.8).epsilon(1e-12));

    CognitionContext anxious = ctx;
    anxious.needs["safety"] = 0.5;
    auto cautious = backend.score_candidate(anxious, far).scores;
    CHECK(cautious.attitude < base.attitude);
    // remote options are untouched by caution
    BehaviorCandidate remote_opt;
    remote_opt.id = "eat:delivery";
    remote_opt.description = "Order food delivery";
    remote_opt.category = "eat";
    remote_opt.modality = BehaviorCandidate::Modality::remote;
    CHECK(backend.score_candidate(anxious, remote_opt).scores.attitude ==
          backend.score_candidate(ctx, remote_opt).scores.attitude);
}

TEST_CASE("remote control bonus kicks in when physical options are far") {
    CognitionContext ctx = home_context();
    ctx.activated_need = "social_need";
    ctx.pois = {poi("home_0", "residential", 0.0), poi("friend_home_1", "residential", 9.0)};
    ctx.friend_homes = {{"agent_1", "friend_home_1"}};
    OracleBackend backend(42, pinned_params());

    BehaviorCandidate call;
    call.id = "social:call_online";
    call.description = "Call a friend online";
    call.category = "social";
    call.modality = BehaviorCandidate::Modality::remote;

    auto far_scores = backend.score_candidate(ctx, call).scores;
    CHECK(far_scores.control == doctest::Approx(1.0).epsilon(1e-12)); // 0.9 + 0.1, clamped top

    ctx.pois.push_back(poi("park_0", "park", 0.5)); // a near venue cancels the bonus
    auto near_scores = backend.score_candidate(ctx, call).scores;
    CHECK(near_scores.control == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("memory of successes feeds back into attitude") {
    CognitionContext ctx = home_context();
    OracleBackend backend(42, pinned_params());
    BehaviorCandidate c = backend.generate_candidates(ctx).candidates[2]; // restaurant

    auto without = backend.score_candidate(ctx, c).scores;

    MemoryStore m;
    m.record_action_outcome("eat", c, "hunger reduced", true, 5);
    ctx.memory = &m;
    auto with = backend.score_candidate(ctx, c).scores;
    CHECK(with.attitude == doctest::Approx(without.attitude + 0.04).epsilon(1e-12));

    m.record_action_outcome("eat", c, "food was cold", false, 6);
    m.record_action_outcome("eat", c, "long wait", false, 7);
    auto mixed = backend.score_candidate(ctx, c).scores;
    CHECK(mixed.attitude == doctest::Approx(without.attitude + 0.04 - 0.08).epsilon(1e-12));
}

TEST_CASE("grounding the worked cook-at-home plan from the office") {
    CognitionContext ctx = home_context();
    ctx.location_poi = "office_0";
    OracleBackend backend(42, pinned_params());

    Intention intent;
    intent.candidate = backend.generate_candidates(ctx).candidates[0]; // eat:cook_home
    intent.score = 0.8;
    auto out = backend.ground_action(ctx, intent);
    REQUIRE(out.sequence.steps.size() == 5);
    CHECK(out.sequence.steps[0].verb == "Finish current work tasks");
    CHECK(out.sequence.steps[1].verb == "Leave office");
    CHECK(out.sequence.steps[2].verb == "Go to grocery store to buy ingredients");
    CHECK(out.sequence.steps[2].target == std::optional<std::string>("grocery_0"));
    CHECK(out.sequence.steps[3].verb == "Return home");
    CHECK(out.sequence.steps[4].verb == "Cook and eat dinner");
    CHECK(out.sequence.steps[4].target == std::optional<std::string>("home_0"));
    CHECK(out.sequence.satisfies.deltas.at("hunger") == doctest::Approx(0.6));
    CHECK(out.sequence.total_duration() >= 5);
}

TEST_CASE("grounding ends at the nearest restaurant") {
    CognitionContext ctx = home_context();
    ctx.pois.push_back(poi("restaurant_9", "restaurant", 6.0));
    OracleBackend backend(42, pinned_params());
    auto candidates = backend.generate_candidates(ctx).candidates;
    Intention intent;
    intent.candidate = candidates[2];
    intent.score = 0.6;
    auto out = backend.ground_action(ctx, intent);
    REQUIRE(!out.sequence.steps.empty());
    // exhaustive scan: restaurant_0 at 0.0 km is the closest restaurant
    for (const auto& p : ctx.pois)
        if (p.category == "restaurant") CHECK(p.distance_km >= 0.0);
    CHECK(out.sequence.steps.back().target == std::optional<std::string>("restaurant_0"));
}

TEST_CASE("grounding an unresolvable POI falls back to rest") {
    CognitionContext ctx = home_context();
    ctx.pois.clear(); // nothing to resolve against
    OracleBackend backend(42);
    BehaviorCandidate ghost;
    ghost.id = "eat:restaurant";
    ghost.description = "Visit a nearby restaurant";
    ghost.category = "eat";
    ghost.target_poi = "no_such_poi";
    ghost.modality = BehaviorCandidate::Modality::physical;
    Intention intent;
    intent.candidate = ghost;
    auto out = backend.ground_action(ctx, intent);
    REQUIRE(out.sequence.steps.size() == 1);
    CHECK(out.sequence.steps[0].verb == "rest");
}

TEST_CASE("worked thoughts, emotion, experiences, queries, strategies") {
    CognitionContext ctx = home_context();
    OracleBackend backend(42);

    auto thoughts = backend.generate_thoughts(ctx, event_of("The dinner was cancelled"));
    CHECK(thoughts.thoughts ==
          "I feel disappointed by the cancellation but understand the reasons.");
    CHECK(thoughts.attitude == "Negative towards last-minute changes.");
    CHECK(thoughts.reflection == "I should prepare backup plans in future.");

    auto neutral = backend.generate_thoughts(ctx, event_of("Walked past the bakery"));
    CHECK(neutral.attitude == "Neutral towards routine events.");

    ctx.passive_events = {event_of("Meeting was cancelled"), event_of("Bus delays all morning")};
    auto emotion = backend.update_emotion(ctx);
    CHECK(emotion.updated_emotion == "frustrated");
    CHECK(emotion.reasoning == "Repeated delays in plans cause increased frustration.");

    ctx.passive_events.clear();
    ctx.active_events = {event_of("Visited restaurant", EventRecord::Kind::active)};
    ctx.passive_events = {event_of("Received negative social feedback")};
    auto exp = backend.structure_experiences(ctx);
    REQUIRE(exp.entries.size() == 2);
    CHECK(exp.entries[0].emotion == "satisfied");
    CHECK(exp.entries[0].outcome == "hunger reduced");
    CHECK(exp.entries[1].emotion == "disappointed");
    CHECK(exp.entries[1].outcome == "increased social need");

    CognitionContext qctx = home_context();
    qctx.activated_need = "fatigue";
    qctx.weather = "rain";
    qctx.active_events = {event_of("Long day at work", EventRecord::Kind::active)};
    auto queries = backend.formulate_queries(qctx);
    REQUIRE(queries.queries.size() == 3);
    CHECK(queries.queries[0].question == "What actions did I take after feeling fatigued?");
    CHECK(queries.queries[1].question == "How did I react to similar weather conditions?");
    CHECK(queries.queries[2].question == "How did recent events like these affect me?");

    CognitionContext empty;
    empty.agent_id = "agent_0";
    auto fallback = backend.formulate_queries(empty);
    REQUIRE(fallback.queries.size() == 1);
    CHECK(fallback.queries[0].question == "recent experiences");

    MemoryStore m;
    std::vector<const MemoryNode*> nodes;
    m.append_stream(event_of("Felt hungry, cooked dinner at home"), "", "", "");
    m.append_stream(event_of("Visited a restaurant for a meal"), "", "", "");
    m.append_stream(event_of("Felt isolated, called a friend"), "", "", "");
    m.append_stream(event_of("A friend came over, felt less lonely"), "", "", "");
    for (const auto& node : m.nodes()) nodes.push_back(&node);
    auto strategies = backend.abstract_strategies(ctx, nodes);
    REQUIRE(strategies.strategies.size() == 2);
    CHECK(strategies.strategies[0] == "Prefer short trips when moderately hungry.");
    CHECK(strategies.strategies[1] == "Seek social support when feeling isolated.");

    auto none = backend.abstract_strategies(ctx, {});
    REQUIRE(none.strategies.size() == 1);
    CHECK(none.strategies[0] == "Maintain a balanced daily routine.");
}

TEST_CASE("transcript sink sees every exchange") {
    CognitionContext ctx = home_context();
    OracleBackend backend(42);
    int count = 0;
    backend.set_transcript_sink([&](const nlohmann::json& line) {
        ++count;
        CHECK(line.at("backend") == "oracle");
        CHECK(line.at("agent") == "agent_0");
        CHECK(line.contains("op"));
        CHECK(line.contains("conforming"));
    });
    backend.init_basic_needs(ctx);
    backend.generate_candidates(ctx);
    backend.update_emotion(ctx);
    CHECK(count == 3);
}
