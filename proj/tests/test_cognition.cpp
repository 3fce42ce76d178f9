#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "socialsim/cognition.hpp"
#include "socialsim/util.hpp"

#include <cstdlib>

using namespace socialsim;
using nlohmann::json;

namespace {

std::string prompts_dir() {
    const char* root = std::getenv("SOCIALSIM_TEST_ROOT");
    REQUIRE(root != nullptr);
    return std::string(root) + "/prompts";
}

} // namespace

TEST_CASE("placeholder scanning") {
    CHECK(template_placeholders("no placeholders here") == std::vector<std::string>{});
    CHECK(template_placeholders("Name: {name}\nAge: {age}") ==
          std::vector<std::string>{"name", "age"});
    // JSON braces in example blocks are not placeholders
    CHECK(template_placeholders("{\n  \"hunger\": 0.4\n}") == std::vector<std::string>{});
    // repeated placeholder reported once, first-use order kept
    CHECK(template_placeholders("{b} {a} {b}") == std::vector<std::string>{"b", "a"});
    // digit-led or empty braces are literal text
    CHECK(template_placeholders("{1} {} { x}") == std::vector<std::string>{});
}

TEST_CASE("render substitutes and validates") {
    PromptTemplate tpl{"t", "Hello {name}, the weather is {weather}."};
    std::map<std::string, std::string> ctx = {{"name", "Ana"}, {"weather", "sunny"}};
    CHECK(render_prompt(tpl, ctx) == "Hello Ana, the weather is sunny.");

    PromptTemplate none{"t2", "Static body { \"x\": 1 }"};
    CHECK(render_prompt(none, {}) == none.body);

    PromptTemplate missing{"t3", "Hi {who}"};
    try {
        render_prompt(missing, {});
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("who") != std::string::npos);
        CHECK(std::string(e.what()).find("t3") != std::string::npos);
    }
}

TEST_CASE("library loads all eleven templates with expected placeholders") {
    PromptLibrary lib = load_prompt_library(prompts_dir());
    REQUIRE(lib.size() == 11);
    for (const auto& name : template_names()) {
        REQUIRE(lib.count(name) == 1);
        CHECK(!lib[name].body.empty());
    }

    auto ph = [&](const std::string& name) { return template_placeholders(lib[name].body); };
    CHECK(ph("motivation_init_basic_needs") ==
          std::vector<std::string>{"name", "age", "health_status", "current_time", "weather"});
    CHECK(ph("motivation_init_high_level_needs") ==
          std::vector<std::string>{"profile", "retrieved_social_memory"});
    CHECK(ph("motivation_update_needs") ==
          std::vector<std::string>{"current_needs", "active_events", "passive_events",
                                   "retrieved_memory"});
    CHECK(ph("planning_generate_candidates") == std::vector<std::string>{"need_description"});
    CHECK(ph("planning_score_candidates") ==
          std::vector<std::string>{"action_description", "retrieved_memory"});
    CHECK(ph("planning_action_sequence") == std::vector<std::string>{"best_action"});
    CHECK(ph("learning_thoughts") ==
          std::vector<std::string>{"profile", "event_description", "retrieved_memory"});
    CHECK(ph("learning_update_emotion") ==
          std::vector<std::string>{"current_emotion", "recent_events", "retrieved_memory"});
    CHECK(ph("learning_structure_experiences") == std::vector<std::string>{});
    CHECK(ph("learning_retrieval_queries") == std::vector<std::string>{"context"});
    CHECK(ph("learning_abstract_strategies") == std::vector<std::string>{});
}

TEST_CASE("worked example outputs conform to schemas") {
    auto ok = [](const std::string& name, const json& doc) {
        auto violations = validate_response(name, doc);
        for (const auto& viol : violations) MESSAGE(name, ": ", viol);
        CHECK(violations.empty());
    };

    ok("motivation_init_basic_needs", json{{"hunger", 0.4}, {"fatigue", 0.2}});
    ok("motivation_init_high_level_needs",
       json{{"social_need", 0.75},
            {"reasoning",
             "Agent has limited recent social interactions but active social network presence."}});
    ok("motivation_update_needs",
       json{{"updated_needs", {{"hunger", 0.5}, {"fatigue", 0.3}, {"social_need", 0.8}}},
            {"reasoning",
             "Recent social rejection increased social need; physical activity reduced fatigue."}});
    ok("planning_generate_candidates",
       json::array({"Go home and cook dinner", "Order food delivery",
                    "Visit a nearby restaurant"}));
    ok("planning_score_candidates",
       json::array({json{{"action", "Go home and cook dinner"},
                         {"attitude", 0.9},
                         {"subjective_norm", 0.8},
                         {"perceived_control", 0.7}},
                    json{{"action", "Order food delivery"},
                         {"attitude", 0.5},
                         {"subjective_norm", 0.6},
                         {"perceived_control", 0.9}},
                    json{{"action", "Visit a nearby restaurant"},
                         {"attitude", 0.6},
                         {"subjective_norm", 0.7},
                         {"perceived_control", 0.5}}}));
    ok("planning_action_sequence",
       json::array({"Finish current work tasks", "Leave office",
                    "Go to grocery store to buy ingredients", "Return home",
                    "Cook and eat dinner"}));
    ok("learning_thoughts",
       json{{"thoughts", "I feel disappointed by the cancellation but understand the reasons."},
            {"attitude", "Negative towards last-minute changes."},
            {"reflection", "I should prepare backup plans in future."}});
    ok("learning_update_emotion",
       json{{"updated_emotion", "frustrated"},
            {"reasoning", "Repeated delays in plans cause increased frustration."}});
    ok("learning_structure_experiences",
       json::array({json{{"event", "Visited restaurant"},
                         {"emotion", "satisfied"},
                         {"outcome", "hunger reduced"}},
                    json{{"event", "Received negative social feedback"},
                         {"emotion", "disappointed"},
                         {"outcome", "increased social need"}}}));
    ok("learning_retrieval_queries",
       json::array({"How did I react to similar weather conditions?",
                    "What actions did I take after feeling fatigued?",
                    "What social activities improved my mood previously?"}));
    ok("learning_abstract_strategies",
       json{{"strategy_1", "Prefer short trips when moderately hungry."},
            {"strategy_2", "Avoid outdoor social activities during bad weather."},
            {"strategy_3", "Seek social support when feeling isolated."}});
}

TEST_CASE("schema violations are reported") {
    CHECK(!validate_response("motivation_init_basic_needs", json{{"hunger", 1.3}}).empty());
    CHECK(!validate_response("motivation_init_basic_needs", json::array()).empty());
    CHECK(!validate_response("motivation_init_high_level_needs", json{{"reasoning", "x"}}).empty());
    CHECK(!validate_response("motivation_update_needs",
                             json{{"reasoning", "r"}, {"updated_needs", {{"hunger", 2.0}}}})
               .empty());
    CHECK(!validate_response("planning_generate_candidates", json::array()).empty());
    CHECK(!validate_response("planning_generate_candidates", json::array({""})).empty());
    CHECK(!validate_response("planning_score_candidates",
                             json::array({json{{"action", "x"}, {"attitude", 0.5}}}))
               .empty());
    CHECK(!validate_response("learning_thoughts", json{{"thoughts", "a"}}).empty());
    CHECK(!validate_response("learning_update_emotion", json{{"updated_emotion", ""}}).empty());
    CHECK(!validate_response("learning_structure_experiences",
                             json::array({json{{"event", "x"}}}))
               .empty());
    CHECK(!validate_response("learning_abstract_strategies",
                             json{{"note", "not a strategy key"}})
               .empty());
    CHECK(!validate_response("nonexistent_template", json::object()).empty());
}

TEST_CASE("golden renders for fixture contexts") {
    PromptLibrary lib = load_prompt_library(prompts_dir());
    const char* root = std::getenv("SOCIALSIM_TEST_ROOT");
    REQUIRE(root != nullptr);
    std::string golden_dir = std::string(root) + "/tests/fixtures/golden";

    std::map<std::string, std::map<std::string, std::string>> contexts = {
        {"motivation_init_basic_needs",
         {{"name", "Alex Chen"},
          {"age", "34"},
          {"health_status", "good"},
          {"current_time", "2024-01-01T08:00:00"},
          {"weather", "clear"}}},
        {"motivation_init_high_level_needs",
         {{"profile", "Alex Chen, 34, office worker, lives alone"},
          {"retrieved_social_memory",
           "Called an old friend last week; no visits since."}}},
        {"motivation_update_needs",
         {{"current_needs", "{\"hunger\": 0.4, \"fatigue\": 0.4, \"social_need\": 0.75}"},
          {"active_events", "Went for a run in the park"},
          {"passive_events", "A friend declined the dinner invitation"},
          {"retrieved_memory", "Exercise usually lowers fatigue for this agent."}}},
        {"planning_generate_candidates", {{"need_description", "hunger at level 0.72"}}},
        {"planning_score_candidates",
         {{"action_description", "Go home and cook dinner"},
          {"retrieved_memory", "Cooked at home twice this week; both times satisfying."}}},
        {"planning_action_sequence", {{"best_action", "Go home and cook dinner"}}},
        {"learning_thoughts",
         {{"profile", "Alex Chen, 34, office worker"},
          {"event_description", "The dinner plan was cancelled at the last minute"},
          {"retrieved_memory", "A previous cancellation led to a quiet evening at home."}}},
        {"learning_update_emotion",
         {{"current_emotion", "neutral"},
          {"recent_events", "Two plans were delayed; one meeting was cancelled"},
          {"retrieved_memory", "Similar delays previously caused frustration."}}},
        {"learning_structure_experiences", {}},
        {"learning_retrieval_queries",
         {{"context", "Rainy evening, fatigue rising, no social contact today"}}},
        {"learning_abstract_strategies", {}},
    };

    for (const auto& name : template_names()) {
        REQUIRE(contexts.count(name) == 1);
        std::string rendered = render_prompt(lib[name], contexts[name]);
        std::string golden = read_text_file(golden_dir + "/" + name + ".golden.txt");
        CHECK_MESSAGE(rendered == golden, "golden mismatch for ", name);
    }
}

TEST_CASE("score clamping flags out-of-range values") {
    bool flagged = false;
    TpbScores in{1.3, -0.2, 0.5, "r"};
    TpbScores out = clamp_scores(in, &flagged);
    CHECK(flagged);
    CHECK(out.attitude == 1.0);
    CHECK(out.norm == 0.0);
    CHECK(out.control == 0.5);

    flagged = true;
    clamp_scores({0.1, 0.2, 0.3, ""}, &flagged);
    CHECK_FALSE(flagged);
}
