#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <socialsim.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* kConfigTemplate = R"({
  "schema": "socialsim/v1",
  "seed": 21,
  "days": 2,
  "output_dir": "@OUT@",
  "world": {"pois": [
    {"id": "home_a", "category": "home", "x": 0, "y": 0},
    {"id": "home_b", "category": "home", "x": 3, "y": 1},
    {"id": "office", "category": "workplace", "x": 2, "y": 0},
    {"id": "diner", "category": "restaurant", "x": 0.5, "y": 0.5}
  ]},
  "agents": {"roster": [
    {"id": "ada", "name": "Ada", "age": 31, "health_status": "good",
     "income_group": "high", "home_poi": "home_a", "work_poi": "office",
     "social_ties": ["bob"]},
    {"id": "bob", "name": "Bob", "age": 44, "health_status": "good",
     "income_group": "low", "home_poi": "home_b", "work_poi": "office",
     "social_ties": ["ada"]}
  ]},
  "needs": {
    "hunger": {"tier": "physiological", "growth": 0.05, "threshold": 0.6, "initial": 0.3},
    "fatigue": {"tier": "physiological", "growth": 0.03, "threshold": 0.6, "initial": 0.2},
    "social_need": {"tier": "social", "threshold": 0.6, "initial": 0.5}
  }
})";

struct Workspace {
    fs::path root;

    Workspace() {
        root = fs::temp_directory_path() / "socialsim_capi";
        fs::remove_all(root);
        fs::create_directories(root);
    }

    std::string write_config(const std::string& out_dir_name) {
        std::string body = kConfigTemplate;
        const std::string token = "@OUT@";
        body.replace(body.find(token), token.size(), (root / out_dir_name).string());
        fs::path path = root / (out_dir_name + "_config.json");
        std::ofstream(path) << body;
        return path.string();
    }
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

TEST_CASE("argument validation yields SS_ERR_ARG with a message") {
    CHECK(ss_version() != nullptr);
    CHECK(ss_sim_create(nullptr, nullptr, nullptr) == SS_ERR_ARG);
    CHECK(std::string(ss_last_error()).size() > 0);
    CHECK(ss_sim_run(nullptr) == SS_ERR_ARG);
    CHECK(ss_replay(nullptr, "a", 0, nullptr, nullptr) == SS_ERR_ARG);

    ss_sim* sim = nullptr;
    CHECK(ss_sim_create("/no/such/config.json", nullptr, &sim) == SS_ERR_CONFIG);
    CHECK(sim == nullptr);

    Workspace ws;
    std::string config = ws.write_config("argcheck");
    CHECK(ss_sim_create(config.c_str(), "{not json", &sim) == SS_ERR_CONFIG);
    CHECK(std::string(ss_last_error()).find("JSON") != std::string::npos);
}

TEST_CASE("a full run writes all four logs and reports progress") {
    Workspace ws;
    std::string config = ws.write_config("full");
    ss_sim* sim = nullptr;
    REQUIRE(ss_sim_create(config.c_str(), nullptr, &sim) == SS_OK);

    int days = 0, day = -1, done = 1, resumed = 1;
    CHECK(ss_sim_total_days(sim, &days) == SS_OK);
    CHECK(days == 2);
    CHECK(ss_sim_day(sim, &day) == SS_OK);
    CHECK(day == 0);
    CHECK(ss_sim_done(sim, &done) == SS_OK);
    CHECK(done == 0);
    CHECK(ss_sim_resumed(sim, &resumed) == SS_OK);
    CHECK(resumed == 0);

    REQUIRE(ss_sim_run(sim) == SS_OK);
    CHECK(ss_sim_done(sim, &done) == SS_OK);
    CHECK(done == 1);

    fs::path out = ss_sim_output_dir(sim);
    ss_sim_destroy(sim);
    for (const char* name :
         {"trajectory.jsonl", "decisions.jsonl", "memory.jsonl", "transcript.jsonl"})
        CHECK(fs::exists(out / name));
    CHECK(fs::exists(out / "checkpoints" / "config.json"));
    CHECK(fs::exists(out / "checkpoints" / "day_0002.json"));
}

TEST_CASE("killing a session after one day and resuming matches a straight run") {
    Workspace ws;
    std::string config_a = ws.write_config("oneshot");
    ss_sim* sim = nullptr;
    REQUIRE(ss_sim_create(config_a.c_str(), nullptr, &sim) == SS_OK);
    REQUIRE(ss_sim_run(sim) == SS_OK);
    fs::path oneshot = ss_sim_output_dir(sim);
    ss_sim_destroy(sim);

    std::string config_b = ws.write_config("staged");
    REQUIRE(ss_sim_create(config_b.c_str(), nullptr, &sim) == SS_OK);
    REQUIRE(ss_sim_run_days(sim, 1) == SS_OK);
    int day = 0, done = 1;
    CHECK(ss_sim_day(sim, &day) == SS_OK);
    CHECK(day == 1);
    CHECK(ss_sim_done(sim, &done) == SS_OK);
    CHECK(done == 0);
    ss_sim_destroy(sim); // kill without finishing

    REQUIRE(ss_sim_create(config_b.c_str(), nullptr, &sim) == SS_OK);
    int resumed = 0;
    CHECK(ss_sim_resumed(sim, &resumed) == SS_OK);
    CHECK(resumed == 1);
    REQUIRE(ss_sim_run(sim) == SS_OK);
    fs::path staged = ss_sim_output_dir(sim);
    ss_sim_destroy(sim);

    for (const char* name : {"trajectory.jsonl", "decisions.jsonl", "memory.jsonl",
                             "transcript.jsonl"})
        CHECK(slurp(staged / name) == slurp(oneshot / name));
}

TEST_CASE("overrides patch the config before validation") {
    Workspace ws;
    std::string config = ws.write_config("patched");
    std::string other_out = (ws.root / "patched_alt").string();
    std::string patch = "{\"seed\": 99, \"output_dir\": \"" + other_out + "\"}";
    ss_sim* sim = nullptr;
    REQUIRE(ss_sim_create(config.c_str(), patch.c_str(), &sim) == SS_OK);
    REQUIRE(ss_sim_run(sim) == SS_OK);
    std::string out = ss_sim_output_dir(sim);
    ss_sim_destroy(sim);
    CHECK(out == other_out);

    // The same config under the original seed scores candidates differently.
    REQUIRE(ss_sim_create(config.c_str(), nullptr, &sim) == SS_OK);
    REQUIRE(ss_sim_run(sim) == SS_OK);
    fs::path original = ss_sim_output_dir(sim);
    ss_sim_destroy(sim);
    CHECK(slurp(fs::path(other_out) / "decisions.jsonl") !=
          slurp(original / "decisions.jsonl"));
}

TEST_CASE("ablate runs the requested axes and evaluate pairs them") {
    Workspace ws;
    std::string config = ws.write_config("abl");
    char* result = nullptr;
    REQUIRE(ss_ablate(config.c_str(), nullptr, "P", &result) == SS_OK);
    std::string body = result;
    ss_string_free(result);
    CHECK(body.find("\"label\": \"full\"") != std::string::npos);
    CHECK(body.find("\"label\": \"woP\"") != std::string::npos);
    CHECK(body.find("woM") == std::string::npos);

    fs::path base = ws.root / "abl";
    CHECK(fs::exists(base / "ablation_manifest.json"));
    CHECK(fs::exists(base / "full" / "trajectory.jsonl"));
    CHECK(fs::exists(base / "woP" / "trajectory.jsonl"));

    char* report = nullptr;
    REQUIRE(ss_evaluate(base.string().c_str(), nullptr, nullptr, &report) == SS_OK);
    std::string report_body = report;
    ss_string_free(report);
    CHECK(report_body.find("metric_report") != std::string::npos);
    CHECK(report_body.find("\"paired\"") != std::string::npos);
    CHECK(fs::exists(base / "report.json"));
    CHECK(fs::exists(base / "report.csv"));

    CHECK(ss_ablate(config.c_str(), nullptr, "Q", &result) == SS_ERR_CONFIG);
}

TEST_CASE("evaluate works on a single run directory") {
    Workspace ws;
    std::string config = ws.write_config("single");
    ss_sim* sim = nullptr;
    REQUIRE(ss_sim_create(config.c_str(), nullptr, &sim) == SS_OK);
    REQUIRE(ss_sim_run(sim) == SS_OK);
    std::string out = ss_sim_output_dir(sim);
    ss_sim_destroy(sim);

    char* report = nullptr;
    REQUIRE(ss_evaluate(out.c_str(), nullptr, nullptr, &report) == SS_OK);
    std::string body = report;
    ss_string_free(report);
    CHECK(body.find("radius_of_gyration_mean_km") != std::string::npos);
    // No reference: divergences must be absent.
    CHECK(body.find("divergence") == std::string::npos);

    CHECK(ss_evaluate((ws.root / "nowhere").string().c_str(), nullptr, nullptr, &report) ==
          SS_ERR_CONFIG);
}

TEST_CASE("ingest converts CSV and rejects bad kinds through the C surface") {
    Workspace ws;
    fs::path csv = ws.root / "pois.csv";
    std::ofstream(csv) << "id,category,x,y\nh1,home,0,0\nshop,commerce,1,0.5\n";
    fs::path out = ws.root / "pois.jsonl";

    char* manifest = nullptr;
    REQUIRE(ss_ingest(csv.string().c_str(), "poi_table", out.string().c_str(), &manifest) ==
            SS_OK);
    std::string body = manifest;
    ss_string_free(manifest);
    CHECK(body.find("\"records\": 2") != std::string::npos);
    CHECK(fs::exists(out));
    CHECK(fs::exists(ws.root / "pois.jsonl.manifest.json"));

    CHECK(ss_ingest(csv.string().c_str(), "mystery", out.string().c_str(), &manifest) ==
          SS_ERR_CONFIG);
}

TEST_CASE("replay narrates a day and rejects unknown agents") {
    Workspace ws;
    std::string config = ws.write_config("replayed");
    ss_sim* sim = nullptr;
    REQUIRE(ss_sim_create(config.c_str(), nullptr, &sim) == SS_OK);
    REQUIRE(ss_sim_run(sim) == SS_OK);
    std::string out = ss_sim_output_dir(sim);
    ss_sim_destroy(sim);

    char* text = nullptr;
    std::uint64_t events = 0;
    REQUIRE(ss_replay(out.c_str(), "ada", 1, &text, &events) == SS_OK);
    std::string narrative = text;
    ss_string_free(text);
    CHECK(narrative.find("Day 1 of agent ada") != std::string::npos);
    CHECK(events >= 48); // one event per trajectory record at minimum

    CHECK(ss_replay(out.c_str(), "ghost", 0, &text, &events) == SS_ERR_CONFIG);
    CHECK(std::string(ss_last_error()).find("ghost") != std::string::npos);
    CHECK(ss_replay(out.c_str(), "ada", 7, &text, &events) == SS_ERR_CONFIG);
}
