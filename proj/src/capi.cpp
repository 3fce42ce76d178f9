#include "socialsim.h"

#include "socialsim/runner.hpp"
#include "socialsim/util.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <sstream>
#include <string>

using nlohmann::json;

struct ss_sim {
    std::unique_ptr<socialsim::SimSession> session;
    std::string output_dir;
};

namespace {

thread_local std::string g_last_error;

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ss_status fail(ss_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

// Runs fn, translating the library's exceptions into status codes.
template <typename Fn>
ss_status guarded(Fn&& fn) {
    try {
        fn();
        return SS_OK;
    } catch (const socialsim::InputError& e) {
        return fail(SS_ERR_CONFIG, e.what());
    } catch (const socialsim::RuntimeFailure& e) {
        return fail(SS_ERR_RUNTIME, e.what());
    } catch (const std::exception& e) {
        return fail(SS_ERR_RUNTIME, e.what());
    }
}

json parse_overrides(const char* overrides_json) {
    if (overrides_json == nullptr || *overrides_json == '\0') return json();
    json patch = json::parse(overrides_json, nullptr, false);
    if (patch.is_discarded())
        throw socialsim::InputError("overrides are not valid JSON");
    return patch;
}

} // namespace

extern "C" {

const char* ss_last_error(void) { return g_last_error.c_str(); }

void ss_string_free(char* s) { std::free(s); }

const char* ss_version(void) { return "0.1.0"; }

ss_status ss_sim_create(const char* config_path, const char* overrides_json, ss_sim** out) {
    if (config_path == nullptr || out == nullptr)
        return fail(SS_ERR_ARG, "config_path and out must not be null");
    *out = nullptr;
    return guarded([&] {
        socialsim::RunConfig config =
            socialsim::load_resolved_config(config_path, parse_overrides(overrides_json));
        auto sim = std::make_unique<ss_sim>();
        sim->session = std::make_unique<socialsim::SimSession>(std::move(config));
        sim->output_dir = sim->session->output_dir();
        *out = sim.release();
    });
}

void ss_sim_destroy(ss_sim* sim) { delete sim; }

ss_status ss_sim_run(ss_sim* sim) {
    if (sim == nullptr) return fail(SS_ERR_ARG, "sim must not be null");
    return guarded([&] { sim->session->finish(); });
}

ss_status ss_sim_run_days(ss_sim* sim, int n) {
    if (sim == nullptr) return fail(SS_ERR_ARG, "sim must not be null");
    if (n < 0) return fail(SS_ERR_ARG, "day count must be nonnegative");
    return guarded([&] { sim->session->run_days(n); });
}

ss_status ss_sim_done(const ss_sim* sim, int* done) {
    if (sim == nullptr || done == nullptr) return fail(SS_ERR_ARG, "sim and done must not be null");
    *done = sim->session->done() ? 1 : 0;
    return SS_OK;
}

ss_status ss_sim_day(const ss_sim* sim, int* day) {
    if (sim == nullptr || day == nullptr) return fail(SS_ERR_ARG, "sim and day must not be null");
    *day = sim->session->current_day();
    return SS_OK;
}

ss_status ss_sim_total_days(const ss_sim* sim, int* days) {
    if (sim == nullptr || days == nullptr)
        return fail(SS_ERR_ARG, "sim and days must not be null");
    *days = sim->session->total_days();
    return SS_OK;
}

const char* ss_sim_output_dir(const ss_sim* sim) {
    return sim == nullptr ? nullptr : sim->output_dir.c_str();
}

ss_status ss_sim_resumed(const ss_sim* sim, int* resumed) {
    if (sim == nullptr || resumed == nullptr)
        return fail(SS_ERR_ARG, "sim and resumed must not be null");
    *resumed = sim->session->resumed() ? 1 : 0;
    return SS_OK;
}

ss_status ss_ablate(const char* config_path, const char* overrides_json, const char* axes,
                    char** result_json) {
    if (config_path == nullptr || result_json == nullptr)
        return fail(SS_ERR_ARG, "config_path and result_json must not be null");
    *result_json = nullptr;
    return guarded([&] {
        std::vector<std::string> axis_list;
        if (axes != nullptr) {
            std::istringstream in(axes);
            std::string axis;
            while (std::getline(in, axis, ','))
                if (!axis.empty()) axis_list.push_back(axis);
        }
        socialsim::RunConfig config =
            socialsim::load_resolved_config(config_path, parse_overrides(overrides_json));
        socialsim::AblateResult result = socialsim::ablate(config, axis_list);
        json out;
        out["manifest_path"] = result.manifest_path;
        out["runs"] = json::array();
        for (const auto& run : result.runs)
            out["runs"].push_back({{"label", run.label}, {"dir", run.dir}});
        *result_json = copy_string(out.dump(2));
    });
}

ss_status ss_evaluate(const char* target, const char* reference_path, const char* groups_path,
                      char** report_json) {
    if (target == nullptr || report_json == nullptr)
        return fail(SS_ERR_ARG, "target and report_json must not be null");
    *report_json = nullptr;
    return guarded([&] {
        socialsim::EvaluateOptions options;
        if (reference_path != nullptr && *reference_path != '\0')
            options.reference_trajectories = reference_path;
        if (groups_path != nullptr && *groups_path != '\0')
            options.group_profiles = groups_path;
        json report = socialsim::evaluate(target, options);
        *report_json = copy_string(report.dump(2));
    });
}

ss_status ss_ingest(const char* input_path, const char* kind, const char* output_path,
                    char** manifest_json) {
    if (input_path == nullptr || kind == nullptr || output_path == nullptr ||
        manifest_json == nullptr)
        return fail(SS_ERR_ARG, "all ingest arguments must not be null");
    *manifest_json = nullptr;
    return guarded([&] {
        socialsim::IngestResult result = socialsim::ingest(input_path, kind, output_path);
        *manifest_json = copy_string(result.manifest.dump(2));
    });
}

ss_status ss_replay(const char* run_dir, const char* agent_id, int day, char** text,
                    uint64_t* events) {
    if (run_dir == nullptr || agent_id == nullptr || text == nullptr)
        return fail(SS_ERR_ARG, "run_dir, agent_id, and text must not be null");
    *text = nullptr;
    return guarded([&] {
        socialsim::ReplayResult result = socialsim::replay(run_dir, agent_id, day);
        *text = copy_string(result.text);
        if (events != nullptr) *events = result.events;
    });
}

} // extern "C"
