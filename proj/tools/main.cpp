#include <socialsim.h>

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace {

// The CLI separates its exit codes into 0 (success), 2 (configuration or
// input problems, including argument misuse), and 3 (runtime failures).
int exit_code(ss_status status) {
    switch (status) {
        case SS_OK: return 0;
        case SS_ERR_CONFIG: return 2;
        case SS_ERR_ARG: return 2;
        default: return 3;
    }
}

int report_failure(ss_status status) {
    std::fprintf(stderr, "error: %s\n", ss_last_error());
    return exit_code(status);
}

// JSON string literal with the escapes the override patch needs.
std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<std::string> execution;
    std::optional<int> days;

    std::string to_json() const {
        std::string patch;
        auto add = [&patch](const std::string& field) {
            patch += patch.empty() ? "{" : ", ";
            patch += field;
        };
        if (seed) add("\"seed\": " + std::to_string(*seed));
        if (output_dir) add("\"output_dir\": " + quote(*output_dir));
        if (execution) add("\"execution\": " + quote(*execution));
        if (days) add("\"days\": " + std::to_string(*days));
        return patch.empty() ? "" : patch + "}";
    }
};

void add_override_flags(CLI::App* cmd, Overrides& overrides) {
    cmd->add_option("--seed", overrides.seed, "Override the run seed");
    cmd->add_option("--output", overrides.output_dir, "Override the output directory");
    cmd->add_option("--execution", overrides.execution, "sequential or concurrent")
        ->check(CLI::IsMember({"sequential", "concurrent"}));
    cmd->add_option("--days", overrides.days, "Override the simulated day count");
}

int run_simulate(const std::string& config, const Overrides& overrides) {
    ss_sim* sim = nullptr;
    ss_status status = ss_sim_create(config.c_str(), overrides.to_json().c_str(), &sim);
    if (status != SS_OK) return report_failure(status);
    int resumed = 0;
    ss_sim_resumed(sim, &resumed);
    status = ss_sim_run(sim);
    if (status != SS_OK) {
        ss_sim_destroy(sim);
        return report_failure(status);
    }
    const std::string dir = ss_sim_output_dir(sim);
    if (resumed) std::printf("resumed from checkpoint\n");
    std::printf("run complete: %s\n", dir.c_str());
    for (const char* name : {"trajectory.jsonl", "decisions.jsonl", "memory.jsonl",
                             "transcript.jsonl"})
        std::printf("  %s/%s\n", dir.c_str(), name);
    ss_sim_destroy(sim);
    return 0;
}

int run_ablate(const std::string& config, const Overrides& overrides,
               const std::string& axes) {
    char* result = nullptr;
    ss_status status =
        ss_ablate(config.c_str(), overrides.to_json().c_str(), axes.c_str(), &result);
    if (status != SS_OK) return report_failure(status);
    std::printf("%s\n", result);
    ss_string_free(result);
    return 0;
}

int run_evaluate(const std::string& target, const std::string& reference,
                 const std::string& groups) {
    char* report = nullptr;
    ss_status status = ss_evaluate(target.c_str(), reference.empty() ? nullptr : reference.c_str(),
                                   groups.empty() ? nullptr : groups.c_str(), &report);
    if (status != SS_OK) return report_failure(status);
    std::printf("%s\n", report);
    ss_string_free(report);
    return 0;
}

int run_ingest(const std::string& input, const std::string& kind, std::string output) {
    if (output.empty()) {
        output = input;
        std::size_t dot = output.find_last_of('.');
        std::size_t slash = output.find_last_of('/');
        if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
            output.resize(dot);
        output += ".canonical.jsonl";
    }
    char* manifest = nullptr;
    ss_status status = ss_ingest(input.c_str(), kind.c_str(), output.c_str(), &manifest);
    if (status != SS_OK) return report_failure(status);
    std::printf("wrote %s\n%s\n", output.c_str(), manifest);
    ss_string_free(manifest);
    return 0;
}

int run_replay(const std::string& run_dir, const std::string& agent, int day) {
    char* text = nullptr;
    std::uint64_t events = 0;
    ss_status status = ss_replay(run_dir.c_str(), agent.c_str(), day, &text, &events);
    if (status != SS_OK) return report_failure(status);
    std::printf("%s", text);
    std::printf("events: %llu\n", static_cast<unsigned long long>(events));
    ss_string_free(text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-time multi-agent social simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ss_version());

    std::string config, axes, target, reference, groups, input, kind, output, run_dir, agent;
    int day = 0;
    Overrides overrides;

    CLI::App* simulate = app.add_subcommand("simulate", "Run one simulation");
    simulate->add_option("config", config, "Run configuration JSON")->required();
    add_override_flags(simulate, overrides);

    Overrides ablate_overrides;
    CLI::App* ablate = app.add_subcommand("ablate", "Run the full model plus ablations");
    ablate->add_option("config", config, "Run configuration JSON")->required();
    ablate->add_option("--axes", axes, "Comma-separated subset of M,P,L (default: all)");
    add_override_flags(ablate, ablate_overrides);

    CLI::App* evaluate = app.add_subcommand("evaluate", "Compute metrics for a run or manifest");
    evaluate->add_option("target", target, "Run directory or ablation manifest")->required();
    evaluate->add_option("--reference", reference, "Canonical reference trajectory dataset");
    evaluate->add_option("--groups", groups, "Canonical group profile dataset");

    CLI::App* ingest = app.add_subcommand("ingest", "Convert a dataset to canonical form");
    ingest->add_option("input", input, "CSV or line-delimited JSON file")->required();
    ingest->add_option("--kind", kind, "poi_table, trajectory_reference, or group_profiles")
        ->required();
    ingest->add_option("--output", output, "Canonical output path");

    CLI::App* replay = app.add_subcommand("replay", "Narrate one agent's day from a run");
    replay->add_option("run_dir", run_dir, "Run output directory")->required();
    replay->add_option("--agent", agent, "Agent id")->required();
    replay->add_option("--day", day, "Simulated day, starting at 0")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // argument misuse is an input error
    }

    if (simulate->parsed()) return run_simulate(config, overrides);
    if (ablate->parsed()) return run_ablate(config, ablate_overrides, axes);
    if (evaluate->parsed()) return run_evaluate(target, reference, groups);
    if (ingest->parsed()) return run_ingest(input, kind, output);
    if (replay->parsed()) return run_replay(run_dir, agent, day);
    return 2;
}
