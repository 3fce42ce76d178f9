#include "socialsim/runner.hpp"

#include "socialsim/metrics.hpp"
#include "socialsim/oracle.hpp"
#include "socialsim/remote.hpp"
#include "socialsim/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace socialsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    write_text_file(tmp, content);
    fs::rename(tmp, path);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

} // namespace

std::unique_ptr<CognitionBackend> make_backend(const RunConfig& config) {
    if (config.backend.kind == "oracle") {
        OracleParams params;
        params.travel_speed_kmh = config.travel_speed_kmh;
        const OracleOverrides& o = config.backend.oracle;
        if (o.restriction_base_delta) params.restriction_base_delta = *o.restriction_base_delta;
        if (o.caution_min) params.caution_min = *o.caution_min;
        if (o.caution_max) params.caution_max = *o.caution_max;
        if (o.attitude_jitter) params.attitude_jitter = *o.attitude_jitter;
        if (o.habituation)
            for (const auto& [group, rate] : *o.habituation) params.habituation[group] = rate;
        return std::make_unique<OracleBackend>(config.seed, params);
    }
    if (config.backend.kind == "remote")
        return std::make_unique<RemoteBackend>(remote_config_from_env(config.backend.prompts_dir));
    throw InputError("unknown backend kind: " + config.backend.kind);
}

RunConfig resolve_run_config(RunConfig config, const std::string& base_dir) {
    resolve_config_paths(config, base_dir);
    if (!config.poi_dataset.empty()) {
        std::vector<json> rows = read_jsonl(config.poi_dataset, "poi_table");
        config.pois.clear();
        for (const auto& row : rows) {
            PoiConfig poi;
            poi.id = row.at("id").get<std::string>();
            poi.category = row.at("category").get<std::string>();
            poi.location.x = row.at("x").get<double>();
            poi.location.y = row.at("y").get<double>();
            config.pois.push_back(std::move(poi));
        }
        config.poi_dataset.clear();
    }
    if (config.generator) {
        config.roster = expand_roster(config, config.pois);
        config.generator.reset();
    }
    // Revalidate the resolved form; generated agents and dataset POIs get the
    // same cross-checks as inline ones.
    return parse_run_config(run_config_to_json(config));
}

RunConfig load_resolved_config(const std::string& config_path, const json& overrides) {
    RunConfig config = load_run_config(config_path);
    if (!overrides.is_null() && !overrides.empty()) {
        json doc = run_config_to_json(config);
        doc.merge_patch(overrides);
        config = parse_run_config(doc);
    }
    return resolve_run_config(std::move(config),
                              fs::path(config_path).parent_path().string());
}

// ---------------------------------------------------------------------------
// SimSession

namespace {

std::string checkpoint_name(int day) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "day_%04d.json", day);
    return buf;
}

std::optional<std::string> latest_checkpoint(const std::string& dir) {
    std::optional<std::string> best;
    if (!fs::is_directory(dir)) return best;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("day_", 0) != 0 || entry.path().extension() != ".json") continue;
        if (!best || name > fs::path(*best).filename().string()) best = entry.path().string();
    }
    return best;
}

} // namespace

SimSession::SimSession(RunConfig resolved) : config_(std::move(resolved)) {
    if (!config_.poi_dataset.empty() || config_.generator)
        throw InputError("simulation requires a resolved config (inline POIs and roster)");
    backend_ = make_backend(config_);
    world_ = std::make_unique<World>(config_, *backend_);

    out_dir_ = config_.output_dir;
    checkpoint_dir_ = join_path(out_dir_, kCheckpointDir);
    fs::create_directories(checkpoint_dir_);

    const std::string config_path = join_path(checkpoint_dir_, kRunConfigFile);
    const std::string wanted = run_config_to_json(config_).dump(2);
    if (fs::exists(config_path)) {
        if (read_text_file(config_path) != wanted)
            throw InputError("output directory " + out_dir_ +
                             " already holds a different run's state");
        if (auto latest = latest_checkpoint(checkpoint_dir_)) {
            json snap;
            try {
                snap = json::parse(read_text_file(*latest));
            } catch (const json::exception& e) {
                throw RuntimeFailure("corrupt checkpoint " + *latest + ": " + e.what());
            }
            if (snap.value("kind", "") != "checkpoint" || !snap.contains("world") ||
                !snap.contains("bytes"))
                throw RuntimeFailure("corrupt checkpoint " + *latest);
            const json& bytes = snap["bytes"];
            truncate_file(join_path(out_dir_, kTrajectoryFile),
                          bytes.at("trajectory").get<std::uint64_t>());
            truncate_file(join_path(out_dir_, kDecisionFile),
                          bytes.at("decisions").get<std::uint64_t>());
            truncate_file(join_path(out_dir_, kTranscriptFile),
                          bytes.at("transcript").get<std::uint64_t>());
            open_writers(true);
            world_->restore(snap["world"]);
            resumed_ = true;
        }
    } else {
        atomic_write(config_path, wanted);
    }

    WorldSinks sinks;
    sinks.trajectory = [this](const TrajectoryRecord& r) { trajectory_.write(r.to_json()); };
    sinks.decision = [this](const DecisionRecord& r) { decisions_.write(r.to_json()); };
    sinks.transcript = [this](const json& entry) { transcript_.write(entry); };
    world_->set_sinks(std::move(sinks));

    if (!resumed_) {
        open_writers(false);
        world_->init_agents();
    }
}

void SimSession::open_writers(bool append) {
    trajectory_.open(join_path(out_dir_, kTrajectoryFile), "trajectory", append);
    decisions_.open(join_path(out_dir_, kDecisionFile), "decisions", append);
    transcript_.open(join_path(out_dir_, kTranscriptFile), "transcript", append);
}

int SimSession::total_days() const {
    return static_cast<int>((config_.total_ticks() + kTicksPerDay - 1) / kTicksPerDay);
}

int SimSession::current_day() const { return static_cast<int>(world_->clock() / kTicksPerDay); }

bool SimSession::done() const { return ticks_remaining() <= 0; }

std::int64_t SimSession::ticks_remaining() const {
    return config_.total_ticks() - world_->clock();
}

void SimSession::write_checkpoint() {
    trajectory_.flush();
    decisions_.flush();
    transcript_.flush();
    json snap;
    snap["schema"] = kSchemaTag;
    snap["kind"] = "checkpoint";
    snap["clock"] = world_->clock();
    snap["world"] = world_->checkpoint();
    snap["bytes"] = {{"trajectory", trajectory_.bytes()},
                     {"decisions", decisions_.bytes()},
                     {"transcript", transcript_.bytes()}};
    const int day = static_cast<int>((world_->clock() + kTicksPerDay - 1) / kTicksPerDay);
    atomic_write(join_path(checkpoint_dir_, checkpoint_name(day)), snap.dump());
}

void SimSession::write_memory_log() {
    if (memory_written_) return;
    JsonlWriter writer(join_path(out_dir_, kMemoryFile), "memory");
    for (const std::string& id : world_->agent_ids()) {
        json row;
        row["agent_id"] = id;
        row["memory"] = world_->agent(id).memory.to_json();
        writer.write(row);
    }
    writer.flush();
    memory_written_ = true;
}

void SimSession::run_days(int n) {
    for (int i = 0; i < n && !done(); ++i) {
        std::int64_t chunk = std::min<std::int64_t>(kTicksPerDay, ticks_remaining());
        for (std::int64_t t = 0; t < chunk; ++t) world_->step();
        const bool day_boundary = world_->clock() % kTicksPerDay == 0;
        const int cadence = std::max(1, config_.checkpoint_every_days);
        if (done() || (day_boundary && current_day() % cadence == 0)) write_checkpoint();
    }
    if (done()) write_memory_log();
}

SimulateResult SimSession::finish() {
    while (!done()) run_days(total_days());
    write_memory_log();
    trajectory_.flush();
    decisions_.flush();
    transcript_.flush();
    SimulateResult result;
    result.output_dir = out_dir_;
    result.files = {join_path(out_dir_, kTrajectoryFile), join_path(out_dir_, kDecisionFile),
                    join_path(out_dir_, kMemoryFile), join_path(out_dir_, kTranscriptFile)};
    result.ticks = world_->clock();
    result.resumed = resumed_;
    return result;
}

SimulateResult simulate(const RunConfig& resolved) { return SimSession(resolved).finish(); }

// ---------------------------------------------------------------------------
// Ablation harness

namespace {

struct Axis {
    char key;
    const char* label;
};

AblationFlags flags_for(char axis) {
    AblationFlags flags;
    if (axis == 'M') flags.disable_motivation = true;
    if (axis == 'P') flags.disable_planning = true;
    if (axis == 'L') flags.disable_learning = true;
    return flags;
}

} // namespace

AblateResult ablate(const RunConfig& resolved, const std::vector<std::string>& axes) {
    static const std::vector<Axis> kAxes{{'M', "woM"}, {'P', "woP"}, {'L', "woL"}};
    std::set<char> wanted;
    for (const std::string& raw : axes) {
        std::string a = raw;
        std::transform(a.begin(), a.end(), a.begin(), ::toupper);
        if (a == "M" || a == "MOTIVATION")
            wanted.insert('M');
        else if (a == "P" || a == "PLANNING")
            wanted.insert('P');
        else if (a == "L" || a == "LEARNING" || a == "E")
            wanted.insert('L');
        else
            throw InputError("unknown ablation axis: " + raw + " (expected M, P, or L)");
    }
    if (wanted.empty()) wanted = {'M', 'P', 'L'};

    const std::string base_dir = resolved.output_dir;
    fs::create_directories(base_dir);

    AblateResult result;
    json manifest;
    manifest["schema"] = kSchemaTag;
    manifest["kind"] = "ablation_manifest";
    manifest["seed"] = resolved.seed;
    manifest["runs"] = json::array();

    auto run_one = [&](const std::string& label, AblationFlags flags) {
        RunConfig rc = resolved;
        rc.output_dir = join_path(base_dir, label);
        rc.ablation = flags;
        SimulateResult sim = simulate(rc);
        result.runs.push_back({label, sim.output_dir});
        manifest["runs"].push_back({{"label", label},
                                    {"dir", sim.output_dir},
                                    {"ablation",
                                     {{"disable_motivation", flags.disable_motivation},
                                      {"disable_planning", flags.disable_planning},
                                      {"disable_learning", flags.disable_learning}}}});
    };

    run_one("full", AblationFlags{});
    for (const Axis& axis : kAxes)
        if (wanted.count(axis.key)) run_one(axis.label, flags_for(axis.key));

    result.manifest_path = join_path(base_dir, kAblationManifestFile);
    atomic_write(result.manifest_path, manifest.dump(2) + "\n");
    return result;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::vector<TrajectoryRecord> read_trajectories(const std::string& path,
                                                const std::string& kind) {
    std::vector<TrajectoryRecord> records;
    for (const json& row : read_jsonl(path, kind)) records.push_back(TrajectoryRecord::from_json(row));
    return records;
}

struct ReferenceData {
    std::vector<TrajectoryRecord> records;
    std::vector<TripRecord> trips;
    std::vector<double> radius_values;
    std::vector<double> dayloc_values;
};

struct RunData {
    std::string label;
    std::string dir;
    RunConfig config;
    std::vector<TrajectoryRecord> records;
    std::vector<TripRecord> trips;
};

RunData load_run(const std::string& label, const std::string& dir) {
    RunData run;
    run.label = label;
    run.dir = dir;
    const std::string config_path = join_path(join_path(dir, kCheckpointDir), kRunConfigFile);
    if (!fs::exists(config_path))
        throw InputError("not a run directory (missing " + config_path + ")");
    run.config = load_run_config(config_path);
    run.records = read_trajectories(join_path(dir, kTrajectoryFile), "trajectory");
    run.trips = extract_trips(run.records, run.config.coordinates);
    return run;
}

std::map<std::string, NeedTier> tier_map(const RunConfig& config) {
    std::map<std::string, NeedTier> tiers;
    for (const auto& [id, spec] : config.needs) tiers[id] = spec.tier;
    return tiers;
}

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

json run_report(const RunData& run, const ReferenceData* reference,
                const std::map<std::string, std::string>& groups) {
    const CoordinateSystem cs = run.config.coordinates;
    const std::map<std::string, NeedTier> tiers = tier_map(run.config);

    std::vector<double> radius_values;
    for (const auto& [agent, r] : radius_by_agent(run.records, cs)) radius_values.push_back(r);

    std::vector<double> dayloc_values;
    for (const auto& [agent, counts] : daily_location_counts(run.records))
        for (int c : counts) dayloc_values.push_back(c);

    std::vector<double> intention_counts, similarity_values;
    for (const auto& [agent, stats] : intention_stats(run.records)) {
        for (int c : stats.daily_counts) intention_counts.push_back(c);
        for (double s : stats.similarity) similarity_values.push_back(s);
    }

    SocialTripStats social = social_trip_stats(run.trips, tiers);

    json metrics;
    metrics["radius_of_gyration_mean_km"] = mean_of(radius_values);
    metrics["daily_locations_mean"] = mean_of(dayloc_values);
    metrics["intention_count_mean"] = mean_of(intention_counts);
    if (!similarity_values.empty())
        metrics["intention_similarity_mean"] = mean_of(similarity_values);
    metrics["trips_total"] = social.total;
    metrics["social_trip_proportion_pct"] = social.proportion_pct;
    if (social.median_km) metrics["social_trip_median_km"] = *social.median_km;

    const int days = static_cast<int>((run.config.total_ticks() + kTicksPerDay - 1) / kTicksPerDay);
    const int weeks = days / 7;
    if (weeks >= 2) {
        metrics["weekly_trip_counts"] = weekly_trip_counts(run.trips, weeks);
        metrics["mobility_ratio_trend"] = mobility_ratio_trend(run.trips, weeks, 0);
        std::set<std::string> distinct;
        for (const auto& [agent, group] : groups) distinct.insert(group);
        if (distinct.size() >= 2)
            metrics["group_reduction"] = group_reduction(run.trips, groups, 0, weeks - 1);
    }

    if (reference) {
        metrics["radius_of_gyration_divergence"] =
            distribution_divergence(radius_values, reference->radius_values, radius_binning());
        metrics["daily_locations_divergence"] = distribution_divergence(
            dayloc_values, reference->dayloc_values, daily_location_binning());
        metrics["category_alignment"] = category_alignment(run.records, reference->records);
        if (auto ratio = cumulative_distance_ratio(run.trips, reference->trips))
            metrics["cumulative_distance_ratio"] = *ratio;
        SocialTripStats ref_social = social_trip_stats(reference->trips, tiers);
        if (ref_social.social > 0) {
            if (ref_social.proportion_pct > 0.0)
                metrics["social_trip_proportion_rel_err"] =
                    std::abs(social.proportion_pct - ref_social.proportion_pct) /
                    ref_social.proportion_pct;
            if (ref_social.median_km && *ref_social.median_km > 0.0 && social.median_km)
                metrics["social_trip_median_rel_err"] =
                    std::abs(*social.median_km - *ref_social.median_km) / *ref_social.median_km;
        }
    }

    json out;
    out["label"] = run.label;
    out["dir"] = run.dir;
    out["agents"] = run.config.roster.size();
    out["days"] = days;
    out["ticks"] = run.config.total_ticks();
    out["metrics"] = std::move(metrics);
    return out;
}

json paired_report(const RunData& base, const RunData& other) {
    json pair;
    pair["base"] = base.label;
    pair["other"] = other.label;
    const CoordinateSystem cs = base.config.coordinates;
    const std::map<std::string, NeedTier> tiers = tier_map(base.config);

    std::vector<double> radius_a, radius_b;
    for (const auto& [agent, r] : radius_by_agent(base.records, cs)) radius_a.push_back(r);
    for (const auto& [agent, r] : radius_by_agent(other.records, cs)) radius_b.push_back(r);
    pair["radius_of_gyration_divergence"] =
        distribution_divergence(radius_b, radius_a, radius_binning());

    std::vector<double> dayloc_a, dayloc_b;
    for (const auto& [agent, counts] : daily_location_counts(base.records))
        for (int c : counts) dayloc_a.push_back(c);
    for (const auto& [agent, counts] : daily_location_counts(other.records))
        for (int c : counts) dayloc_b.push_back(c);
    pair["daily_locations_divergence"] =
        distribution_divergence(dayloc_b, dayloc_a, daily_location_binning());

    pair["category_alignment"] = category_alignment(other.records, base.records);

    SocialTripStats social_a = social_trip_stats(base.trips, tiers);
    SocialTripStats social_b = social_trip_stats(other.trips, tiers);
    pair["social_trip_proportion_delta_pct"] =
        social_b.proportion_pct - social_a.proportion_pct;
    if (social_a.median_km && social_b.median_km)
        pair["social_trip_median_delta_km"] = *social_b.median_km - *social_a.median_km;
    if (auto ratio = cumulative_distance_ratio(other.trips, base.trips))
        pair["cumulative_distance_ratio"] = *ratio;
    return pair;
}

void flatten_csv(std::ostringstream& csv, const std::string& run, const std::string& name,
                 const json& value) {
    if (value.is_object()) {
        for (const auto& [key, sub] : value.items()) flatten_csv(csv, run, name + "." + key, sub);
    } else if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i)
            flatten_csv(csv, run, name + "[" + std::to_string(i) + "]", value[i]);
    } else {
        csv << run << "," << name << "," << value.dump() << "\n";
    }
}

std::string report_csv(const json& report) {
    std::ostringstream csv;
    csv << "run,metric,value\n";
    for (const json& run : report["runs"]) {
        const std::string label = run["label"].get<std::string>();
        csv << label << ",agents," << run["agents"].dump() << "\n";
        csv << label << ",days," << run["days"].dump() << "\n";
        csv << label << ",ticks," << run["ticks"].dump() << "\n";
        for (const auto& [name, value] : run["metrics"].items())
            flatten_csv(csv, label, name, value);
    }
    if (report.contains("paired")) {
        for (const json& pair : report["paired"]) {
            const std::string label = pair["base"].get<std::string>() + "_vs_" +
                                      pair["other"].get<std::string>();
            for (const auto& [name, value] : pair.items()) {
                if (name == "base" || name == "other") continue;
                flatten_csv(csv, label, name, value);
            }
        }
    }
    return csv.str();
}

} // namespace

json evaluate(const std::string& target, const EvaluateOptions& options) {
    std::string report_dir;
    std::vector<RunData> runs;

    std::string manifest_path;
    if (fs::is_directory(target)) {
        if (fs::exists(join_path(target, kTrajectoryFile))) {
            report_dir = target;
            runs.push_back(load_run("run", target));
        } else if (fs::exists(join_path(target, kAblationManifestFile))) {
            manifest_path = join_path(target, kAblationManifestFile);
        } else {
            throw InputError("evaluate target " + target +
                             " is neither a run directory nor an ablation manifest");
        }
    } else if (fs::exists(target)) {
        manifest_path = target;
    } else {
        throw InputError("evaluate target does not exist: " + target);
    }

    if (!manifest_path.empty()) {
        json manifest;
        try {
            manifest = json::parse(read_text_file(manifest_path));
        } catch (const json::exception& e) {
            throw InputError("cannot parse manifest " + manifest_path + ": " + e.what());
        }
        if (manifest.value("kind", "") != "ablation_manifest")
            throw InputError(manifest_path + " is not an ablation manifest");
        report_dir = fs::path(manifest_path).parent_path().string();
        for (const json& entry : manifest.at("runs"))
            runs.push_back(load_run(entry.at("label").get<std::string>(),
                                    entry.at("dir").get<std::string>()));
    }
    if (runs.empty()) throw InputError("no runs to evaluate");

    std::optional<ReferenceData> reference;
    if (options.reference_trajectories) {
        ReferenceData ref;
        ref.records = read_trajectories(*options.reference_trajectories, "trajectory_reference");
        const CoordinateSystem cs = runs.front().config.coordinates;
        ref.trips = extract_trips(ref.records, cs);
        for (const auto& [agent, r] : radius_by_agent(ref.records, cs))
            ref.radius_values.push_back(r);
        for (const auto& [agent, counts] : daily_location_counts(ref.records))
            for (int c : counts) ref.dayloc_values.push_back(c);
        reference = std::move(ref);
    }

    // Income groups come from the run roster; an explicit profile dataset
    // overrides them.
    std::map<std::string, std::string> groups;
    for (const AgentSpec& agent : runs.front().config.roster)
        groups[agent.id] = agent.income_group;
    if (options.group_profiles) {
        for (const json& row : read_jsonl(*options.group_profiles, "group_profiles"))
            groups[row.at("agent_id").get<std::string>()] =
                row.at("income_group").get<std::string>();
    }

    json report;
    report["schema"] = kSchemaTag;
    report["kind"] = "metric_report";
    report["target"] = target;
    report["reference"] =
        options.reference_trajectories ? json(*options.reference_trajectories) : json();
    report["runs"] = json::array();
    for (const RunData& run : runs)
        report["runs"].push_back(run_report(run, reference ? &*reference : nullptr, groups));

    if (runs.size() > 1) {
        std::size_t base_index = 0;
        for (std::size_t i = 0; i < runs.size(); ++i)
            if (runs[i].label == "full") base_index = i;
        report["paired"] = json::array();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (i == base_index) continue;
            report["paired"].push_back(paired_report(runs[base_index], runs[i]));
        }
    }

    atomic_write(join_path(report_dir, kReportJsonFile), report.dump(2) + "\n");
    atomic_write(join_path(report_dir, kReportCsvFile), report_csv(report));
    return report;
}

// ---------------------------------------------------------------------------
// Dataset ingestion

namespace {

// Minimal CSV: comma separation, double quotes for embedded commas/quotes.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

struct RowErrors {
    std::vector<std::string> messages;

    void add(std::size_t row, const std::string& message) {
        if (messages.size() < 20)
            messages.push_back("row " + std::to_string(row) + ": " + message);
    }
    void raise_if_any(const std::string& path) const {
        if (messages.empty()) return;
        std::string joined;
        for (const auto& m : messages) joined += "\n  " + m;
        throw InputError("rejected " + std::to_string(messages.size()) +
                         (messages.size() == 20 ? "+" : "") + " rows in " + path + ":" + joined);
    }
};

bool parse_number(const std::string& text, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(text, &used);
        return used == text.size() && std::isfinite(out);
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_integer(const std::string& text, std::int64_t& out) {
    try {
        std::size_t used = 0;
        out = std::stoll(text, &used);
        return used == text.size();
    } catch (const std::exception&) {
        return false;
    }
}

// Rows normalized to JSON objects, independent of the input syntax.
struct RawDataset {
    std::vector<json> rows;
    bool geographic = false; // CSV columns were lat/lon
};

RawDataset read_raw_rows(const std::string& path, const std::string& kind) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open dataset: " + path);

    RawDataset data;
    std::string line;
    if (fs::path(path).extension() == ".csv") {
        if (!std::getline(in, line)) throw InputError(path + ": empty CSV file");
        std::vector<std::string> header = split_csv_line(line);
        std::map<std::string, std::size_t> column;
        for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
        const bool latlon = column.count("lat") && column.count("lon");
        data.geographic = latlon;

        RowErrors errors;
        std::size_t row_number = 0;
        while (std::getline(in, line)) {
            ++row_number;
            if (line.empty()) continue;
            std::vector<std::string> fields = split_csv_line(line);
            if (fields.size() != header.size()) {
                errors.add(row_number, "expected " + std::to_string(header.size()) +
                                           " fields, found " + std::to_string(fields.size()));
                continue;
            }
            json row;
            for (std::size_t i = 0; i < header.size(); ++i) {
                std::string key = header[i];
                if (latlon && key == "lat") key = "x";
                if (latlon && key == "lon") key = "y";
                row[key] = fields[i];
            }
            row["__row"] = row_number;
            data.rows.push_back(std::move(row));
        }
        errors.raise_if_any(path);
        return data;
    }

    // Line-delimited JSON; an optional leading header record is skipped after
    // a kind check.
    RowErrors errors;
    std::size_t line_number = 0, row_number = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::exception&) {
            ++row_number;
            errors.add(row_number, "not valid JSON");
            first = false;
            continue;
        }
        if (first && row.is_object() && row.contains("kind") && row.contains("schema")) {
            if (row["kind"] != kind)
                throw InputError(path + ": dataset kind is " +
                                 row["kind"].get<std::string>() + ", expected " + kind);
            first = false;
            continue;
        }
        first = false;
        ++row_number;
        if (!row.is_object()) {
            errors.add(row_number, "not a JSON object");
            continue;
        }
        row["__row"] = row_number;
        data.rows.push_back(std::move(row));
    }
    errors.raise_if_any(path);
    return data;
}

// Field access that tolerates both JSON-typed and CSV string values.
bool field_string(const json& row, const std::string& key, std::string& out) {
    if (!row.contains(key) || row[key].is_null()) return false;
    if (row[key].is_string()) {
        out = row[key].get<std::string>();
        return true;
    }
    return false;
}

bool field_number(const json& row, const std::string& key, double& out) {
    if (!row.contains(key) || row[key].is_null()) return false;
    if (row[key].is_number()) {
        out = row[key].get<double>();
        return true;
    }
    if (row[key].is_string()) return parse_number(row[key].get<std::string>(), out);
    return false;
}

bool field_integer(const json& row, const std::string& key, std::int64_t& out) {
    if (!row.contains(key) || row[key].is_null()) return false;
    if (row[key].is_number_integer()) {
        out = row[key].get<std::int64_t>();
        return true;
    }
    if (row[key].is_string()) return parse_integer(row[key].get<std::string>(), out);
    return false;
}

std::vector<json> canonical_poi_rows(const RawDataset& data, const std::string& path) {
    RowErrors errors;
    std::set<std::string> ids;
    std::vector<json> out;
    for (const json& row : data.rows) {
        const std::size_t n = row["__row"].get<std::size_t>();
        std::string id, category;
        double x = 0, y = 0;
        bool ok = true;
        if (!field_string(row, "id", id) || id.empty()) {
            errors.add(n, "missing or empty 'id'");
            ok = false;
        }
        if (!field_string(row, "category", category) || category.empty()) {
            errors.add(n, "missing or empty 'category'");
            ok = false;
        }
        if (!field_number(row, "x", x)) {
            errors.add(n, "missing or non-numeric 'x'");
            ok = false;
        }
        if (!field_number(row, "y", y)) {
            errors.add(n, "missing or non-numeric 'y'");
            ok = false;
        }
        if (ok && !ids.insert(id).second) {
            errors.add(n, "duplicate POI id '" + id + "'");
            ok = false;
        }
        if (!ok) continue;
        out.push_back({{"id", id}, {"category", category}, {"x", x}, {"y", y}});
    }
    errors.raise_if_any(path);
    return out;
}

std::vector<json> canonical_trajectory_rows(const RawDataset& data, const std::string& path) {
    RowErrors errors;
    std::vector<json> out;
    for (const json& row : data.rows) {
        const std::size_t n = row["__row"].get<std::size_t>();
        std::string agent, poi_id, poi_category;
        std::int64_t tick = 0;
        double x = 0, y = 0;
        bool ok = true;
        if (!field_string(row, "agent_id", agent) || agent.empty()) {
            errors.add(n, "missing or empty 'agent_id'");
            ok = false;
        }
        if (!field_integer(row, "tick", tick) || tick < 0) {
            errors.add(n, "missing or invalid 'tick'");
            ok = false;
        }
        if (!field_string(row, "poi_id", poi_id)) poi_id.clear(); // empty = in transit
        if (!field_string(row, "poi_category", poi_category) || poi_category.empty())
            poi_category = poi_id.empty() ? "in_transit" : "unknown";
        if (!field_number(row, "x", x)) {
            errors.add(n, "missing or non-numeric 'x'");
            ok = false;
        }
        if (!field_number(row, "y", y)) {
            errors.add(n, "missing or non-numeric 'y'");
            ok = false;
        }
        if (!ok) continue;
        TrajectoryRecord record;
        record.agent_id = agent;
        record.tick = tick;
        std::string time, need, action;
        if (field_string(row, "time", time)) record.time = time;
        record.poi_id = poi_id;
        record.poi_category = poi_category;
        record.location = {x, y};
        if (field_string(row, "activated_need", need) && !need.empty())
            record.activated_need = need;
        if (field_string(row, "action_id", action) && !action.empty()) record.action_id = action;
        if (row.contains("needs") && row["needs"].is_object())
            record.needs = row["needs"].get<std::map<std::string, double>>();
        out.push_back(record.to_json());
    }
    errors.raise_if_any(path);
    return out;
}

std::vector<json> canonical_group_rows(const RawDataset& data, const std::string& path) {
    RowErrors errors;
    std::set<std::string> agents;
    std::vector<json> out;
    for (const json& row : data.rows) {
        const std::size_t n = row["__row"].get<std::size_t>();
        std::string agent, group;
        bool ok = true;
        if (!field_string(row, "agent_id", agent) || agent.empty()) {
            errors.add(n, "missing or empty 'agent_id'");
            ok = false;
        }
        if (!field_string(row, "income_group", group) ||
            (group != "high" && group != "low" && group != "other")) {
            errors.add(n, "'income_group' must be high, low, or other");
            ok = false;
        }
        if (ok && !agents.insert(agent).second) {
            errors.add(n, "duplicate agent_id '" + agent + "'");
            ok = false;
        }
        if (!ok) continue;
        out.push_back({{"agent_id", agent}, {"income_group", group}});
    }
    errors.raise_if_any(path);
    return out;
}

} // namespace

IngestResult ingest(const std::string& input_path, const std::string& kind,
                    const std::string& output_path) {
    if (kind != "poi_table" && kind != "trajectory_reference" && kind != "group_profiles")
        throw InputError("unknown dataset kind: " + kind);
    if (!fs::exists(input_path)) throw InputError("dataset does not exist: " + input_path);

    RawDataset data = read_raw_rows(input_path, kind);
    std::vector<json> rows;
    std::string coordinates = data.geographic ? "geographic" : "planar_km";
    if (kind == "poi_table") {
        rows = canonical_poi_rows(data, input_path);
    } else if (kind == "trajectory_reference") {
        rows = canonical_trajectory_rows(data, input_path);
    } else {
        rows = canonical_group_rows(data, input_path);
        coordinates = "none";
    }

    if (fs::path(output_path).has_parent_path())
        fs::create_directories(fs::path(output_path).parent_path());
    JsonlWriter writer(output_path, kind);
    for (const json& row : rows) writer.write(row);
    writer.flush();

    IngestResult result;
    result.output_path = output_path;
    result.manifest_path = output_path + ".manifest.json";
    result.manifest = {{"schema", kSchemaTag}, {"kind", "dataset_manifest"},
                       {"dataset_kind", kind}, {"path", output_path},
                       {"coordinates", coordinates}, {"records", rows.size()}};
    atomic_write(result.manifest_path, result.manifest.dump(2) + "\n");
    return result;
}

// ---------------------------------------------------------------------------
// Replay

namespace {

std::string clock_of(const std::string& iso_time) {
    return iso_time.size() >= 16 ? iso_time.substr(11, 5) : "--:--";
}

} // namespace

ReplayResult replay(const std::string& run_dir, const std::string& agent_id, int day) {
    const std::string config_path = join_path(join_path(run_dir, kCheckpointDir), kRunConfigFile);
    if (!fs::exists(config_path))
        throw InputError("not a run directory (missing " + config_path + ")");
    RunConfig config = load_run_config(config_path);

    bool known = false;
    for (const AgentSpec& agent : config.roster) known = known || agent.id == agent_id;
    if (!known) throw InputError("unknown agent '" + agent_id + "'");
    const int days = static_cast<int>((config.total_ticks() + kTicksPerDay - 1) / kTicksPerDay);
    if (day < 0 || day >= days)
        throw InputError("day " + std::to_string(day) + " is outside this run (0.." +
                         std::to_string(days - 1) + ")");

    const std::int64_t first_tick = static_cast<std::int64_t>(day) * kTicksPerDay;
    const std::int64_t end_tick = first_tick + kTicksPerDay;

    std::vector<TrajectoryRecord> steps;
    for (const json& row : read_jsonl(join_path(run_dir, kTrajectoryFile), "trajectory")) {
        TrajectoryRecord r = TrajectoryRecord::from_json(row);
        if (r.agent_id == agent_id && r.tick >= first_tick && r.tick < end_tick)
            steps.push_back(std::move(r));
    }
    std::vector<DecisionRecord> choices;
    for (const json& row : read_jsonl(join_path(run_dir, kDecisionFile), "decisions")) {
        DecisionRecord d = DecisionRecord::from_json(row);
        if (d.agent_id == agent_id && d.tick >= first_tick && d.tick < end_tick)
            choices.push_back(std::move(d));
    }
    std::sort(steps.begin(), steps.end(),
              [](const TrajectoryRecord& a, const TrajectoryRecord& b) { return a.tick < b.tick; });
    std::sort(choices.begin(), choices.end(),
              [](const DecisionRecord& a, const DecisionRecord& b) { return a.tick < b.tick; });

    std::ostringstream text;
    text << "Day " << day << " of agent " << agent_id;
    if (!steps.empty() && steps.front().time.size() >= 10)
        text << " (" << steps.front().time.substr(0, 10) << ")";
    text << "\n";

    ReplayResult result;
    std::size_t next_choice = 0;
    std::string last_poi = "\x01"; // sentinel unequal to any real id
    for (const TrajectoryRecord& step : steps) {
        while (next_choice < choices.size() && choices[next_choice].tick <= step.tick) {
            const DecisionRecord& d = choices[next_choice++];
            std::string what = d.chosen_id;
            for (const auto& c : d.candidates)
                if (c.candidate.id == d.chosen_id) what = c.candidate.description;
            text << "  " << clock_of(d.time) << "  decided: " << what << " (need: "
                 << d.activated_need;
            if (d.fallback)
                text << ", fallback after backend failure";
            else if (!d.scored)
                text << ", first candidate taken unscored";
            else if (d.chosen_index < d.candidates.size() &&
                     d.candidates[d.chosen_index].intention) {
                char intent[32];
                std::snprintf(intent, sizeof(intent), ", intention %.2f",
                              *d.candidates[d.chosen_index].intention);
                text << intent;
            }
            text << ")\n";
            ++result.events;
        }
        text << "  " << clock_of(step.time) << "  ";
        if (step.poi_id.empty()) {
            char position[64];
            std::snprintf(position, sizeof(position), "(%.2f, %.2f)", step.location.x,
                          step.location.y);
            text << "traveling, now at " << position;
        } else if (step.poi_id != last_poi) {
            text << "at " << step.poi_id << " [" << step.poi_category << "]";
        } else {
            text << "still at " << step.poi_id;
        }
        if (step.action_id) text << ", doing " << *step.action_id;
        text << "\n";
        last_poi = step.poi_id;
        ++result.events;
    }
    while (next_choice < choices.size()) {
        const DecisionRecord& d = choices[next_choice++];
        text << "  " << clock_of(d.time) << "  decided: " << d.chosen_id << "\n";
        ++result.events;
    }

    result.text = text.str();
    return result;
}

} // namespace socialsim
