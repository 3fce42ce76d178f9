#include "socialsim/records.hpp"

#include "socialsim/config.hpp"
#include "socialsim/util.hpp"

#include <filesystem>
#include <sstream>

namespace socialsim {

using nlohmann::json;

json TrajectoryRecord::to_json() const {
    json j;
    j["agent_id"] = agent_id;
    j["tick"] = tick;
    j["time"] = time;
    j["poi_id"] = poi_id;
    j["poi_category"] = poi_category;
    j["x"] = location.x;
    j["y"] = location.y;
    j["activated_need"] = activated_need ? json(*activated_need) : json();
    j["action_id"] = action_id ? json(*action_id) : json();
    if (!needs.empty()) j["needs"] = needs;
    return j;
}

TrajectoryRecord TrajectoryRecord::from_json(const json& j) {
    TrajectoryRecord r;
    r.agent_id = j.at("agent_id").get<std::string>();
    r.tick = j.at("tick").get<std::int64_t>();
    r.time = j.value("time", std::string());
    r.poi_id = j.at("poi_id").get<std::string>();
    r.poi_category = j.at("poi_category").get<std::string>();
    r.location.x = j.at("x").get<double>();
    r.location.y = j.at("y").get<double>();
    if (j.contains("activated_need") && !j.at("activated_need").is_null())
        r.activated_need = j.at("activated_need").get<std::string>();
    if (j.contains("action_id") && !j.at("action_id").is_null())
        r.action_id = j.at("action_id").get<std::string>();
    if (j.contains("needs") && !j.at("needs").is_null())
        r.needs = j.at("needs").get<std::map<std::string, double>>();
    return r;
}

json DecisionRecord::to_json() const {
    json cands = json::array();
    for (const auto& sc : candidates) {
        json entry;
        entry["id"] = sc.candidate.id;
        entry["description"] = sc.candidate.description;
        entry["category"] = sc.candidate.category;
        entry["modality"] = modality_name(sc.candidate.modality);
        entry["target_poi"] = sc.candidate.target_poi ? json(*sc.candidate.target_poi) : json();
        if (sc.scores) {
            entry["attitude"] = sc.scores->attitude;
            entry["norm"] = sc.scores->norm;
            entry["control"] = sc.scores->control;
            entry["rationale"] = sc.scores->rationale;
        }
        if (sc.intention) entry["intention"] = *sc.intention;
        cands.push_back(std::move(entry));
    }
    json steps_json = json::array();
    for (const auto& s : steps) {
        steps_json.push_back({{"verb", s.verb},
                              {"target", s.target ? json(*s.target) : json()},
                              {"duration", s.duration}});
    }
    json j;
    j["agent_id"] = agent_id;
    j["tick"] = tick;
    j["time"] = time;
    j["activated_need"] = activated_need;
    j["needs"] = needs;
    j["candidates"] = std::move(cands);
    j["weights"] = {{"attitude", weights.attitude},
                    {"norm", weights.norm},
                    {"control", weights.control}};
    j["chosen_id"] = chosen_id;
    j["chosen_index"] = chosen_index;
    j["scored"] = scored;
    j["tie_broken"] = tie_broken;
    j["fallback"] = fallback;
    j["steps"] = std::move(steps_json);
    j["satisfies"] = satisfies;
    return j;
}

DecisionRecord DecisionRecord::from_json(const json& j) {
    DecisionRecord r;
    r.agent_id = j.at("agent_id").get<std::string>();
    r.tick = j.at("tick").get<std::int64_t>();
    r.time = j.value("time", std::string());
    r.activated_need = j.at("activated_need").get<std::string>();
    if (j.contains("needs")) r.needs = j.at("needs").get<std::map<std::string, double>>();
    for (const auto& entry : j.at("candidates")) {
        ScoredCandidateRecord sc;
        sc.candidate.id = entry.at("id").get<std::string>();
        sc.candidate.description = entry.at("description").get<std::string>();
        sc.candidate.category = entry.at("category").get<std::string>();
        sc.candidate.modality = entry.at("modality").get<std::string>() == "physical"
                                    ? BehaviorCandidate::Modality::physical
                                    : BehaviorCandidate::Modality::remote;
        if (entry.contains("target_poi") && !entry.at("target_poi").is_null())
            sc.candidate.target_poi = entry.at("target_poi").get<std::string>();
        if (entry.contains("attitude")) {
            TpbScores scores;
            scores.attitude = entry.at("attitude").get<double>();
            scores.norm = entry.at("norm").get<double>();
            scores.control = entry.at("control").get<double>();
            scores.rationale = entry.value("rationale", std::string());
            sc.scores = std::move(scores);
        }
        if (entry.contains("intention")) sc.intention = entry.at("intention").get<double>();
        r.candidates.push_back(std::move(sc));
    }
    const json& w = j.at("weights");
    r.weights.attitude = w.at("attitude").get<double>();
    r.weights.norm = w.at("norm").get<double>();
    r.weights.control = w.at("control").get<double>();
    r.chosen_id = j.at("chosen_id").get<std::string>();
    r.chosen_index = j.at("chosen_index").get<std::size_t>();
    r.scored = j.at("scored").get<bool>();
    r.tie_broken = j.at("tie_broken").get<bool>();
    r.fallback = j.value("fallback", false);
    for (const auto& entry : j.at("steps")) {
        ActionStep s;
        s.verb = entry.at("verb").get<std::string>();
        if (entry.contains("target") && !entry.at("target").is_null())
            s.target = entry.at("target").get<std::string>();
        s.duration = entry.at("duration").get<std::int64_t>();
        r.steps.push_back(std::move(s));
    }
    if (j.contains("satisfies"))
        r.satisfies = j.at("satisfies").get<std::map<std::string, double>>();
    return r;
}

json jsonl_header(const std::string& kind) {
    return {{"kind", kind}, {"schema", kSchemaTag}};
}

JsonlWriter::JsonlWriter(const std::string& path, const std::string& kind, bool append) {
    open(path, kind, append);
}

void JsonlWriter::open(const std::string& path, const std::string& kind, bool append) {
    path_ = path;
    out_.open(path, append ? std::ios::app : std::ios::trunc);
    if (!out_) throw RuntimeFailure("cannot open log file for writing: " + path);
    if (!append) write(jsonl_header(kind));
}

void JsonlWriter::write(const json& record) {
    out_ << record.dump() << '\n';
    if (!out_) throw RuntimeFailure("write failed: " + path_);
}

void JsonlWriter::flush() {
    out_.flush();
    if (!out_) throw RuntimeFailure("flush failed: " + path_);
}

std::uint64_t JsonlWriter::bytes() const {
    return static_cast<std::uint64_t>(std::filesystem::file_size(path_));
}

std::vector<json> read_jsonl(const std::string& path, const std::string& expected_kind) {
    std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    std::vector<json> records;
    bool saw_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw InputError(path + ":" + std::to_string(line_no) + ": bad record: " + e.what());
        }
        if (!saw_header) {
            if (!j.is_object() || !j.contains("schema") || !j.contains("kind"))
                throw InputError(path + ": missing header record with schema and kind");
            std::string schema = j.at("schema").get<std::string>();
            if (schema != kSchemaTag)
                throw InputError(path + ": unsupported schema '" + schema + "'");
            std::string kind = j.at("kind").get<std::string>();
            if (kind != expected_kind)
                throw InputError(path + ": expected kind '" + expected_kind + "', found '" +
                                 kind + "'");
            saw_header = true;
            continue;
        }
        records.push_back(std::move(j));
    }
    if (!saw_header) throw InputError(path + ": empty log, missing header record");
    return records;
}

void truncate_file(const std::string& path, std::uint64_t byte_count) {
    std::error_code ec;
    std::filesystem::resize_file(path, byte_count, ec);
    if (ec) throw RuntimeFailure("cannot truncate " + path + ": " + ec.message());
}

} // namespace socialsim
