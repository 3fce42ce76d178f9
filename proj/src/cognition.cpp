#include "socialsim/cognition.hpp"

#include "socialsim/util.hpp"

#include <cctype>

namespace socialsim {

std::vector<std::string> template_placeholders(const std::string& body) {
    std::vector<std::string> names;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '{') continue;
        std::size_t j = i + 1;
        if (j >= body.size()) break;
        char first = body[j];
        if (!std::isalpha(static_cast<unsigned char>(first)) && first != '_') continue;
        std::size_t k = j + 1;
        while (k < body.size() &&
               (std::isalnum(static_cast<unsigned char>(body[k])) || body[k] == '_'))
            ++k;
        if (k < body.size() && body[k] == '}') {
            std::string name = body.substr(j, k - j);
            if (seen.insert(name).second) names.push_back(name);
            i = k;
        }
    }
    return names;
}

std::string render_prompt(const PromptTemplate& tpl,
                          const std::map<std::string, std::string>& context) {
    std::string out;
    out.reserve(tpl.body.size());
    const std::string& body = tpl.body;
    for (std::size_t i = 0; i < body.size();) {
        if (body[i] == '{' && i + 1 < body.size()) {
            char first = body[i + 1];
            if (std::isalpha(static_cast<unsigned char>(first)) || first == '_') {
                std::size_t k = i + 2;
                while (k < body.size() &&
                       (std::isalnum(static_cast<unsigned char>(body[k])) || body[k] == '_'))
                    ++k;
                if (k < body.size() && body[k] == '}') {
                    std::string name = body.substr(i + 1, k - i - 1);
                    auto it = context.find(name);
                    if (it == context.end())
                        throw InputError("render_prompt: missing variable '" + name +
                                         "' in template '" + tpl.name + "'");
                    out += it->second;
                    i = k + 1;
                    continue;
                }
            }
        }
        out += body[i];
        ++i;
    }
    return out;
}

const std::vector<std::string>& template_names() {
    static const std::vector<std::string> names = {
        "motivation_init_basic_needs",
        "motivation_init_high_level_needs",
        "motivation_update_needs",
        "planning_generate_candidates",
        "planning_score_candidates",
        "planning_action_sequence",
        "learning_thoughts",
        "learning_update_emotion",
        "learning_structure_experiences",
        "learning_retrieval_queries",
        "learning_abstract_strategies",
    };
    return names;
}

PromptLibrary load_prompt_library(const std::string& dir) {
    PromptLibrary lib;
    for (const auto& name : template_names()) {
        std::string path = dir + "/" + name + ".txt";
        PromptTemplate tpl;
        tpl.name = name;
        tpl.body = read_text_file(path);
        lib[name] = std::move(tpl);
    }
    return lib;
}

namespace {

void expect_unit(const nlohmann::json& doc, const std::string& key,
                 std::vector<std::string>& out) {
    if (!doc.contains(key)) {
        out.push_back("missing field: " + key);
        return;
    }
    if (!doc[key].is_number()) {
        out.push_back("field not numeric: " + key);
        return;
    }
    double v = doc[key].get<double>();
    if (v < 0.0 || v > 1.0) out.push_back("field out of [0,1]: " + key);
}

void expect_string(const nlohmann::json& doc, const std::string& key,
                   std::vector<std::string>& out) {
    if (!doc.contains(key) || !doc[key].is_string() || doc[key].get<std::string>().empty())
        out.push_back("missing or empty string field: " + key);
}

} // namespace

std::vector<std::string> validate_response(const std::string& template_name,
                                           const nlohmann::json& doc) {
    std::vector<std::string> v;
    if (template_name == "motivation_init_basic_needs") {
        if (!doc.is_object()) return {"expected object"};
        expect_unit(doc, "hunger", v);
        expect_unit(doc, "fatigue", v);
    } else if (template_name == "motivation_init_high_level_needs") {
        if (!doc.is_object()) return {"expected object"};
        expect_string(doc, "reasoning", v);
        bool any_need = false;
        for (const auto& [key, value] : doc.items()) {
            if (key == "reasoning") continue;
            any_need = true;
            expect_unit(doc, key, v);
            (void)value;
        }
        if (!any_need) v.push_back("no need value present");
    } else if (template_name == "motivation_update_needs") {
        if (!doc.is_object()) return {"expected object"};
        expect_string(doc, "reasoning", v);
        if (!doc.contains("updated_needs") || !doc["updated_needs"].is_object()) {
            v.push_back("missing object field: updated_needs");
        } else {
            for (const auto& [key, value] : doc["updated_needs"].items()) {
                if (!value.is_number() || value.get<double>() < 0.0 || value.get<double>() > 1.0)
                    v.push_back("updated_needs." + key + " out of [0,1] or not numeric");
            }
        }
    } else if (template_name == "planning_generate_candidates" ||
               template_name == "planning_action_sequence" ||
               template_name == "learning_retrieval_queries") {
        if (!doc.is_array() || doc.empty()) return {"expected non-empty array"};
        for (const auto& item : doc)
            if (!item.is_string() || item.get<std::string>().empty())
                v.push_back("array items must be non-empty strings");
    } else if (template_name == "planning_score_candidates") {
        if (!doc.is_array() || doc.empty()) return {"expected non-empty array"};
        for (const auto& item : doc) {
            if (!item.is_object()) {
                v.push_back("array items must be objects");
                continue;
            }
            expect_string(item, "action", v);
            expect_unit(item, "attitude", v);
            expect_unit(item, "subjective_norm", v);
            expect_unit(item, "perceived_control", v);
        }
    } else if (template_name == "learning_thoughts") {
        if (!doc.is_object()) return {"expected object"};
        expect_string(doc, "thoughts", v);
        expect_string(doc, "attitude", v);
        expect_string(doc, "reflection", v);
    } else if (template_name == "learning_update_emotion") {
        if (!doc.is_object()) return {"expected object"};
        expect_string(doc, "updated_emotion", v);
        expect_string(doc, "reasoning", v);
    } else if (template_name == "learning_structure_experiences") {
        if (!doc.is_array() || doc.empty()) return {"expected non-empty array"};
        for (const auto& item : doc) {
            if (!item.is_object()) {
                v.push_back("array items must be objects");
                continue;
            }
            expect_string(item, "event", v);
            expect_string(item, "emotion", v);
            expect_string(item, "outcome", v);
        }
    } else if (template_name == "learning_abstract_strategies") {
        if (!doc.is_object() || doc.empty()) return {"expected non-empty object"};
        for (const auto& [key, value] : doc.items()) {
            if (key.rfind("strategy", 0) != 0)
                v.push_back("unexpected key: " + key);
            else if (!value.is_string() || value.get<std::string>().empty())
                v.push_back(key + " must be a non-empty string");
        }
    } else {
        v.push_back("unknown template: " + template_name);
    }
    return v;
}

void CognitionBackend::log_exchange(const CognitionContext& ctx, const std::string& op,
                                    const nlohmann::json& request, const nlohmann::json& response,
                                    bool conforming) const {
    if (!sink_) return;
    nlohmann::json line;
    line["agent"] = ctx.agent_id;
    line["tick"] = ctx.tick;
    line["op"] = op;
    line["backend"] = kind();
    line["request"] = request;
    line["response"] = response;
    line["conforming"] = conforming;
    sink_(line);
}

TpbScores clamp_scores(TpbScores scores, bool* flagged) {
    bool hit = scores.attitude < 0.0 || scores.attitude > 1.0 || scores.norm < 0.0 ||
               scores.norm > 1.0 || scores.control < 0.0 || scores.control > 1.0;
    scores.attitude = clamp01(scores.attitude);
    scores.norm = clamp01(scores.norm);
    scores.control = clamp01(scores.control);
    if (flagged) *flagged = hit;
    return scores;
}

} // namespace socialsim
