#include "socialsim/config.hpp"

#include "socialsim/oracle.hpp"
#include "socialsim/util.hpp"

#include <cmath>
#include <filesystem>
#include <set>

namespace socialsim {

namespace {

using nlohmann::json;

// Tracks which keys a strict object parse consumed; done() rejects the rest.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw InputError(path_ + ": expected an object");
    }

    const json* find(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& require(const char* key) {
        const json* p = find(key);
        if (!p) throw InputError(path_ + ": missing key '" + key + "'");
        return *p;
    }

    void done() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                throw InputError(path_ + ": unknown key '" + item.key() + "'");
    }

    const std::string& path() const { return path_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw InputError(path + ": expected a string");
    return j.get<std::string>();
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw InputError(path + ": expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) throw InputError(path + ": expected a finite number");
    return v;
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw InputError(path + ": expected an integer");
    return j.get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        throw InputError(path + ": expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw InputError(path + ": expected a boolean");
    return j.get<bool>();
}

double get_unit(const json& j, const std::string& path) {
    double v = get_number(j, path);
    if (v < 0.0 || v > 1.0) throw InputError(path + ": expected a value in [0, 1]");
    return v;
}

const json& array_at(const json& j, const std::string& path) {
    if (!j.is_array()) throw InputError(path + ": expected an array");
    return j;
}

TpbWeights parse_weights(const json& j, const std::string& path) {
    Fields f(j, path);
    TpbWeights w;
    w.attitude = get_number(f.require("attitude"), path + ".attitude");
    w.norm = get_number(f.require("norm"), path + ".norm");
    w.control = get_number(f.require("control"), path + ".control");
    f.done();
    if (w.attitude < 0 || w.norm < 0 || w.control < 0)
        throw InputError(path + ": weights must be nonnegative");
    if (w.attitude + w.norm + w.control <= 0)
        throw InputError(path + ": weights must not all be zero");
    return w;
}

json weights_to_json(const TpbWeights& w) {
    return {{"attitude", w.attitude}, {"norm", w.norm}, {"control", w.control}};
}

PoiConfig parse_poi(const json& j, const std::string& path) {
    Fields f(j, path);
    PoiConfig poi;
    poi.id = get_string(f.require("id"), path + ".id");
    poi.category = get_string(f.require("category"), path + ".category");
    poi.location.x = get_number(f.require("x"), path + ".x");
    poi.location.y = get_number(f.require("y"), path + ".y");
    f.done();
    if (poi.id.empty()) throw InputError(path + ".id: must not be empty");
    if (poi.category.empty()) throw InputError(path + ".category: must not be empty");
    return poi;
}

AgentSpec parse_agent(const json& j, const std::string& path) {
    Fields f(j, path);
    AgentSpec a;
    a.id = get_string(f.require("id"), path + ".id");
    a.name = get_string(f.require("name"), path + ".name");
    a.age = get_int(f.require("age"), path + ".age");
    a.health_status = get_string(f.require("health_status"), path + ".health_status");
    a.income_group = get_string(f.require("income_group"), path + ".income_group");
    a.home_poi = get_string(f.require("home_poi"), path + ".home_poi");
    a.work_poi = get_string(f.require("work_poi"), path + ".work_poi");
    if (const json* w = f.find("tpb_weights")) a.weights = parse_weights(*w, path + ".tpb_weights");
    if (const json* ties = f.find("social_ties")) {
        for (std::size_t i = 0; i < array_at(*ties, path + ".social_ties").size(); ++i)
            a.social_ties.push_back(
                get_string((*ties)[i], path + ".social_ties[" + std::to_string(i) + "]"));
    }
    f.done();
    if (a.id.empty()) throw InputError(path + ".id: must not be empty");
    if (a.age < 0 || a.age > 130) throw InputError(path + ".age: implausible value");
    if (a.income_group != "high" && a.income_group != "low" && a.income_group != "other")
        throw InputError(path + ".income_group: expected high, low, or other");
    if (a.home_poi.empty()) throw InputError(path + ".home_poi: must not be empty");
    return a;
}

NeedSpec parse_need(const json& j, const std::string& path) {
    Fields f(j, path);
    NeedSpec n;
    n.tier = tier_from_name(get_string(f.require("tier"), path + ".tier"));
    if (const json* cap = f.find("cap")) {
        n.cap = get_number(*cap, path + ".cap");
        if (n.cap <= 0) throw InputError(path + ".cap: must be positive");
    }
    if (const json* g = f.find("growth")) {
        n.growth = get_number(*g, path + ".growth");
        if (*n.growth < 0) throw InputError(path + ".growth: must be nonnegative");
    }
    if (const json* t = f.find("threshold"))
        n.threshold = get_number(*t, path + ".threshold");
    if (n.threshold < 0 || n.threshold > n.cap)
        throw InputError(path + ".threshold: must lie in [0, cap]");
    if (const json* init = f.find("initial")) {
        n.initial = get_number(*init, path + ".initial");
        if (*n.initial < 0 || *n.initial > n.cap)
            throw InputError(path + ".initial: must lie in [0, cap]");
    }
    f.done();
    return n;
}

GeneratorSpec parse_generator(const json& j, const std::string& path) {
    Fields f(j, path);
    GeneratorSpec g;
    g.count = get_int(f.require("count"), path + ".count");
    if (g.count <= 0) throw InputError(path + ".count: must be positive");
    const json& mix = f.require("income_mix");
    if (!mix.is_object()) throw InputError(path + ".income_mix: expected an object");
    double total = 0.0;
    for (const auto& item : mix.items()) {
        if (item.key() != "high" && item.key() != "low" && item.key() != "other")
            throw InputError(path + ".income_mix: unknown group '" + item.key() + "'");
        double share = get_number(item.value(), path + ".income_mix." + item.key());
        if (share < 0) throw InputError(path + ".income_mix." + item.key() + ": negative share");
        g.income_mix[item.key()] = share;
        total += share;
    }
    if (total <= 0) throw InputError(path + ".income_mix: shares must sum to a positive value");
    if (const json* ties = f.find("ties_per_agent")) {
        g.ties_per_agent = get_int(*ties, path + ".ties_per_agent");
        if (g.ties_per_agent < 0)
            throw InputError(path + ".ties_per_agent: must be nonnegative");
    }
    f.done();
    return g;
}

OracleOverrides parse_oracle_overrides(const json& j, const std::string& path) {
    Fields f(j, path);
    OracleOverrides o;
    if (const json* v = f.find("restriction_base_delta")) {
        o.restriction_base_delta = get_number(*v, path + ".restriction_base_delta");
        if (*o.restriction_base_delta < 0)
            throw InputError(path + ".restriction_base_delta: must be nonnegative");
    }
    if (const json* v = f.find("caution_min")) {
        o.caution_min = get_number(*v, path + ".caution_min");
        if (*o.caution_min <= 0) throw InputError(path + ".caution_min: must be positive");
    }
    if (const json* v = f.find("caution_max")) {
        o.caution_max = get_number(*v, path + ".caution_max");
        if (*o.caution_max <= 0) throw InputError(path + ".caution_max: must be positive");
    }
    if (const json* v = f.find("attitude_jitter")) {
        o.attitude_jitter = get_number(*v, path + ".attitude_jitter");
        if (*o.attitude_jitter < 0)
            throw InputError(path + ".attitude_jitter: must be nonnegative");
    }
    if (const json* v = f.find("habituation")) {
        if (!v->is_object()) throw InputError(path + ".habituation: expected an object");
        std::map<std::string, double> h;
        for (const auto& item : v->items()) {
            if (item.key() != "high" && item.key() != "low" && item.key() != "other")
                throw InputError(path + ".habituation: unknown group '" + item.key() + "'");
            double rate = get_number(item.value(), path + ".habituation." + item.key());
            if (rate < 0)
                throw InputError(path + ".habituation." + item.key() + ": negative rate");
            h[item.key()] = rate;
        }
        o.habituation = std::move(h);
    }
    f.done();
    return o;
}

BackendSpec parse_backend(const json& j, const std::string& path) {
    Fields f(j, path);
    BackendSpec b;
    b.kind = get_string(f.require("kind"), path + ".kind");
    if (b.kind != "oracle" && b.kind != "remote")
        throw InputError(path + ".kind: expected oracle or remote");
    if (const json* dir = f.find("prompts_dir"))
        b.prompts_dir = get_string(*dir, path + ".prompts_dir");
    if (const json* o = f.find("oracle"))
        b.oracle = parse_oracle_overrides(*o, path + ".oracle");
    f.done();
    return b;
}

ScenarioEventSpec parse_scenario_event(const json& j, const std::string& path) {
    Fields f(j, path);
    ScenarioEventSpec e;
    e.description = get_string(f.require("description"), path + ".description");
    if (e.description.empty()) throw InputError(path + ".description: must not be empty");
    if (const json* s = f.find("source")) e.source = get_string(*s, path + ".source");
    if (const json* t = f.find("tick_of_day")) {
        e.tick_of_day = get_int(*t, path + ".tick_of_day");
        if (e.tick_of_day < 0 || e.tick_of_day >= kTicksPerDay)
            throw InputError(path + ".tick_of_day: must lie in [0, 47]");
    }
    if (const json* d = f.find("from_day")) {
        e.from_day = get_int(*d, path + ".from_day");
        if (e.from_day < 0) throw InputError(path + ".from_day: must be nonnegative");
    }
    if (const json* d = f.find("to_day")) {
        e.to_day = get_int(*d, path + ".to_day");
        if (*e.to_day < e.from_day)
            throw InputError(path + ".to_day: must not precede from_day");
    }
    if (const json* n = f.find("every_days")) {
        e.every_days = get_int(*n, path + ".every_days");
        if (e.every_days < 1) throw InputError(path + ".every_days: must be at least 1");
    }
    if (const json* a = f.find("agents")) {
        for (std::size_t i = 0; i < array_at(*a, path + ".agents").size(); ++i)
            e.agents.push_back(get_string((*a)[i], path + ".agents[" + std::to_string(i) + "]"));
    }
    f.done();
    return e;
}

std::map<std::string, SatisfactionSpec> default_satisfaction() {
    std::map<std::string, SatisfactionSpec> table;
    for (const auto& [category, effect] : OracleParams{}.satisfaction)
        table[category] = {effect.first, effect.second};
    return table;
}

} // namespace

const char* execution_mode_name(ExecutionMode mode) {
    return mode == ExecutionMode::concurrent ? "concurrent" : "sequential";
}

ExecutionMode execution_mode_from_name(const std::string& name) {
    if (name == "sequential") return ExecutionMode::sequential;
    if (name == "concurrent") return ExecutionMode::concurrent;
    throw InputError("unknown execution mode: " + name);
}

const char* coordinate_system_name(CoordinateSystem cs) {
    return cs == CoordinateSystem::geographic ? "geographic" : "planar_km";
}

CoordinateSystem coordinate_system_from_name(const std::string& name) {
    if (name == "planar_km") return CoordinateSystem::planar_km;
    if (name == "geographic") return CoordinateSystem::geographic;
    throw InputError("unknown coordinate system: " + name);
}

std::int64_t RunConfig::total_ticks() const {
    return days > 0 ? static_cast<std::int64_t>(days) * kTicksPerDay : ticks;
}

RunConfig parse_run_config(const nlohmann::json& doc) {
    Fields f(doc, "config");
    RunConfig c;

    std::string schema = get_string(f.require("schema"), "config.schema");
    if (schema != kSchemaTag)
        throw InputError("config.schema: unsupported schema '" + schema + "', expected '" +
                         kSchemaTag + "'");

    c.seed = get_u64(f.require("seed"), "config.seed");

    const json* days = f.find("days");
    const json* ticks = f.find("ticks");
    if ((days != nullptr) == (ticks != nullptr))
        throw InputError("config: exactly one of 'days' or 'ticks' is required");
    if (days) {
        c.days = get_int(*days, "config.days");
        if (c.days < 0) throw InputError("config.days: must be nonnegative");
        c.ticks = static_cast<std::int64_t>(c.days) * kTicksPerDay;
    } else {
        c.ticks = get_int(*ticks, "config.ticks");
        if (c.ticks < 0) throw InputError("config.ticks: must be nonnegative");
    }

    if (const json* v = f.find("start_date")) {
        c.start_date = get_string(*v, "config.start_date");
        parse_civil_date(c.start_date);
    }
    if (const json* v = f.find("coordinates")) {
        try {
            c.coordinates = coordinate_system_from_name(get_string(*v, "config.coordinates"));
        } catch (const InputError&) {
            throw InputError("config.coordinates: expected planar_km or geographic");
        }
    }
    if (const json* v = f.find("execution")) {
        try {
            c.execution = execution_mode_from_name(get_string(*v, "config.execution"));
        } catch (const InputError&) {
            throw InputError("config.execution: expected sequential or concurrent");
        }
    }
    if (const json* v = f.find("weather")) c.weather = get_string(*v, "config.weather");
    if (const json* v = f.find("output_dir")) {
        c.output_dir = get_string(*v, "config.output_dir");
        if (c.output_dir.empty()) throw InputError("config.output_dir: must not be empty");
    }

    {
        Fields world(f.require("world"), "config.world");
        const json* pois = world.find("pois");
        const json* dataset = world.find("dataset");
        if ((pois != nullptr) == (dataset != nullptr))
            throw InputError("config.world: exactly one of 'pois' or 'dataset' is required");
        if (pois) {
            const json& arr = array_at(*pois, "config.world.pois");
            std::set<std::string> ids;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                PoiConfig poi = parse_poi(arr[i], "config.world.pois[" + std::to_string(i) + "]");
                if (!ids.insert(poi.id).second)
                    throw InputError("config.world.pois: duplicate POI id '" + poi.id + "'");
                c.pois.push_back(std::move(poi));
            }
            if (c.pois.empty()) throw InputError("config.world.pois: must not be empty");
        } else {
            c.poi_dataset = get_string(*dataset, "config.world.dataset");
            if (c.poi_dataset.empty())
                throw InputError("config.world.dataset: must not be empty");
        }
        world.done();
    }

    {
        Fields agents(f.require("agents"), "config.agents");
        const json* roster = agents.find("roster");
        const json* generator = agents.find("generator");
        if ((roster != nullptr) == (generator != nullptr))
            throw InputError("config.agents: exactly one of 'roster' or 'generator' is required");
        if (roster) {
            const json& arr = array_at(*roster, "config.agents.roster");
            std::set<std::string> ids;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                AgentSpec a =
                    parse_agent(arr[i], "config.agents.roster[" + std::to_string(i) + "]");
                if (!ids.insert(a.id).second)
                    throw InputError("config.agents.roster: duplicate agent id '" + a.id + "'");
                c.roster.push_back(std::move(a));
            }
            if (c.roster.empty()) throw InputError("config.agents.roster: must not be empty");
        } else {
            c.generator = parse_generator(*generator, "config.agents.generator");
        }
        agents.done();
    }

    {
        const json& needs = f.require("needs");
        if (!needs.is_object()) throw InputError("config.needs: expected an object");
        for (const auto& item : needs.items()) {
            if (item.key().empty()) throw InputError("config.needs: empty need id");
            c.needs[item.key()] = parse_need(item.value(), "config.needs." + item.key());
        }
        if (c.needs.empty()) throw InputError("config.needs: must not be empty");
    }

    if (const json* w = f.find("tpb_weights"))
        c.tpb_weights = parse_weights(*w, "config.tpb_weights");
    if (const json* b = f.find("backend")) c.backend = parse_backend(*b, "config.backend");
    if (c.backend.oracle.caution_min && c.backend.oracle.caution_max &&
        *c.backend.oracle.caution_min > *c.backend.oracle.caution_max)
        throw InputError("config.backend.oracle: caution_min must not exceed caution_max");

    if (const json* a = f.find("ablation")) {
        Fields ablation(*a, "config.ablation");
        if (const json* v = ablation.find("disable_motivation"))
            c.ablation.disable_motivation = get_bool(*v, "config.ablation.disable_motivation");
        if (const json* v = ablation.find("disable_planning"))
            c.ablation.disable_planning = get_bool(*v, "config.ablation.disable_planning");
        if (const json* v = ablation.find("disable_learning"))
            c.ablation.disable_learning = get_bool(*v, "config.ablation.disable_learning");
        ablation.done();
    }

    if (const json* r = f.find("restrictions")) {
        const json& arr = array_at(*r, "config.restrictions");
        int last_day = -1;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string path = "config.restrictions[" + std::to_string(i) + "]";
            Fields stage(arr[i], path);
            RestrictionStage s;
            s.from_day = get_int(stage.require("from_day"), path + ".from_day");
            s.level = get_unit(stage.require("level"), path + ".level");
            stage.done();
            if (s.from_day <= last_day)
                throw InputError("config.restrictions: from_day values must be strictly "
                                 "increasing and nonnegative");
            last_day = s.from_day;
            c.restrictions.push_back(s);
        }
    }

    if (const json* s = f.find("scenario_events")) {
        const json& arr = array_at(*s, "config.scenario_events");
        for (std::size_t i = 0; i < arr.size(); ++i)
            c.scenario_events.push_back(
                parse_scenario_event(arr[i], "config.scenario_events[" + std::to_string(i) + "]"));
    }

    if (const json* s = f.find("satisfaction")) {
        if (!s->is_object()) throw InputError("config.satisfaction: expected an object");
        for (const auto& item : s->items()) {
            std::string path = "config.satisfaction." + item.key();
            Fields entry(item.value(), path);
            SatisfactionSpec spec;
            spec.need = get_string(entry.require("need"), path + ".need");
            spec.amount = get_unit(entry.require("amount"), path + ".amount");
            entry.done();
            if (item.key().empty()) throw InputError("config.satisfaction: empty category");
            if (spec.need.empty()) throw InputError(path + ".need: must not be empty");
            c.satisfaction[item.key()] = std::move(spec);
        }
    } else {
        c.satisfaction = default_satisfaction();
    }

    if (const json* p = f.find("planning")) {
        Fields planning(*p, "config.planning");
        if (const json* v = planning.find("max_candidates")) {
            c.planning.max_candidates = get_int(*v, "config.planning.max_candidates");
            if (c.planning.max_candidates < 1)
                throw InputError("config.planning.max_candidates: must be at least 1");
        }
        if (const json* v = planning.find("far_distance_km")) {
            c.planning.far_distance_km = get_number(*v, "config.planning.far_distance_km");
            if (c.planning.far_distance_km < 0)
                throw InputError("config.planning.far_distance_km: must be nonnegative");
        }
        planning.done();
    }

    if (const json* m = f.find("memory")) {
        Fields memory(*m, "config.memory");
        auto weight = [&](const char* key, double& slot) {
            if (const json* v = memory.find(key)) {
                slot = get_number(*v, std::string("config.memory.") + key);
                if (slot < 0)
                    throw InputError(std::string("config.memory.") + key +
                                     ": must be nonnegative");
            }
        };
        weight("alpha", c.memory.retrieval.alpha);
        weight("beta", c.memory.retrieval.beta);
        weight("gamma", c.memory.retrieval.gamma);
        weight("lambda", c.memory.retrieval.lambda);
        if (const json* v = memory.find("retrieve_limit")) {
            c.memory.retrieve_limit = get_int(*v, "config.memory.retrieve_limit");
            if (c.memory.retrieve_limit < 1)
                throw InputError("config.memory.retrieve_limit: must be at least 1");
        }
        memory.done();
    }

    if (const json* t = f.find("travel")) {
        Fields travel(*t, "config.travel");
        if (const json* v = travel.find("speed_kmh")) {
            c.travel_speed_kmh = get_number(*v, "config.travel.speed_kmh");
            if (c.travel_speed_kmh <= 0)
                throw InputError("config.travel.speed_kmh: must be positive");
        }
        travel.done();
    }

    if (const json* ck = f.find("checkpoint")) {
        Fields checkpoint(*ck, "config.checkpoint");
        if (const json* v = checkpoint.find("every_days")) {
            c.checkpoint_every_days = get_int(*v, "config.checkpoint.every_days");
            if (c.checkpoint_every_days < 1)
                throw InputError("config.checkpoint.every_days: must be at least 1");
        }
        checkpoint.done();
    }

    if (const json* v = f.find("log_needs")) c.log_needs = get_bool(*v, "config.log_needs");

    f.done();

    // Cross-field checks that need the whole document.
    if (!c.pois.empty()) {
        std::set<std::string> poi_ids;
        for (const auto& poi : c.pois) poi_ids.insert(poi.id);
        for (const auto& a : c.roster) {
            if (!poi_ids.count(a.home_poi))
                throw InputError("config.agents: agent '" + a.id + "' home_poi '" + a.home_poi +
                                 "' is not a configured POI");
            if (!a.work_poi.empty() && !poi_ids.count(a.work_poi))
                throw InputError("config.agents: agent '" + a.id + "' work_poi '" + a.work_poi +
                                 "' is not a configured POI");
        }
    }
    {
        std::set<std::string> agent_ids;
        for (const auto& a : c.roster) agent_ids.insert(a.id);
        for (const auto& a : c.roster)
            for (const auto& tie : a.social_ties) {
                if (tie == a.id)
                    throw InputError("config.agents: agent '" + a.id + "' lists itself as a tie");
                if (!agent_ids.empty() && !agent_ids.count(tie))
                    throw InputError("config.agents: agent '" + a.id + "' has unknown tie '" +
                                     tie + "'");
            }
        for (const auto& e : c.scenario_events)
            for (const auto& target : e.agents)
                if (!c.roster.empty() && !agent_ids.count(target))
                    throw InputError("config.scenario_events: unknown agent '" + target + "'");
    }

    return c;
}

nlohmann::json run_config_to_json(const RunConfig& c) {
    json doc;
    doc["schema"] = kSchemaTag;
    doc["seed"] = c.seed;
    if (c.days > 0)
        doc["days"] = c.days;
    else
        doc["ticks"] = c.ticks;
    doc["start_date"] = c.start_date;
    doc["coordinates"] = coordinate_system_name(c.coordinates);
    doc["execution"] = execution_mode_name(c.execution);
    doc["weather"] = c.weather;
    doc["output_dir"] = c.output_dir;

    if (!c.poi_dataset.empty()) {
        doc["world"] = {{"dataset", c.poi_dataset}};
    } else {
        json pois = json::array();
        for (const auto& poi : c.pois)
            pois.push_back({{"id", poi.id},
                            {"category", poi.category},
                            {"x", poi.location.x},
                            {"y", poi.location.y}});
        doc["world"] = {{"pois", std::move(pois)}};
    }

    if (c.generator) {
        doc["agents"] = {{"generator",
                          {{"count", c.generator->count},
                           {"income_mix", c.generator->income_mix},
                           {"ties_per_agent", c.generator->ties_per_agent}}}};
    } else {
        json roster = json::array();
        for (const auto& a : c.roster) {
            json entry = {{"id", a.id},           {"name", a.name},
                          {"age", a.age},         {"health_status", a.health_status},
                          {"income_group", a.income_group},
                          {"home_poi", a.home_poi},
                          {"work_poi", a.work_poi}};
            if (a.weights) entry["tpb_weights"] = weights_to_json(*a.weights);
            if (!a.social_ties.empty()) entry["social_ties"] = a.social_ties;
            roster.push_back(std::move(entry));
        }
        doc["agents"] = {{"roster", std::move(roster)}};
    }

    json needs;
    for (const auto& [id, n] : c.needs) {
        json entry = {{"tier", tier_name(n.tier)}, {"cap", n.cap}, {"threshold", n.threshold}};
        if (n.growth) entry["growth"] = *n.growth;
        if (n.initial) entry["initial"] = *n.initial;
        needs[id] = std::move(entry);
    }
    doc["needs"] = std::move(needs);

    doc["tpb_weights"] = weights_to_json(c.tpb_weights);

    json backend = {{"kind", c.backend.kind}, {"prompts_dir", c.backend.prompts_dir}};
    {
        json o = json::object();
        const OracleOverrides& ov = c.backend.oracle;
        if (ov.restriction_base_delta) o["restriction_base_delta"] = *ov.restriction_base_delta;
        if (ov.caution_min) o["caution_min"] = *ov.caution_min;
        if (ov.caution_max) o["caution_max"] = *ov.caution_max;
        if (ov.attitude_jitter) o["attitude_jitter"] = *ov.attitude_jitter;
        if (ov.habituation) o["habituation"] = *ov.habituation;
        if (!o.empty()) backend["oracle"] = std::move(o);
    }
    doc["backend"] = std::move(backend);

    doc["ablation"] = {{"disable_motivation", c.ablation.disable_motivation},
                       {"disable_planning", c.ablation.disable_planning},
                       {"disable_learning", c.ablation.disable_learning}};

    json restrictions = json::array();
    for (const auto& s : c.restrictions)
        restrictions.push_back({{"from_day", s.from_day}, {"level", s.level}});
    doc["restrictions"] = std::move(restrictions);

    json events = json::array();
    for (const auto& e : c.scenario_events) {
        json entry = {{"description", e.description},
                      {"source", e.source},
                      {"tick_of_day", e.tick_of_day},
                      {"from_day", e.from_day},
                      {"every_days", e.every_days}};
        if (e.to_day) entry["to_day"] = *e.to_day;
        if (!e.agents.empty()) entry["agents"] = e.agents;
        events.push_back(std::move(entry));
    }
    doc["scenario_events"] = std::move(events);

    json satisfaction;
    for (const auto& [category, s] : c.satisfaction)
        satisfaction[category] = {{"need", s.need}, {"amount", s.amount}};
    doc["satisfaction"] = std::move(satisfaction);

    doc["planning"] = {{"max_candidates", c.planning.max_candidates},
                       {"far_distance_km", c.planning.far_distance_km}};
    doc["memory"] = {{"alpha", c.memory.retrieval.alpha},
                     {"beta", c.memory.retrieval.beta},
                     {"gamma", c.memory.retrieval.gamma},
                     {"lambda", c.memory.retrieval.lambda},
                     {"retrieve_limit", c.memory.retrieve_limit}};
    doc["travel"] = {{"speed_kmh", c.travel_speed_kmh}};
    doc["checkpoint"] = {{"every_days", c.checkpoint_every_days}};
    doc["log_needs"] = c.log_needs;
    return doc;
}

void resolve_config_paths(RunConfig& config, const std::string& base_dir) {
    namespace fs = std::filesystem;
    auto rebase = [&](const std::string& path) {
        fs::path p(path);
        if (p.is_absolute()) return p;
        return fs::path(base_dir) / p;
    };
    if (!config.poi_dataset.empty()) {
        fs::path p = rebase(config.poi_dataset);
        if (!fs::exists(p))
            throw InputError("config.world.dataset: no such file: " + p.string());
        config.poi_dataset = p.string();
    }
    if (config.backend.kind == "remote") {
        fs::path p = rebase(config.backend.prompts_dir);
        if (!fs::is_directory(p))
            throw InputError("config.backend.prompts_dir: no such directory: " + p.string());
        config.backend.prompts_dir = p.string();
    }
}

RunConfig load_run_config(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("config: " + path + " is not valid JSON: " + e.what());
    }
    RunConfig config = parse_run_config(doc);
    resolve_config_paths(config, std::filesystem::path(path).parent_path().string());
    return config;
}

} // namespace socialsim
