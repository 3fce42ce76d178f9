#include "socialsim/world.hpp"

#include "socialsim/util.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>

namespace socialsim {

namespace {

// Where the currently processed agent's backend transcripts accumulate. The
// sink closure writes through this so worker threads never share a buffer.
thread_local std::vector<nlohmann::json>* g_transcript_target = nullptr;

struct TranscriptScope {
    explicit TranscriptScope(std::vector<nlohmann::json>* target) {
        g_transcript_target = target;
    }
    ~TranscriptScope() { g_transcript_target = nullptr; }
};

nlohmann::json event_to_json(const EventRecord& event) {
    return {{"kind", event_kind_name(event.kind)},
            {"description", event.description},
            {"timestamp", event.timestamp},
            {"source", event.source}};
}

EventRecord event_from_json(const nlohmann::json& j) {
    EventRecord event;
    event.kind = j.at("kind").get<std::string>() == "active" ? EventRecord::Kind::active
                                                             : EventRecord::Kind::passive;
    event.description = j.at("description").get<std::string>();
    event.timestamp = j.at("timestamp").get<std::int64_t>();
    event.source = j.at("source").get<std::string>();
    return event;
}

nlohmann::json candidate_to_json(const BehaviorCandidate& c) {
    nlohmann::json j = {{"id", c.id},
                        {"description", c.description},
                        {"category", c.category},
                        {"modality", modality_name(c.modality)}};
    j["target_poi"] = c.target_poi ? nlohmann::json(*c.target_poi) : nlohmann::json();
    return j;
}

BehaviorCandidate candidate_from_json(const nlohmann::json& j) {
    BehaviorCandidate c;
    c.id = j.at("id").get<std::string>();
    c.description = j.at("description").get<std::string>();
    c.category = j.at("category").get<std::string>();
    c.modality = j.at("modality").get<std::string>() == "physical"
                     ? BehaviorCandidate::Modality::physical
                     : BehaviorCandidate::Modality::remote;
    if (!j.at("target_poi").is_null()) c.target_poi = j.at("target_poi").get<std::string>();
    return c;
}

nlohmann::json plan_to_json(const PlanState& p) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : p.sequence.steps) {
        steps.push_back({{"verb", s.verb},
                         {"target", s.target ? nlohmann::json(*s.target) : nlohmann::json()},
                         {"duration", s.duration}});
    }
    nlohmann::json j = {{"candidate", candidate_to_json(p.candidate)},
                        {"steps", steps},
                        {"satisfies", p.sequence.satisfies.deltas},
                        {"need", p.need},
                        {"step", p.step},
                        {"dwell_done", p.dwell_done}};
    if (p.transit) {
        j["transit"] = {{"to", p.transit->to_poi},
                        {"from_x", p.transit->from.x},
                        {"from_y", p.transit->from.y},
                        {"total", p.transit->total},
                        {"elapsed", p.transit->elapsed}};
    } else {
        j["transit"] = nullptr;
    }
    return j;
}

PlanState plan_from_json(const nlohmann::json& j) {
    PlanState p;
    p.candidate = candidate_from_json(j.at("candidate"));
    for (const auto& s : j.at("steps")) {
        ActionStep step;
        step.verb = s.at("verb").get<std::string>();
        if (!s.at("target").is_null()) step.target = s.at("target").get<std::string>();
        step.duration = s.at("duration").get<std::int64_t>();
        p.sequence.steps.push_back(std::move(step));
    }
    p.sequence.satisfies.deltas = j.at("satisfies").get<std::map<std::string, double>>();
    p.need = j.at("need").get<std::string>();
    p.step = j.at("step").get<std::size_t>();
    p.dwell_done = j.at("dwell_done").get<std::int64_t>();
    if (!j.at("transit").is_null()) {
        const auto& t = j.at("transit");
        TransitState transit;
        transit.to_poi = t.at("to").get<std::string>();
        transit.from = {t.at("from_x").get<double>(), t.at("from_y").get<double>()};
        transit.total = t.at("total").get<std::int64_t>();
        transit.elapsed = t.at("elapsed").get<std::int64_t>();
        p.transit = std::move(transit);
    }
    return p;
}

std::string format_level(double level) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", level);
    return buf;
}

bool mentions_restriction(const std::string& text) {
    return contains_word(text, "restriction") || contains_word(text, "restrictions");
}

} // namespace

std::vector<AgentSpec> expand_roster(const RunConfig& config,
                                     const std::vector<PoiConfig>& pois) {
    if (!config.generator) return config.roster;
    const GeneratorSpec& gen = *config.generator;
    const int count = gen.count;

    auto draw = [&](int i, const char* salt) {
        return u01(hash_combine({config.seed, fnv1a64("genagent"),
                                 static_cast<std::uint64_t>(i), fnv1a64(salt)}));
    };

    // Largest-remainder apportionment of income groups, then block assignment
    // in map (alphabetical) order so counts are exact and stable.
    std::vector<std::string> groups;
    if (gen.income_mix.empty()) {
        groups.assign(count, "other");
    } else {
        double total_share = 0.0;
        for (const auto& [group, share] : gen.income_mix) total_share += share;
        std::vector<std::pair<std::string, double>> quotas;
        int assigned = 0;
        for (const auto& [group, share] : gen.income_mix) {
            double quota = count * share / total_share;
            quotas.emplace_back(group, quota);
            assigned += static_cast<int>(std::floor(quota));
        }
        std::vector<int> counts(quotas.size());
        for (std::size_t i = 0; i < quotas.size(); ++i)
            counts[i] = static_cast<int>(std::floor(quotas[i].second));
        std::vector<std::size_t> order(quotas.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            double fa = quotas[a].second - std::floor(quotas[a].second);
            double fb = quotas[b].second - std::floor(quotas[b].second);
            return fa > fb;
        });
        for (std::size_t k = 0; assigned < count; ++k) {
            ++counts[order[k % order.size()]];
            ++assigned;
        }
        for (std::size_t i = 0; i < quotas.size(); ++i)
            for (int k = 0; k < counts[i]; ++k) groups.push_back(quotas[i].first);
    }

    std::vector<const PoiConfig*> homes, works;
    for (const auto& poi : pois) {
        if (poi.category == "home" || poi.category == "residential") homes.push_back(&poi);
        if (poi.category == "workplace" || poi.category == "office") works.push_back(&poi);
    }
    std::vector<const PoiConfig*> all;
    for (const auto& poi : pois) all.push_back(&poi);
    if (homes.empty()) homes = all;
    if (works.empty()) works = all;
    if (all.empty()) throw InputError("agent generator needs at least one POI");

    int width = 3;
    for (int c = count; c >= 1000; c /= 10) ++width;

    std::vector<AgentSpec> roster;
    roster.reserve(count);
    for (int i = 0; i < count; ++i) {
        AgentSpec spec;
        std::string num = std::to_string(i + 1);
        while (static_cast<int>(num.size()) < width) num.insert(num.begin(), '0');
        spec.id = "agent_" + num;
        spec.name = "Agent " + num;
        spec.age = 22 + static_cast<int>(std::floor(draw(i, "age") * 46.0));
        spec.health_status = draw(i, "health") < 0.1 ? "managing a chronic condition" : "good";
        spec.income_group = groups[i];
        spec.home_poi = homes[static_cast<std::size_t>(draw(i, "home") * homes.size()) %
                              homes.size()]->id;
        spec.work_poi = works[static_cast<std::size_t>(draw(i, "work") * works.size()) %
                              works.size()]->id;
        roster.push_back(std::move(spec));
    }
    for (int i = 0; i < count; ++i) {
        AgentSpec& spec = roster[i];
        int want = std::min(gen.ties_per_agent, count - 1);
        for (int attempt = 0; attempt < 20 * gen.ties_per_agent &&
                              static_cast<int>(spec.social_ties.size()) < want;
             ++attempt) {
            char salt[32];
            std::snprintf(salt, sizeof(salt), "tie_%d", attempt);
            int pick = static_cast<int>(draw(i, salt) * count) % count;
            const std::string& other = roster[pick].id;
            if (other == spec.id) continue;
            if (std::find(spec.social_ties.begin(), spec.social_ties.end(), other) !=
                spec.social_ties.end())
                continue;
            spec.social_ties.push_back(other);
        }
    }
    return roster;
}

World::World(RunConfig config, CognitionBackend& backend)
    : config_(std::move(config)), backend_(backend) {
    for (const auto& poi : config_.pois) {
        if (!pois_.emplace(poi.id, poi).second)
            throw InputError("duplicate POI id: " + poi.id);
    }
    for (const auto& spec : config_.roster) {
        AgentProfile profile;
        profile.id = spec.id;
        profile.name = spec.name;
        profile.age = spec.age;
        profile.health_status = spec.health_status;
        profile.income_group = spec.income_group;
        profile.home_poi = spec.home_poi;
        profile.work_poi = spec.work_poi;
        profile.weights = spec.weights ? *spec.weights : config_.tpb_weights;
        profile.social_ties = spec.social_ties;
        if (pois_.find(profile.home_poi) == pois_.end())
            throw InputError("agent " + spec.id + ": home POI not found: " + profile.home_poi);
        if (!profile.work_poi.empty() && pois_.find(profile.work_poi) == pois_.end())
            throw InputError("agent " + spec.id + ": work POI not found: " + profile.work_poi);
        if (!profiles_.emplace(profile.id, std::move(profile)).second)
            throw InputError("duplicate agent id: " + spec.id);
    }
    for (const auto& [id, profile] : profiles_) {
        agent_ids_.push_back(id);
        for (const auto& tie : profile.social_ties)
            if (profiles_.find(tie) == profiles_.end())
                throw InputError("agent " + id + ": unknown social tie: " + tie);
    }
    for (const auto& [need, spec] : config_.needs) thresholds_[need] = spec.threshold;
    epoch_day_ = parse_civil_date(config_.start_date);

    backend_.set_transcript_sink([](const nlohmann::json& entry) {
        if (g_transcript_target) g_transcript_target->push_back(entry);
    });
}

const AgentRuntime& World::agent(const std::string& id) const {
    auto it = agents_.find(id);
    if (it == agents_.end()) throw InputError("unknown agent id: " + id);
    return it->second;
}

const PoiConfig& World::poi_at(const std::string& id) const {
    auto it = pois_.find(id);
    if (it == pois_.end()) throw InputError("unknown POI id: " + id);
    return it->second;
}

double World::agent_distance(const AgentRuntime& a, const std::string& poi_id) const {
    auto it = pois_.find(poi_id);
    if (it == pois_.end()) return std::numeric_limits<double>::infinity();
    return distance_km(a.position, it->second.location, config_.coordinates);
}

void World::init_agents() {
    if (initialized_) throw InputError("world already initialized");
    initialized_ = true;

    for (const auto& id : agent_ids_) {
        const AgentProfile& profile = profiles_.at(id);
        AgentRuntime a;
        a.profile = profile;
        a.memory = MemoryStore(config_.memory.retrieval);
        a.at_poi = profile.home_poi;
        a.position = poi_at(profile.home_poi).location;

        for (const auto& [need, spec] : config_.needs) {
            a.needs.caps[need] = spec.cap;
            a.needs.tier_of[need] = spec.tier;
            if (spec.growth) a.needs.growth[need] = *spec.growth;
            a.needs.values[need] = spec.initial ? *spec.initial : 0.0;
        }

        bool want_basic = false, want_high = false;
        for (const auto& [need, spec] : config_.needs) {
            if (spec.initial) continue;
            if (need == "hunger" || need == "fatigue")
                want_basic = true;
            else if (!spec.growth)
                want_high = true;
        }

        std::vector<nlohmann::json> transcripts;
        {
            TranscriptScope scope(&transcripts);
            CognitionContext ctx = build_context(a, 0);
            if (want_basic) {
                BasicNeedsInit init;
                try {
                    init = backend_.init_basic_needs(ctx);
                } catch (const std::exception&) {
                    init = BasicNeedsInit{};
                }
                auto maybe = [&](const char* need, double value) {
                    auto spec = config_.needs.find(need);
                    if (spec != config_.needs.end() && !spec->second.initial)
                        a.needs.values[need] = value;
                };
                maybe("hunger", init.hunger);
                maybe("fatigue", init.fatigue);
            }
            if (want_high) {
                HighLevelNeedsInit init;
                bool ok = true;
                try {
                    init = backend_.init_high_level_needs(ctx);
                } catch (const std::exception&) {
                    ok = false;
                }
                for (const auto& [need, spec] : config_.needs) {
                    if (spec.initial || spec.growth) continue;
                    if (need == "hunger" || need == "fatigue") continue;
                    auto found = init.values.find(need);
                    a.needs.values[need] = ok && found != init.values.end()
                                               ? found->second
                                               : 0.5 * spec.cap;
                }
            }
        }
        for (auto& [need, value] : a.needs.values) {
            double cap = a.needs.caps.at(need);
            value = std::min(std::max(value, 0.0), cap);
        }
        if (sinks_.transcript)
            for (const auto& entry : transcripts) sinks_.transcript(entry);
        agents_.emplace(id, std::move(a));
    }
}

nlohmann::json World::checkpoint() const {
    nlohmann::json queue = nlohmann::json::array();
    for (const auto& q : queue_) {
        queue.push_back({{"agent", q.agent_id},
                         {"event", event_to_json(q.event)},
                         {"deliver_tick", q.deliver_tick}});
    }
    nlohmann::json agents;
    for (const auto& [id, a] : agents_) {
        nlohmann::json completions = nlohmann::json::array();
        for (const auto& ap : a.pending_completions)
            completions.push_back({{"event", event_to_json(ap.event)}, {"deltas", ap.deltas}});
        nlohmann::json actives = nlohmann::json::array();
        for (const auto& event : a.pending_active) actives.push_back(event_to_json(event));
        nlohmann::json entry = {{"values", a.needs.values},
                                {"memory", a.memory.to_json()},
                                {"at_poi", a.at_poi},
                                {"x", a.position.x},
                                {"y", a.position.y},
                                {"pending_satisfaction", a.pending_satisfaction.deltas},
                                {"pending_completions", completions},
                                {"pending_active", actives},
                                {"day_nodes", a.day_nodes}};
        entry["plan"] = a.plan ? plan_to_json(*a.plan) : nlohmann::json();
        agents[id] = std::move(entry);
    }
    return {{"clock", clock_},
            {"restriction", restriction_},
            {"queue", queue},
            {"agents", agents}};
}

void World::restore(const nlohmann::json& snapshot) {
    if (initialized_) throw InputError("world already initialized");
    initialized_ = true;

    clock_ = snapshot.at("clock").get<std::int64_t>();
    restriction_ = snapshot.at("restriction").get<double>();
    queue_.clear();
    for (const auto& q : snapshot.at("queue")) {
        QueuedEvent entry;
        entry.agent_id = q.at("agent").get<std::string>();
        entry.event = event_from_json(q.at("event"));
        entry.deliver_tick = q.at("deliver_tick").get<std::int64_t>();
        queue_.push_back(std::move(entry));
    }
    const nlohmann::json& agents = snapshot.at("agents");
    if (agents.size() != agent_ids_.size())
        throw InputError("checkpoint agent set does not match the configuration");
    for (const auto& id : agent_ids_) {
        if (!agents.contains(id))
            throw InputError("checkpoint is missing agent: " + id);
        const nlohmann::json& entry = agents.at(id);
        AgentRuntime a;
        a.profile = profiles_.at(id);
        for (const auto& [need, spec] : config_.needs) {
            a.needs.caps[need] = spec.cap;
            a.needs.tier_of[need] = spec.tier;
            if (spec.growth) a.needs.growth[need] = *spec.growth;
        }
        a.needs.values = entry.at("values").get<std::map<std::string, double>>();
        a.memory = MemoryStore::from_json(entry.at("memory"));
        a.at_poi = entry.at("at_poi").get<std::string>();
        a.position = {entry.at("x").get<double>(), entry.at("y").get<double>()};
        if (!entry.at("plan").is_null()) a.plan = plan_from_json(entry.at("plan"));
        a.pending_satisfaction.deltas =
            entry.at("pending_satisfaction").get<std::map<std::string, double>>();
        for (const auto& ap : entry.at("pending_completions")) {
            EventAppraisal appraisal;
            appraisal.event = event_from_json(ap.at("event"));
            appraisal.deltas = ap.at("deltas").get<std::map<std::string, double>>();
            a.pending_completions.push_back(std::move(appraisal));
        }
        for (const auto& event : entry.at("pending_active"))
            a.pending_active.push_back(event_from_json(event));
        a.day_nodes = entry.at("day_nodes").get<std::vector<std::uint64_t>>();
        agents_[id] = std::move(a);
    }
}

void World::begin_tick() {
    const int day = static_cast<int>(clock_ / kTicksPerDay);
    const int tick_of_day = static_cast<int>(clock_ % kTicksPerDay);

    if (tick_of_day == 0) {
        bool changed = false;
        for (const auto& stage : config_.restrictions) {
            if (stage.from_day != day) continue;
            if (stage.level == restriction_) break;
            double previous = restriction_;
            restriction_ = stage.level;
            changed = true;
            std::string text;
            if (restriction_ > previous) {
                text = "New mobility restrictions are in effect across the city (level " +
                       format_level(restriction_) + ").";
            } else if (restriction_ > 0.0) {
                text = "Mobility restrictions have been eased (level " +
                       format_level(restriction_) + ").";
            } else {
                text = "Mobility restrictions have been lifted.";
            }
            EventRecord event{EventRecord::Kind::passive, text, clock_, "environment"};
            for (const auto& id : agent_ids_) queue_.push_back({id, event, clock_});
            break;
        }
        if (!changed && restriction_ > 0.0) {
            EventRecord event{EventRecord::Kind::passive,
                              "Mobility restrictions remain in effect today.", clock_,
                              "environment"};
            for (const auto& id : agent_ids_) queue_.push_back({id, event, clock_});
        }
    }

    for (const auto& spec : config_.scenario_events) {
        if (spec.tick_of_day != tick_of_day) continue;
        if (day < spec.from_day) continue;
        if (spec.to_day && day > *spec.to_day) continue;
        if ((day - spec.from_day) % spec.every_days != 0) continue;
        EventRecord event{EventRecord::Kind::passive, spec.description, clock_, spec.source};
        if (spec.agents.empty()) {
            for (const auto& id : agent_ids_) queue_.push_back({id, event, clock_});
        } else {
            for (const auto& id : spec.agents) queue_.push_back({id, event, clock_});
        }
    }
}

CognitionContext World::build_context(const AgentRuntime& a, std::int64_t t) const {
    CognitionContext ctx;
    ctx.seed = config_.seed;
    ctx.agent_id = a.profile.id;
    ctx.tick = t;
    ctx.current_time = iso_timestamp(epoch_day_, t);
    ctx.weather = config_.weather;
    ctx.profile = {a.profile.id,           a.profile.name,     a.profile.age,
                   a.profile.health_status, a.profile.income_group, a.profile.home_poi,
                   a.profile.work_poi};
    ctx.needs = a.needs.values;
    for (const auto& [need, rate] : a.needs.growth) {
        (void)rate;
        ctx.drive_needs.insert(need);
    }
    ctx.location_poi = a.at_poi;
    ctx.location = a.position;
    ctx.coords = config_.coordinates;
    ctx.pois.reserve(pois_.size());
    for (const auto& [id, poi] : pois_) {
        PoiSnapshot snap;
        snap.id = id;
        snap.category = poi.category;
        snap.location = poi.location;
        snap.distance_km = distance_km(a.position, poi.location, config_.coordinates);
        ctx.pois.push_back(std::move(snap));
    }
    std::sort(ctx.pois.begin(), ctx.pois.end(), [](const PoiSnapshot& x, const PoiSnapshot& y) {
        if (x.distance_km != y.distance_km) return x.distance_km < y.distance_km;
        return x.id < y.id;
    });
    for (const auto& tie : a.profile.social_ties)
        ctx.friend_homes.emplace_back(tie, profiles_.at(tie).home_poi);
    ctx.restriction_level = restriction_;
    ctx.memory = config_.ablation.disable_learning ? nullptr : &a.memory;
    ctx.far_distance_km = config_.planning.far_distance_km;
    return ctx;
}

std::vector<std::string> World::retrieve_contents(const AgentRuntime& a,
                                                  const std::string& question,
                                                  std::int64_t t) const {
    if (config_.ablation.disable_learning) return {};
    MemoryQuery query;
    query.question = question;
    query.limit = static_cast<std::size_t>(config_.memory.retrieve_limit);
    RetrievalResult result = a.memory.retrieve(query, t);
    std::vector<std::string> out;
    out.reserve(result.nodes.size());
    for (const MemoryNode* node : result.nodes) out.push_back(node->content);
    return out;
}

void World::plan_agent(AgentRuntime& a, const std::string& need, std::int64_t t,
                       Outcome& out) const {
    CognitionContext ctx = build_context(a, t);
    ctx.activated_need = need;
    ctx.memory_results = retrieve_contents(a, need, t);

    CandidateResult generated = backend_.generate_candidates(ctx);
    std::vector<BehaviorCandidate> candidates = std::move(generated.candidates);
    if (static_cast<int>(candidates.size()) > config_.planning.max_candidates)
        candidates.resize(static_cast<std::size_t>(config_.planning.max_candidates));
    if (candidates.empty()) candidates.push_back(rest_candidate());

    DecisionRecord dec;
    dec.agent_id = a.profile.id;
    dec.tick = t;
    dec.time = iso_timestamp(epoch_day_, t);
    dec.activated_need = need;
    dec.needs = a.needs.values;
    dec.weights = a.profile.weights;

    Intention intention;
    if (config_.ablation.disable_planning) {
        intention.candidate = candidates[0];
        intention.score = 0.0;
        dec.scored = false;
        dec.chosen_index = 0;
        for (const auto& c : candidates) dec.candidates.push_back({c, std::nullopt, std::nullopt});
    } else {
        std::vector<std::pair<BehaviorCandidate, TpbScores>> scored;
        scored.reserve(candidates.size());
        for (const auto& c : candidates) {
            CognitionContext cctx = ctx;
            cctx.memory_results = retrieve_contents(a, c.description, t);
            TpbScores s = clamp_scores(backend_.score_candidate(cctx, c).scores);
            if (c.modality == BehaviorCandidate::Modality::physical)
                s.control = clamp01(s.control * (1.0 - restriction_));
            scored.emplace_back(c, s);
        }
        bool tie = false;
        intention = select_action(scored, a.profile.weights, &tie);
        dec.tie_broken = tie;
        double best = intention.score;
        dec.chosen_index = 0;
        for (std::size_t i = 0; i < scored.size(); ++i) {
            if (intention_score(scored[i].second, a.profile.weights) == best) {
                dec.chosen_index = i;
                break;
            }
        }
        for (std::size_t i = 0; i < scored.size(); ++i) {
            dec.candidates.push_back({scored[i].first, scored[i].second,
                                      intention_score(scored[i].second, a.profile.weights)});
        }
    }
    dec.chosen_id = intention.candidate.id;

    CognitionContext gctx = ctx;
    gctx.memory_results = retrieve_contents(a, intention.candidate.description, t);
    ActionSequence sequence = backend_.ground_action(gctx, intention).sequence;
    if (sequence.steps.empty()) sequence = rest_sequence();
    for (const auto& step : sequence.steps)
        if (step.target && pois_.find(*step.target) == pois_.end())
            throw RuntimeFailure("grounded step targets unknown POI: " + *step.target);

    // The run-level satisfaction table is authoritative; the backend only
    // proposes. Missing categories keep whatever the backend suggested.
    auto effect = config_.satisfaction.find(intention.candidate.category);
    if (effect != config_.satisfaction.end()) {
        sequence.satisfies.deltas.clear();
        sequence.satisfies.deltas[effect->second.need] = effect->second.amount;
    }

    dec.steps = sequence.steps;
    dec.satisfies = sequence.satisfies.deltas;

    PlanState plan;
    plan.candidate = intention.candidate;
    plan.sequence = std::move(sequence);
    plan.need = need;
    a.plan = std::move(plan);
    out.decision = std::move(dec);
}

void World::complete_sequence(AgentRuntime& a, std::int64_t t, Outcome& out,
                              std::vector<LearnedEvent>& learned) const {
    const PlanState& p = *a.plan;
    const BehaviorCandidate& c = p.candidate;
    EventRecord done{EventRecord::Kind::active, "Completed: " + c.description, t, a.profile.id};

    double max_amount = 0.0;
    for (const auto& [need, amount] : p.sequence.satisfies.deltas) {
        if (!a.needs.has(need)) continue;
        max_amount = std::max(max_amount, std::fabs(amount));
        if (a.needs.drive_governed(need)) {
            a.pending_satisfaction.deltas[need] += amount;
        } else {
            EventAppraisal appraisal;
            appraisal.event = done;
            appraisal.deltas[need] = -amount;
            a.pending_completions.push_back(std::move(appraisal));
        }
    }
    a.pending_active.push_back(done);

    LearnedEvent item;
    item.event = done;
    item.completion = true;
    item.candidate = c;
    item.assoc_delta = max_amount;
    learned.push_back(std::move(item));

    if (c.id == "social:visit_friend" && c.target_poi) {
        for (const auto& tie : a.profile.social_ties) {
            if (profiles_.at(tie).home_poi != *c.target_poi) continue;
            EventRecord visit{EventRecord::Kind::passive,
                              a.profile.name + " visited you today.", t + 1, a.profile.id};
            out.outbound.push_back({tie, visit, t + 1});
        }
    } else if (c.id == "social:call_online") {
        const std::string* best = nullptr;
        double best_dist = std::numeric_limits<double>::infinity();
        for (const auto& tie : a.profile.social_ties) {
            double d = agent_distance(a, profiles_.at(tie).home_poi);
            if (d < best_dist || (d == best_dist && best && tie < *best)) {
                best = &tie;
                best_dist = d;
            }
        }
        if (best) {
            EventRecord call{EventRecord::Kind::passive,
                             a.profile.name + " called you for a chat.", t + 1, a.profile.id};
            out.outbound.push_back({*best, call, t + 1});
        }
    }
    a.plan.reset();
}

void World::execute_tick(AgentRuntime& a, std::int64_t t, Outcome& out,
                         std::vector<LearnedEvent>& learned) const {
    if (!a.plan) return;
    bool tick_consumed = false;
    while (!tick_consumed && a.plan) {
        PlanState& p = *a.plan;
        if (p.step >= p.sequence.steps.size()) {
            complete_sequence(a, t, out, learned);
            return;
        }
        const ActionStep& step = p.sequence.steps[p.step];
        if (step.target && *step.target != a.at_poi) {
            const PoiConfig& dest = poi_at(*step.target);
            if (!p.transit) {
                double d = distance_km(a.position, dest.location, config_.coordinates);
                std::int64_t total = travel_ticks(d, config_.travel_speed_kmh);
                if (total == 0) {
                    // Co-located POI: arrival is free, the dwell starts now.
                    a.at_poi = *step.target;
                    a.position = dest.location;
                    continue;
                }
                p.transit = TransitState{*step.target, a.position, total, 0};
            }
            TransitState& transit = *p.transit;
            ++transit.elapsed;
            if (transit.elapsed >= transit.total) {
                // Transit ticks count toward the step's duration, so a pure
                // movement step finishes on the arrival tick and a longer one
                // dwells only for the remainder.
                a.at_poi = transit.to_poi;
                a.position = dest.location;
                p.dwell_done = transit.total;
                p.transit.reset();
                if (p.dwell_done >= step.duration) {
                    ++p.step;
                    p.dwell_done = 0;
                    if (p.step >= p.sequence.steps.size())
                        complete_sequence(a, t, out, learned);
                }
            } else {
                a.at_poi.clear();
                a.position = lerp(transit.from, dest.location,
                                  static_cast<double>(transit.elapsed) /
                                      static_cast<double>(transit.total));
            }
            tick_consumed = true;
        } else {
            p.transit.reset();
            ++p.dwell_done;
            tick_consumed = true;
            if (p.dwell_done >= step.duration) {
                ++p.step;
                p.dwell_done = 0;
                if (p.step >= p.sequence.steps.size()) complete_sequence(a, t, out, learned);
            }
        }
    }
}

void World::learn_tick(AgentRuntime& a, std::int64_t t, std::vector<LearnedEvent>& learned,
                       const std::optional<std::string>& need_context) const {
    if (!learned.empty()) {
        CognitionContext ctx = build_context(a, t);
        ctx.activated_need = need_context;
        for (const auto& item : learned) {
            if (item.event.kind == EventRecord::Kind::active)
                ctx.active_events.push_back(item.event);
            else
                ctx.passive_events.push_back(item.event);
        }

        ExperiencesResult structured;
        try {
            structured = backend_.structure_experiences(ctx);
        } catch (const std::exception&) {
            structured.entries.clear();
        }
        for (std::size_t i = 0; i < learned.size(); ++i) {
            const LearnedEvent& item = learned[i];
            StructuredExperience entry =
                i < structured.entries.size()
                    ? structured.entries[i]
                    : StructuredExperience{item.event.description, "neutral", ""};
            ThoughtsResult thoughts;
            try {
                thoughts = backend_.generate_thoughts(ctx, item.event);
            } catch (const std::exception&) {
            }
            double importance = 0.5 + (item.assoc_delta >= 0.2 ? 0.3 : 0.0);
            std::set<std::string> tags;
            if (item.completion) tags.insert(item.candidate.category);
            if (mentions_restriction(item.event.description)) tags.insert("restriction");
            std::uint64_t node = a.memory.append_stream(item.event, thoughts.thoughts,
                                                        entry.emotion, entry.outcome,
                                                        importance, tags);
            a.day_nodes.push_back(node);
            if (item.completion)
                a.memory.record_action_outcome(item.candidate.category, item.candidate,
                                               entry.outcome, true, t, importance);
        }

        try {
            EmotionResult emotion = backend_.update_emotion(ctx);
            std::string current = a.memory.current_state("emotion").value_or("neutral");
            if (emotion.updated_emotion != current)
                a.memory.update_state("emotion", emotion.updated_emotion, emotion.reasoning, t);
        } catch (const std::exception&) {
        }
    }

    if (t % kTicksPerDay == kTicksPerDay - 1) {
        if (a.day_nodes.size() >= 2) {
            CognitionContext ctx = build_context(a, t);
            ctx.activated_need = need_context;
            try {
                QueriesResult queries = backend_.formulate_queries(ctx);
                for (const auto& query : queries.queries) {
                    MemoryQuery q = query;
                    if (q.limit == 0)
                        q.limit = static_cast<std::size_t>(config_.memory.retrieve_limit);
                    RetrievalResult recalled = a.memory.retrieve(q, t);
                    for (const MemoryNode* node : recalled.nodes)
                        ctx.memory_results.push_back(node->content);
                }
            } catch (const std::exception&) {
            }
            auto summarize = [&](const std::vector<const MemoryNode*>& nodes) {
                StrategiesResult strategies = backend_.abstract_strategies(ctx, nodes);
                std::string joined;
                for (const auto& s : strategies.strategies) {
                    if (!joined.empty()) joined += " ";
                    joined += s;
                }
                return joined;
            };
            try {
                a.memory.abstract(a.day_nodes, summarize, t, 0.6);
            } catch (const std::exception&) {
            }
        }
        a.day_nodes.clear();
    }
}

World::Outcome World::process_agent(const AgentRuntime& prev) const {
    Outcome out;
    out.next = prev;
    AgentRuntime& a = out.next;
    const std::int64_t t = clock_;
    TranscriptScope scope(&out.transcripts);

    // 1. Event delivery.
    std::vector<EventRecord> passives;
    for (const auto& q : queue_)
        if (q.agent_id == a.profile.id && q.deliver_tick <= t) passives.push_back(q.event);
    std::vector<EventRecord> actives = std::move(a.pending_active);
    a.pending_active.clear();

    // 2. Motivation: drive accumulation, last tick's satisfaction, appraisals.
    const bool wo_motivation = config_.ablation.disable_motivation;
    std::vector<EventAppraisal> applied_passive;
    if (!wo_motivation) {
        SatisfactionDelta satisfied = std::move(a.pending_satisfaction);
        a.pending_satisfaction = SatisfactionDelta{};
        a.needs = step_physiological(a.needs, satisfied);

        std::vector<EventAppraisal> applied_active = std::move(a.pending_completions);
        a.pending_completions.clear();

        if (!actives.empty() || !passives.empty()) {
            CognitionContext ctx = build_context(a, t);
            ctx.active_events = actives;
            ctx.passive_events = passives;
            AppraisalResult result;
            try {
                result = backend_.appraise_events(ctx);
            } catch (const std::exception&) {
                result.appraisals.clear();
            }
            // Completed actions are already accounted for through their
            // satisfaction deltas; only environment-driven (passive) effects
            // pass through, restricted to known appraisal-governed needs.
            for (auto& appraisal : result.appraisals) {
                if (appraisal.event.kind != EventRecord::Kind::passive) continue;
                std::map<std::string, double> kept;
                for (const auto& [need, delta] : appraisal.deltas)
                    if (a.needs.has(need) && !a.needs.drive_governed(need)) kept[need] = delta;
                if (kept.empty()) continue;
                appraisal.deltas = std::move(kept);
                applied_passive.push_back(std::move(appraisal));
            }
        }
        a.needs = apply_event_appraisals(a.needs, applied_active, applied_passive);
    } else {
        a.pending_satisfaction = SatisfactionDelta{};
        a.pending_completions.clear();
    }

    // 3. Activation.
    std::optional<std::string> act;
    if (wo_motivation) {
        if (!a.plan && !a.needs.values.empty()) {
            double draw = u01(hash_combine({config_.seed, fnv1a64(a.profile.id),
                                            static_cast<std::uint64_t>(t),
                                            fnv1a64("wom_need")}));
            std::size_t index = std::min(
                static_cast<std::size_t>(draw * static_cast<double>(a.needs.values.size())),
                a.needs.values.size() - 1);
            auto it = a.needs.values.begin();
            std::advance(it, static_cast<std::ptrdiff_t>(index));
            act = it->first;
        }
    } else {
        act = activated_need(a.needs, thresholds_);
    }

    // 4. Planning.
    if (!a.plan && act) {
        try {
            plan_agent(a, *act, t, out);
        } catch (const std::exception&) {
            // Backend failure: rest in place so the tick still completes.
            PlanState plan;
            plan.candidate = rest_candidate();
            plan.sequence = rest_sequence();
            plan.need = *act;
            a.plan = std::move(plan);
            DecisionRecord dec;
            dec.agent_id = a.profile.id;
            dec.tick = t;
            dec.time = iso_timestamp(epoch_day_, t);
            dec.activated_need = *act;
            dec.needs = a.needs.values;
            dec.weights = a.profile.weights;
            dec.candidates.push_back({a.plan->candidate, std::nullopt, std::nullopt});
            dec.chosen_id = a.plan->candidate.id;
            dec.chosen_index = 0;
            dec.scored = false;
            dec.fallback = true;
            dec.steps = a.plan->sequence.steps;
            dec.satisfies = a.plan->sequence.satisfies.deltas;
            out.decision = std::move(dec);
        }
    }

    // 5. Execution: one tick of the current plan.
    std::optional<std::string> exec_need;
    std::optional<std::string> exec_action;
    if (a.plan) {
        exec_need = a.plan->need;
        exec_action = a.plan->candidate.id;
    }
    std::vector<LearnedEvent> learned;
    execute_tick(a, t, out, learned);

    // Delivered passives join the learned list after completions, matching
    // the backend's actives-then-passives experience order.
    for (const auto& event : passives) {
        LearnedEvent item;
        item.event = event;
        for (const auto& appraisal : applied_passive) {
            if (appraisal.event.description != event.description ||
                appraisal.event.timestamp != event.timestamp)
                continue;
            for (const auto& [need, delta] : appraisal.deltas)
                item.assoc_delta = std::max(item.assoc_delta, std::fabs(delta));
        }
        learned.push_back(std::move(item));
    }

    // 6. Learning.
    if (!config_.ablation.disable_learning)
        learn_tick(a, t, learned, exec_need ? exec_need : act);

    TrajectoryRecord traj;
    traj.agent_id = a.profile.id;
    traj.tick = t;
    traj.time = iso_timestamp(epoch_day_, t);
    traj.poi_id = a.at_poi;
    traj.poi_category = a.at_poi.empty() ? "in_transit" : pois_.at(a.at_poi).category;
    traj.location = a.position;
    traj.activated_need = exec_need ? exec_need : act;
    traj.action_id = exec_action;
    if (config_.log_needs) traj.needs = a.needs.values;
    out.trajectory = std::move(traj);
    return out;
}

void World::step() {
    if (!initialized_) throw InputError("world not initialized");
    begin_tick();

    std::vector<Outcome> outcomes(agent_ids_.size());
    std::vector<std::exception_ptr> errors(agent_ids_.size());

    const bool concurrent =
        config_.execution == ExecutionMode::concurrent && backend_.thread_safe();
    if (concurrent && agent_ids_.size() > 1) {
        unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(),
                                              static_cast<unsigned>(agent_ids_.size()));
        if (workers < 2) workers = 2;
        std::atomic<std::size_t> cursor{0};
        auto work = [&]() {
            for (;;) {
                std::size_t i = cursor.fetch_add(1);
                if (i >= agent_ids_.size()) return;
                try {
                    outcomes[i] = process_agent(agents_.at(agent_ids_[i]));
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& thread : pool) thread.join();
    } else {
        for (std::size_t i = 0; i < agent_ids_.size(); ++i) {
            try {
                outcomes[i] = process_agent(agents_.at(agent_ids_[i]));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    }
    for (const auto& error : errors)
        if (error) std::rethrow_exception(error);

    commit(outcomes);
}

void World::commit(std::vector<Outcome>& outcomes) {
    for (std::size_t i = 0; i < agent_ids_.size(); ++i) {
        Outcome& out = outcomes[i];
        agents_[agent_ids_[i]] = std::move(out.next);
        if (sinks_.trajectory) sinks_.trajectory(out.trajectory);
        if (out.decision && sinks_.decision) sinks_.decision(*out.decision);
        if (sinks_.transcript)
            for (const auto& entry : out.transcripts) sinks_.transcript(entry);
    }
    std::size_t kept = 0;
    for (std::size_t i = 0; i < queue_.size(); ++i) {
        if (queue_[i].deliver_tick <= clock_) continue;
        if (kept != i) queue_[kept] = std::move(queue_[i]);
        ++kept;
    }
    queue_.resize(kept);
    for (auto& out : outcomes)
        for (auto& event : out.outbound) queue_.push_back(std::move(event));
    ++clock_;
}

} // namespace socialsim
