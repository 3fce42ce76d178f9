#include "socialsim/memory.hpp"

#include "socialsim/util.hpp"

#include <algorithm>
#include <cmath>

namespace socialsim {

const char* store_kind_name(MemoryStoreKind kind) {
    switch (kind) {
    case MemoryStoreKind::stream: return "stream";
    case MemoryStoreKind::action_space: return "action_space";
    case MemoryStoreKind::state: return "state";
    }
    return "stream";
}

MemoryStoreKind store_kind_from_name(const std::string& name) {
    if (name == "stream") return MemoryStoreKind::stream;
    if (name == "action_space") return MemoryStoreKind::action_space;
    if (name == "state") return MemoryStoreKind::state;
    throw InputError("unknown memory store kind: " + name);
}

std::uint64_t MemoryStore::push_node(MemoryNode node) {
    node.id = nodes_.size() + 1;
    for (const auto& tag : node.tags) tag_index_[tag].push_back(node.id);
    nodes_.push_back(std::move(node));
    cache_tokens(nodes_.back());
    return nodes_.back().id;
}

void MemoryStore::cache_tokens(const MemoryNode& node) {
    auto tokens = tokenize(node.content);
    for (const auto& tag : node.tags) {
        auto tag_tokens = tokenize(tag);
        tokens.insert(tag_tokens.begin(), tag_tokens.end());
    }
    std::vector<std::uint32_t> ids;
    ids.reserve(tokens.size());
    for (const auto& token : tokens) {
        auto [it, fresh] = token_ids_.emplace(token, static_cast<std::uint32_t>(token_ids_.size()));
        (void)fresh;
        ids.push_back(it->second);
    }
    std::sort(ids.begin(), ids.end());
    node_tokens_.push_back(std::move(ids));
}

void MemoryStore::link_pair(std::uint64_t a, std::uint64_t b) {
    nodes_[a - 1].links.insert(b);
    nodes_[b - 1].links.insert(a);
}

std::uint64_t MemoryStore::append_stream(const EventRecord& event, const std::string& thoughts,
                                         const std::string& emotion, const std::string& outcome,
                                         double importance, const std::set<std::string>& extra_tags) {
    MemoryNode node;
    node.store = MemoryStoreKind::stream;
    node.timestamp = event.timestamp;
    node.content = event.description;
    if (!thoughts.empty()) node.content += " Thoughts: " + thoughts;
    if (!emotion.empty()) node.content += " Emotion: " + emotion;
    if (!outcome.empty()) node.content += " Outcome: " + outcome;
    node.tags.insert("stream");
    node.tags.insert(event.kind == EventRecord::Kind::active ? "active" : "passive");
    for (const auto& tag : extra_tags) node.tags.insert(tag);
    node.importance = clamp01(importance);
    std::uint64_t id = push_node(std::move(node));
    last_stream_id_ = id;
    return id;
}

std::uint64_t MemoryStore::record_action_outcome(const std::string& domain,
                                                 const BehaviorCandidate& action,
                                                 const std::string& outcome, bool success,
                                                 std::int64_t timestamp, double importance) {
    MemoryNode node;
    node.store = MemoryStoreKind::action_space;
    node.timestamp = timestamp;
    node.content = action.description;
    if (!outcome.empty()) node.content += " Outcome: " + outcome;
    node.tags.insert("action_space");
    node.tags.insert(domain);
    node.tags.insert(action.id);
    node.tags.insert(success ? "success" : "failure");
    node.importance = clamp01(importance);
    std::uint64_t id = push_node(std::move(node));
    if (last_stream_id_ != 0) link_pair(id, last_stream_id_);
    return id;
}

std::uint64_t MemoryStore::update_state(const std::string& key, const std::string& value,
                                        const std::string& reason, std::int64_t timestamp,
                                        double importance) {
    if (key.empty()) throw InputError("update_state: empty key");
    MemoryNode node;
    node.store = MemoryStoreKind::state;
    node.timestamp = timestamp;
    node.content = key + ": " + value;
    if (!reason.empty()) node.content += " Reason: " + reason;
    node.tags.insert("state");
    node.tags.insert(key);
    node.importance = clamp01(importance);
    std::uint64_t id = push_node(std::move(node));
    auto prev = state_heads_.find(key);
    if (prev != state_heads_.end()) link_pair(id, prev->second.second);
    state_heads_[key] = {value, id};
    return id;
}

void MemoryStore::associate(std::uint64_t a, std::uint64_t b) {
    if (!has_node(a) || !has_node(b)) throw InputError("associate: unknown node id");
    if (a == b) throw InputError("associate: self-link rejected");
    link_pair(a, b);
}

std::uint64_t MemoryStore::abstract(const std::vector<std::uint64_t>& inputs,
                                    const Summarizer& summarize, std::int64_t timestamp,
                                    double importance) {
    if (inputs.size() < 2) throw InputError("abstract: needs at least 2 input nodes");
    std::vector<const MemoryNode*> in;
    int max_level = 0;
    for (std::uint64_t id : inputs) {
        if (!has_node(id)) throw InputError("abstract: unknown node id");
        in.push_back(&nodes_[id - 1]);
        max_level = std::max(max_level, nodes_[id - 1].abstraction_level);
    }
    std::string content = summarize(in); // may throw; nothing written yet

    MemoryNode node;
    node.store = MemoryStoreKind::stream;
    node.timestamp = timestamp;
    node.content = std::move(content);
    node.tags.insert("abstraction");
    node.importance = clamp01(importance);
    node.abstraction_level = max_level + 1;
    std::uint64_t id = push_node(std::move(node));
    for (std::uint64_t input : inputs) link_pair(id, input);
    return id;
}

const MemoryNode& MemoryStore::node(std::uint64_t id) const {
    if (!has_node(id)) throw InputError("unknown memory node id");
    return nodes_[id - 1];
}

std::optional<std::string> MemoryStore::current_state(const std::string& key) const {
    auto it = state_heads_.find(key);
    if (it == state_heads_.end()) return std::nullopt;
    return it->second.first;
}

std::size_t MemoryStore::count_with_tags(const std::vector<std::string>& tags) const {
    if (tags.empty()) return nodes_.size();
    // Intersect posting lists, smallest first.
    std::vector<const std::vector<std::uint64_t>*> lists;
    for (const auto& tag : tags) {
        auto it = tag_index_.find(tag);
        if (it == tag_index_.end()) return 0;
        lists.push_back(&it->second);
    }
    std::sort(lists.begin(), lists.end(),
              [](const auto* a, const auto* b) { return a->size() < b->size(); });
    std::vector<std::uint64_t> current = *lists[0];
    for (std::size_t i = 1; i < lists.size() && !current.empty(); ++i) {
        std::vector<std::uint64_t> next;
        std::set_intersection(current.begin(), current.end(), lists[i]->begin(), lists[i]->end(),
                              std::back_inserter(next));
        current = std::move(next);
    }
    return current.size();
}

double query_relevance(const std::string& question, const MemoryNode& node) {
    auto query_tokens = tokenize(question);
    if (query_tokens.empty()) return 0.0;
    auto node_tokens = tokenize(node.content);
    for (const auto& tag : node.tags) {
        auto tag_tokens = tokenize(tag);
        node_tokens.insert(tag_tokens.begin(), tag_tokens.end());
    }
    std::size_t hits = 0;
    for (const auto& token : query_tokens)
        if (node_tokens.count(token)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(query_tokens.size());
}

double retrieval_score(const MemoryQuery& query, const MemoryNode& node, std::int64_t now,
                       const RetrievalParams& params) {
    double relevance = query_relevance(query.question, node);
    double age = static_cast<double>(now - node.timestamp);
    if (age < 0) age = 0;
    double recency = std::exp(-params.lambda * age);
    return params.alpha * relevance + params.beta * recency + params.gamma * node.importance;
}

RetrievalResult MemoryStore::retrieve(const MemoryQuery& query, std::int64_t now) const {
    if (query.question.empty()) throw InputError("retrieve: empty question");
    if (query.limit == 0) throw InputError("retrieve: limit must be positive");

    auto query_tokens = tokenize(query.question);
    std::vector<std::uint32_t> query_ids;
    query_ids.reserve(query_tokens.size());
    for (const auto& token : query_tokens) {
        auto it = token_ids_.find(token);
        // Tokens no node carries can never hit; they only pad the denominator.
        if (it != token_ids_.end()) query_ids.push_back(it->second);
    }
    std::sort(query_ids.begin(), query_ids.end());
    const double query_size = static_cast<double>(query_tokens.size());

    struct Ranked {
        double score;
        const MemoryNode* node;
    };
    std::vector<Ranked> ranked;
    for (const auto& node : nodes_) {
        bool matches = true;
        for (const auto& tag : query.tags) {
            if (!node.tags.count(tag)) {
                matches = false;
                break;
            }
        }
        if (!matches) continue;
        double relevance = 0.0;
        if (!query_tokens.empty()) {
            const auto& node_ids = node_tokens_[node.id - 1];
            std::size_t hits = 0;
            auto qi = query_ids.begin();
            auto ni = node_ids.begin();
            while (qi != query_ids.end() && ni != node_ids.end()) {
                if (*qi < *ni) ++qi;
                else if (*ni < *qi) ++ni;
                else { ++hits; ++qi; ++ni; }
            }
            relevance = static_cast<double>(hits) / query_size;
        }
        double age = static_cast<double>(now - node.timestamp);
        if (age < 0) age = 0;
        double recency = std::exp(-params_.lambda * age);
        double score = params_.alpha * relevance + params_.beta * recency + params_.gamma * node.importance;
        ranked.push_back({score, &node});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.node->timestamp != b.node->timestamp) return a.node->timestamp > b.node->timestamp;
        return a.node->id < b.node->id;
    });
    if (ranked.size() > query.limit) ranked.resize(query.limit);

    RetrievalResult result;
    for (const auto& r : ranked) {
        result.nodes.push_back(r.node);
        result.scores.push_back(r.score);
    }
    return result;
}

nlohmann::json MemoryStore::node_to_json(const MemoryNode& node) {
    nlohmann::json j;
    j["id"] = node.id;
    j["store"] = store_kind_name(node.store);
    j["timestamp"] = node.timestamp;
    j["content"] = node.content;
    j["tags"] = node.tags;
    j["links"] = node.links;
    j["importance"] = node.importance;
    j["level"] = node.abstraction_level;
    return j;
}

nlohmann::json MemoryStore::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& node : nodes_) nodes.push_back(node_to_json(node));
    nlohmann::json heads = nlohmann::json::object();
    for (const auto& [key, head] : state_heads_)
        heads[key] = {{"value", head.first}, {"node", head.second}};
    nlohmann::json j;
    j["nodes"] = std::move(nodes);
    j["state_heads"] = std::move(heads);
    j["last_stream"] = last_stream_id_;
    j["params"] = {{"alpha", params_.alpha},
                   {"beta", params_.beta},
                   {"gamma", params_.gamma},
                   {"lambda", params_.lambda}};
    return j;
}

MemoryStore MemoryStore::from_json(const nlohmann::json& j) {
    MemoryStore store;
    const auto& p = j.at("params");
    store.params_.alpha = p.at("alpha").get<double>();
    store.params_.beta = p.at("beta").get<double>();
    store.params_.gamma = p.at("gamma").get<double>();
    store.params_.lambda = p.at("lambda").get<double>();
    for (const auto& nj : j.at("nodes")) {
        MemoryNode node;
        node.id = nj.at("id").get<std::uint64_t>();
        node.store = store_kind_from_name(nj.at("store").get<std::string>());
        node.timestamp = nj.at("timestamp").get<std::int64_t>();
        node.content = nj.at("content").get<std::string>();
        for (const auto& tag : nj.at("tags")) node.tags.insert(tag.get<std::string>());
        for (const auto& link : nj.at("links")) node.links.insert(link.get<std::uint64_t>());
        node.importance = nj.at("importance").get<double>();
        node.abstraction_level = nj.at("level").get<int>();
        if (node.id != store.nodes_.size() + 1)
            throw InputError("memory dump: node ids must be dense and ordered");
        for (const auto& tag : node.tags) store.tag_index_[tag].push_back(node.id);
        store.nodes_.push_back(std::move(node));
        store.cache_tokens(store.nodes_.back());
    }
    for (const auto& [key, head] : j.at("state_heads").items())
        store.state_heads_[key] = {head.at("value").get<std::string>(),
                                   head.at("node").get<std::uint64_t>()};
    store.last_stream_id_ = j.at("last_stream").get<std::uint64_t>();
    return store;
}

} // namespace socialsim
