#pragma once

#include "socialsim/needs.hpp"
#include "socialsim/planning.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace socialsim {

enum class MemoryStoreKind { stream, action_space, state };

const char* store_kind_name(MemoryStoreKind kind);
MemoryStoreKind store_kind_from_name(const std::string& name);

struct MemoryNode {
    std::uint64_t id = 0;
    MemoryStoreKind store = MemoryStoreKind::stream;
    std::int64_t timestamp = 0;
    std::string content;
    std::set<std::string> tags;
    std::set<std::uint64_t> links;
    double importance = 0.5;
    int abstraction_level = 0;
};

struct MemoryQuery {
    std::string question;
    std::set<std::string> tags; // empty = no filter; otherwise node must carry all of them
    std::size_t limit = 5;
};

struct RetrievalResult {
    std::vector<const MemoryNode*> nodes;
    std::vector<double> scores;
};

struct RetrievalParams {
    double alpha = 1.0 / 3.0;  // relevance
    double beta = 1.0 / 3.0;   // recency
    double gamma = 1.0 / 3.0;  // importance
    double lambda = 0.01;      // recency decay per tick
};

// Per-agent memory. Single writer (the agent's tick handler); reads are safe
// from anywhere. Node ids are dense, 1-based, and never reused.
class MemoryStore {
public:
    MemoryStore() = default;
    explicit MemoryStore(RetrievalParams params) : params_(params) {}

    std::uint64_t append_stream(const EventRecord& event, const std::string& thoughts,
                                const std::string& emotion, const std::string& outcome,
                                double importance = 0.5,
                                const std::set<std::string>& extra_tags = {});
    std::uint64_t record_action_outcome(const std::string& domain, const BehaviorCandidate& action,
                                        const std::string& outcome, bool success,
                                        std::int64_t timestamp, double importance = 0.5);
    std::uint64_t update_state(const std::string& key, const std::string& value,
                               const std::string& reason, std::int64_t timestamp,
                               double importance = 0.5);
    void associate(std::uint64_t a, std::uint64_t b);

    // Summarization happens outside (the cognition backend); the callback sees
    // the input nodes and returns the abstracted content. If it throws, no
    // node is created.
    using Summarizer =
        std::function<std::string(const std::vector<const MemoryNode*>&)>;
    std::uint64_t abstract(const std::vector<std::uint64_t>& inputs, const Summarizer& summarize,
                           std::int64_t timestamp, double importance = 0.5);

    RetrievalResult retrieve(const MemoryQuery& query, std::int64_t now) const;

    bool has_node(std::uint64_t id) const { return id >= 1 && id <= nodes_.size(); }
    const MemoryNode& node(std::uint64_t id) const;
    const std::vector<MemoryNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }

    // Latest value written through update_state for this key, if any.
    std::optional<std::string> current_state(const std::string& key) const;

    // Nodes carrying every listed tag. Backs the oracle's habit counters.
    std::size_t count_with_tags(const std::vector<std::string>& tags) const;

    const RetrievalParams& retrieval_params() const { return params_; }

    nlohmann::json to_json() const;
    static MemoryStore from_json(const nlohmann::json& j);

    static nlohmann::json node_to_json(const MemoryNode& node);

private:
    std::uint64_t push_node(MemoryNode node);
    void link_pair(std::uint64_t a, std::uint64_t b);
    void cache_tokens(const MemoryNode& node);

    RetrievalParams params_;
    std::vector<MemoryNode> nodes_;
    // Interned tokens of content+tags per node, parallel to nodes_. Node text
    // never changes after insertion, so retrieval can intersect sorted id
    // vectors instead of re-tokenizing and comparing strings on every query.
    std::unordered_map<std::string, std::uint32_t> token_ids_;
    std::vector<std::vector<std::uint32_t>> node_tokens_;
    std::map<std::string, std::vector<std::uint64_t>> tag_index_;
    std::map<std::string, std::pair<std::string, std::uint64_t>> state_heads_;
    std::uint64_t last_stream_id_ = 0;
};

// Token-overlap relevance between a question and a node's content plus tags,
// in [0, 1]. Exposed so tests can pin the definition.
double query_relevance(const std::string& question, const MemoryNode& node);

double retrieval_score(const MemoryQuery& query, const MemoryNode& node, std::int64_t now,
                       const RetrievalParams& params);

} // namespace socialsim
