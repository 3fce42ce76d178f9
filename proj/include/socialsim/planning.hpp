#pragma once

#include "socialsim/needs.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace socialsim {

// One behavioral option for an activated need. Physical candidates move the
// agent somewhere and must name a target POI; remote ones happen in place
// (online contact, resting where you are).
struct BehaviorCandidate {
    enum class Modality { physical, remote };

    std::string id;          // stable key, category-prefixed
    std::string description;
    std::string category;    // drives the satisfaction mapping (eat, rest, social, ...)
    std::optional<std::string> target_poi;
    Modality modality = Modality::remote;
};

const char* modality_name(BehaviorCandidate::Modality modality);

// Attitude / subjective norm / perceived behavioral control, each in [0, 1].
struct TpbScores {
    double attitude = 0.0;
    double norm = 0.0;
    double control = 0.0;
    std::string rationale;
};

struct TpbWeights {
    double attitude = 1.0 / 3.0;
    double norm = 1.0 / 3.0;
    double control = 1.0 / 3.0;
};

struct Intention {
    BehaviorCandidate candidate;
    double score = 0.0;
};

struct ActionStep {
    std::string verb;
    std::optional<std::string> target; // POI id; empty means "stay where you are"
    std::int64_t duration = 1;         // dwell ticks once the target is reached
};

struct ActionSequence {
    std::vector<ActionStep> steps;
    SatisfactionDelta satisfies;

    std::int64_t total_duration() const;
};

// Weighted intention value; the weighted sum is the whole model.
double intention_score(const TpbScores& scores, const TpbWeights& weights);

// Argmax over intention scores. Ties break to the earliest candidate in
// generation order; `tie_broken`, when given, reports that this happened so
// the decision log can record it.
Intention select_action(const std::vector<std::pair<BehaviorCandidate, TpbScores>>& scored,
                        const TpbWeights& weights, bool* tie_broken = nullptr);

// A do-nothing fallback used when candidate generation or grounding fails:
// rest in place for one tick.
BehaviorCandidate rest_candidate();
ActionSequence rest_sequence();

} // namespace socialsim
