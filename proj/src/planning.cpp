#include "socialsim/planning.hpp"

#include "socialsim/util.hpp"

namespace socialsim {

const char* modality_name(BehaviorCandidate::Modality modality) {
    return modality == BehaviorCandidate::Modality::physical ? "physical" : "remote";
}

std::int64_t ActionSequence::total_duration() const {
    std::int64_t total = 0;
    for (const auto& step : steps) total += step.duration;
    return total;
}

double intention_score(const TpbScores& scores, const TpbWeights& weights) {
    return weights.attitude * scores.attitude + weights.norm * scores.norm +
           weights.control * scores.control;
}

Intention select_action(const std::vector<std::pair<BehaviorCandidate, TpbScores>>& scored,
                        const TpbWeights& weights, bool* tie_broken) {
    if (scored.empty()) throw InputError("select_action: no candidates");
    if (tie_broken) *tie_broken = false;

    std::size_t best = 0;
    double best_score = intention_score(scored[0].second, weights);
    std::size_t at_best = 1;
    for (std::size_t i = 1; i < scored.size(); ++i) {
        double score = intention_score(scored[i].second, weights);
        if (score > best_score) {
            best = i;
            best_score = score;
            at_best = 1;
        } else if (score == best_score) {
            ++at_best;
        }
    }
    if (tie_broken) *tie_broken = at_best > 1;
    return Intention{scored[best].first, best_score};
}

BehaviorCandidate rest_candidate() {
    BehaviorCandidate c;
    c.id = "rest:in_place";
    c.description = "Rest and recover where you are";
    c.category = "rest";
    c.modality = BehaviorCandidate::Modality::remote;
    return c;
}

ActionSequence rest_sequence() {
    ActionSequence seq;
    seq.steps.push_back(ActionStep{"rest", std::nullopt, 1});
    seq.satisfies.deltas["fatigue"] = 0.1;
    return seq;
}

} // namespace socialsim
