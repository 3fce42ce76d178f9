#include "socialsim/needs.hpp"

#include "socialsim/util.hpp"

#include <algorithm>

namespace socialsim {

const char* tier_name(NeedTier tier) {
    switch (tier) {
    case NeedTier::physiological: return "physiological";
    case NeedTier::safety: return "safety";
    case NeedTier::social: return "social";
    case NeedTier::esteem: return "esteem";
    case NeedTier::self_actualization: return "self_actualization";
    }
    return "?";
}

NeedTier tier_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(NeedTier::self_actualization); ++i) {
        auto tier = static_cast<NeedTier>(i);
        if (name == tier_name(tier))
            return tier;
    }
    throw InputError("unknown need tier: " + name);
}

const char* event_kind_name(EventRecord::Kind kind) {
    return kind == EventRecord::Kind::active ? "active" : "passive";
}

double NeedState::value(const std::string& id) const {
    auto it = values.find(id);
    if (it == values.end())
        throw InputError("unknown need id: " + id);
    return it->second;
}

double NeedState::cap(const std::string& id) const {
    auto it = caps.find(id);
    return it == caps.end() ? 1.0 : it->second;
}

static double clamp_need(double v, double cap) {
    return std::min(cap, std::max(0.0, v));
}

NeedState step_physiological(const NeedState& state, const SatisfactionDelta& satisfied) {
    for (const auto& [id, amount] : satisfied.deltas) {
        if (!state.has(id))
            throw InputError("satisfaction references unknown need: " + id);
        if (!state.drive_governed(id))
            throw InputError("satisfaction targets non-drive need: " + id);
        if (amount < 0.0)
            throw InputError("negative satisfaction for need: " + id);
    }
    NeedState next = state;
    for (const auto& [id, inc] : state.growth) {
        double reduced = 0.0;
        if (auto it = satisfied.deltas.find(id); it != satisfied.deltas.end())
            reduced = it->second;
        next.values[id] = clamp_need(state.value(id) + inc - reduced, state.cap(id));
    }
    return next;
}

NeedState apply_event_appraisals(const NeedState& state,
                                 const std::vector<EventAppraisal>& active,
                                 const std::vector<EventAppraisal>& passive) {
    std::map<std::string, double> sums;
    auto accumulate = [&](const std::vector<EventAppraisal>& appraisals) {
        for (const auto& appraisal : appraisals) {
            for (const auto& [id, delta] : appraisal.deltas) {
                if (!state.has(id))
                    throw InputError("appraisal references unknown need: " + id);
                if (state.drive_governed(id))
                    throw InputError("appraisal targets drive-governed need: " + id);
                sums[id] += delta;
            }
        }
    };
    accumulate(active);
    accumulate(passive);

    NeedState next = state;
    for (const auto& [id, total] : sums)
        next.values[id] = clamp_need(state.value(id) + total, state.cap(id));
    return next;
}

std::optional<std::string> activated_need(const NeedState& state,
                                          const std::map<std::string, double>& thresholds) {
    std::optional<std::string> best;
    NeedTier best_tier = NeedTier::self_actualization;
    double best_value = -1.0;

    for (const auto& [id, value] : state.values) {
        auto thr = thresholds.find(id);
        if (thr == thresholds.end())
            throw InputError("no threshold configured for need: " + id);
        if (value < thr->second)
            continue;
        auto tier_it = state.tier_of.find(id);
        NeedTier tier = tier_it == state.tier_of.end() ? NeedTier::physiological : tier_it->second;
        bool wins = false;
        if (!best) {
            wins = true;
        } else if (tier != best_tier) {
            wins = tier < best_tier;
        } else if (value != best_value) {
            wins = value > best_value;
        } else {
            wins = id < *best; // lexicographic id as the final tie-break
        }
        if (wins) {
            best = id;
            best_tier = tier;
            best_value = value;
        }
    }
    return best;
}

} // namespace socialsim
