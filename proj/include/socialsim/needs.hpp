#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace socialsim {

// Five ordered need levels, lowest first. Lower levels dominate behavior:
// a level-0 need that crosses its threshold always wins over higher levels.
enum class NeedTier : int {
    physiological = 0,
    safety = 1,
    social = 2,
    esteem = 3,
    self_actualization = 4,
};

const char* tier_name(NeedTier tier);
NeedTier tier_from_name(const std::string& name); // throws InputError on unknown names

// Per-agent need vector. Drive-governed needs (the ones with a growth rate)
// accumulate every tick and are reduced by completed actions; the remaining
// needs move only through event appraisals.
struct NeedState {
    std::map<std::string, double> values;   // need id -> level in [0, cap]
    std::map<std::string, double> caps;     // need id -> maximum level
    std::map<std::string, double> growth;   // per-tick accumulation, drive-governed needs only
    std::map<std::string, NeedTier> tier_of;

    bool has(const std::string& id) const { return values.count(id) > 0; }
    double value(const std::string& id) const;
    double cap(const std::string& id) const;
    bool drive_governed(const std::string& id) const { return growth.count(id) > 0; }
};

struct EventRecord {
    enum class Kind { active, passive };
    Kind kind = Kind::passive;
    std::string description;
    std::int64_t timestamp = 0;  // tick index
    std::string source;          // agent id or environment tag
};

const char* event_kind_name(EventRecord::Kind kind);

// Signed per-need increments attributed to one event.
struct EventAppraisal {
    EventRecord event;
    std::map<std::string, double> deltas;
};

// Need reduction produced by the previous tick's completed action.
// All values are nonnegative.
struct SatisfactionDelta {
    std::map<std::string, double> deltas;
};

// Drive accumulation minus satisfaction, clamped to [0, cap]. Only needs with
// a growth entry move; everything else is returned unchanged. The lower clamp
// at zero is an extension of the plain accumulate-and-cap rule: 0 means the
// need is fully met and values never go negative.
// Throws InputError if `satisfied` references an unknown or non-drive need.
NeedState step_physiological(const NeedState& state, const SatisfactionDelta& satisfied);

// Event-driven update for appraised needs: sum of active and passive deltas,
// clamped to [0, cap] after the summation. Drive-governed needs are rejected;
// they evolve only through step_physiological.
NeedState apply_event_appraisals(const NeedState& state,
                                 const std::vector<EventAppraisal>& active,
                                 const std::vector<EventAppraisal>& passive);

// The single behavior-driving need for this tick: lowest tier whose value
// crossed its threshold; ties within a tier break to the highest value, then
// to the lexicographically smallest id. Empty optional when nothing crossed.
std::optional<std::string> activated_need(const NeedState& state,
                                          const std::map<std::string, double>& thresholds);

} // namespace socialsim
