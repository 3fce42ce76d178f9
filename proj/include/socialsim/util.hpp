#pragma once

#include <cstdint>
#include <initializer_list>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace socialsim {

// Thrown on malformed configuration or rejected operation inputs.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a run cannot continue (I/O failure, broken state).
class RuntimeFailure : public std::runtime_error {
public:
    explicit RuntimeFailure(const std::string& what) : std::runtime_error(what) {}
};

// splitmix64 finalizer. All randomness in the engine is derived by hashing
// structured keys (seed, agent, tick, kind), never from stateful generators,
// so evaluation order and threading cannot change results.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t hash_combine(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x2545f4914f6cdd1dull;
    for (auto p : parts)
        h = mix64(h ^ p);
    return h;
}

// Uniform double in [0, 1) from a hash value.
inline double u01(std::uint64_t h) {
    return static_cast<double>(mix64(h) >> 11) * (1.0 / 9007199254740992.0);
}

inline double clamp01(double v) {
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

// Lowercased alphanumeric word set, used by memory retrieval.
std::set<std::string> tokenize(std::string_view text);

// Lowercase, non-alphanumerics collapsed to '_'; used for stable ids.
std::string slugify(std::string_view text);

bool contains_word(std::string_view text, std::string_view word);

// --- simulated calendar -----------------------------------------------------
// Ticks are 30 simulated minutes; 48 per day. Timestamps are rendered as
// ISO-8601 from a configurable simulated epoch (no timezone).

inline constexpr int kTicksPerDay = 48;
inline constexpr int kTicksPerWeek = 7 * kTicksPerDay;
inline constexpr double kMinutesPerTick = 30.0;

// In-transit ticks for a distance at constant speed; zero distance is free,
// anything positive costs at least one tick.
std::int64_t travel_ticks(double distance_km, double speed_kmh);

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t z, int& year, int& month, int& day);

// Parses "YYYY-MM-DD"; throws InputError on malformed input.
std::int64_t parse_civil_date(std::string_view text);

// ISO-8601 timestamp for a tick relative to the epoch day.
std::string iso_timestamp(std::int64_t epoch_day, std::int64_t tick);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

} // namespace socialsim
