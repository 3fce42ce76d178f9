#pragma once

#include "socialsim/geo.hpp"
#include "socialsim/needs.hpp"
#include "socialsim/records.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace socialsim {

// A physical relocation between two distinct POIs, reconstructed from the
// trajectory log. Instant hops (travel shorter than one tick) have
// depart_tick == arrive_tick - 1 and no in-transit records.
struct TripRecord {
    std::string agent_id;
    std::string from_poi;
    std::string to_poi;
    std::int64_t depart_tick = 0; // last tick at the origin POI
    std::int64_t arrive_tick = 0; // first tick at the destination POI
    double distance_km = 0.0;     // straight-line origin to destination
    std::optional<std::string> need; // activated need while moving
};

// Reconstructs trips per agent. Records may arrive in any order; they are
// grouped by agent and sorted by tick internally.
std::vector<TripRecord> extract_trips(const std::vector<TrajectoryRecord>& records,
                                      CoordinateSystem cs);

// Root mean squared distance from the tick-weighted centroid.
double radius_of_gyration(const std::vector<Point>& points, CoordinateSystem cs);

std::map<std::string, double> radius_by_agent(const std::vector<TrajectoryRecord>& records,
                                              CoordinateSystem cs);

// Distinct POIs visited per simulated day, per agent. In-transit ticks do
// not count. Days run from the smallest observed day to the largest.
std::map<std::string, std::vector<int>> daily_location_counts(
    const std::vector<TrajectoryRecord>& records);

// 1 - (Levenshtein distance / max length); 1.0 when both are empty.
double sequence_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Intention activity per agent: daily_counts is the number of intention
// episodes per day (consecutive ticks with the same activated need collapse
// into one episode); similarity[i] compares day i against day i+1.
struct IntentionStats {
    std::vector<int> daily_counts;
    std::vector<double> similarity;
};

std::map<std::string, IntentionStats> intention_stats(
    const std::vector<TrajectoryRecord>& records);

// Fixed binning for sample-to-histogram conversion. Values outside the range
// clamp into the edge bins.
struct Binning {
    std::vector<double> edges; // bins() + 1 ascending edges

    static Binning log_spaced(int bins, double lo, double hi);
    static Binning integers(int lo, int hi); // one bin per integer, inclusive

    std::size_t bins() const { return edges.empty() ? 0 : edges.size() - 1; }
    std::size_t index(double value) const;
};

// Probability histogram of the samples under the binning (sums to 1 unless
// the sample is empty).
std::vector<double> histogram(const std::vector<double>& values, const Binning& binning);

// Jensen-Shannon divergence, base-2 logs, of two probability vectors of the
// same length. Ranges over [0, 1]; zero exactly when the inputs match.
// Inputs are renormalized, so raw counts are accepted.
double jensen_shannon(std::vector<double> p, std::vector<double> q);

// Bins both samples and returns their Jensen-Shannon divergence.
double distribution_divergence(const std::vector<double>& a, const std::vector<double>& b,
                               const Binning& binning);

inline Binning radius_binning() { return Binning::log_spaced(20, 0.1, 100.0); }
inline Binning daily_location_binning() { return Binning::integers(0, 30); }

struct SocialTripStats {
    int total = 0;
    int social = 0;
    double proportion_pct = 0.0;      // share of all trips motivated by a social-tier need
    std::optional<double> median_km;  // absent when there are no social trips
};

SocialTripStats social_trip_stats(const std::vector<TripRecord>& trips,
                                  const std::map<std::string, NeedTier>& tiers);

// Total distance of target trips over total distance of reference trips.
// Absent when either side is empty.
std::optional<double> cumulative_distance_ratio(const std::vector<TripRecord>& target,
                                                const std::vector<TripRecord>& reference);

// Trips per 7-day week, indexed by week of the departure tick.
std::vector<double> weekly_trip_counts(const std::vector<TripRecord>& trips, int weeks);

// Weekly trip counts divided by the baseline week's count. Weeks whose
// baseline is zero yield 0.
std::vector<double> mobility_ratio_trend(const std::vector<TripRecord>& trips, int weeks,
                                         int baseline_week);

// Relative mobility reduction (first - last) / first per group, from weekly
// trip counts. Groups with no trips in the first week report 0.
std::map<std::string, double> group_reduction(const std::vector<TripRecord>& trips,
                                              const std::map<std::string, std::string>& group_of,
                                              int first_week, int last_week);

// 1 - JSD between the two runs' shares of at-POI time per POI category.
double category_alignment(const std::vector<TrajectoryRecord>& a,
                          const std::vector<TrajectoryRecord>& b);

} // namespace socialsim
