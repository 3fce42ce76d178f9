#include "socialsim/metrics.hpp"

#include "socialsim/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace socialsim {

namespace {

// Stable per-agent, tick-sorted view of the records.
std::map<std::string, std::vector<const TrajectoryRecord*>> group_by_agent(
    const std::vector<TrajectoryRecord>& records) {
    std::map<std::string, std::vector<const TrajectoryRecord*>> grouped;
    for (const auto& r : records) grouped[r.agent_id].push_back(&r);
    for (auto& [id, rows] : grouped) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const TrajectoryRecord* x, const TrajectoryRecord* y) {
                             return x->tick < y->tick;
                         });
    }
    return grouped;
}

double entropy_bits(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log2(x);
    return h;
}

void normalize(std::vector<double>& p) {
    double total = 0.0;
    for (double x : p) total += x;
    if (total <= 0.0) return;
    for (double& x : p) x /= total;
}

} // namespace

std::vector<TripRecord> extract_trips(const std::vector<TrajectoryRecord>& records,
                                      CoordinateSystem cs) {
    std::vector<TripRecord> trips;
    for (const auto& [agent, rows] : group_by_agent(records)) {
        const TrajectoryRecord* origin = nullptr; // last record seen at a POI
        std::optional<std::string> moving_need;
        bool have_need = false;
        for (const TrajectoryRecord* r : rows) {
            if (r->poi_id.empty()) { // in transit
                if (!have_need) {
                    moving_need = r->activated_need;
                    have_need = true;
                }
                continue;
            }
            if (origin && origin->poi_id != r->poi_id) {
                TripRecord trip;
                trip.agent_id = agent;
                trip.from_poi = origin->poi_id;
                trip.to_poi = r->poi_id;
                trip.depart_tick = origin->tick;
                trip.arrive_tick = r->tick;
                trip.distance_km = distance_km(origin->location, r->location, cs);
                trip.need = have_need ? moving_need : r->activated_need;
                trips.push_back(std::move(trip));
            }
            origin = r;
            moving_need.reset();
            have_need = false;
        }
    }
    return trips;
}

double radius_of_gyration(const std::vector<Point>& points, CoordinateSystem cs) {
    if (points.empty()) return 0.0;
    Point centroid{0.0, 0.0};
    for (const Point& p : points) {
        centroid.x += p.x;
        centroid.y += p.y;
    }
    centroid.x /= static_cast<double>(points.size());
    centroid.y /= static_cast<double>(points.size());
    double sum_sq = 0.0;
    for (const Point& p : points) {
        double d = distance_km(p, centroid, cs);
        sum_sq += d * d;
    }
    return std::sqrt(sum_sq / static_cast<double>(points.size()));
}

std::map<std::string, double> radius_by_agent(const std::vector<TrajectoryRecord>& records,
                                              CoordinateSystem cs) {
    std::map<std::string, double> out;
    for (const auto& [agent, rows] : group_by_agent(records)) {
        std::vector<Point> points;
        points.reserve(rows.size());
        for (const TrajectoryRecord* r : rows) points.push_back(r->location);
        out[agent] = radius_of_gyration(points, cs);
    }
    return out;
}

std::map<std::string, std::vector<int>> daily_location_counts(
    const std::vector<TrajectoryRecord>& records) {
    std::map<std::string, std::vector<int>> out;
    if (records.empty()) return out;
    std::int64_t lo = records.front().tick, hi = records.front().tick;
    for (const auto& r : records) {
        lo = std::min(lo, r.tick);
        hi = std::max(hi, r.tick);
    }
    const std::int64_t first_day = lo / kTicksPerDay;
    const std::size_t days = static_cast<std::size_t>(hi / kTicksPerDay - first_day) + 1;
    for (const auto& [agent, rows] : group_by_agent(records)) {
        std::vector<std::set<std::string>> seen(days);
        for (const TrajectoryRecord* r : rows) {
            if (r->poi_id.empty()) continue;
            seen[static_cast<std::size_t>(r->tick / kTicksPerDay - first_day)].insert(r->poi_id);
        }
        std::vector<int> counts(days, 0);
        for (std::size_t d = 0; d < days; ++d) counts[d] = static_cast<int>(seen[d].size());
        out[agent] = std::move(counts);
    }
    return out;
}

double sequence_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
        }
        std::swap(prev, cur);
    }
    double norm = static_cast<double>(std::max(n, m));
    return 1.0 - static_cast<double>(prev[m]) / norm;
}

std::map<std::string, IntentionStats> intention_stats(
    const std::vector<TrajectoryRecord>& records) {
    std::map<std::string, IntentionStats> out;
    if (records.empty()) return out;
    std::int64_t lo = records.front().tick, hi = records.front().tick;
    for (const auto& r : records) {
        lo = std::min(lo, r.tick);
        hi = std::max(hi, r.tick);
    }
    const std::int64_t first_day = lo / kTicksPerDay;
    const std::size_t days = static_cast<std::size_t>(hi / kTicksPerDay - first_day) + 1;
    for (const auto& [agent, rows] : group_by_agent(records)) {
        // Episode sequence per day: consecutive identical needs collapse.
        std::vector<std::vector<std::string>> episodes(days);
        for (const TrajectoryRecord* r : rows) {
            if (!r->activated_need) continue;
            auto& day = episodes[static_cast<std::size_t>(r->tick / kTicksPerDay - first_day)];
            if (day.empty() || day.back() != *r->activated_need)
                day.push_back(*r->activated_need);
        }
        IntentionStats stats;
        for (const auto& day : episodes) stats.daily_counts.push_back(static_cast<int>(day.size()));
        for (std::size_t d = 0; d + 1 < days; ++d)
            stats.similarity.push_back(sequence_similarity(episodes[d], episodes[d + 1]));
        out[agent] = std::move(stats);
    }
    return out;
}

Binning Binning::log_spaced(int bins, double lo, double hi) {
    Binning b;
    b.edges.reserve(static_cast<std::size_t>(bins) + 1);
    const double log_lo = std::log(lo), log_hi = std::log(hi);
    for (int i = 0; i <= bins; ++i)
        b.edges.push_back(std::exp(log_lo + (log_hi - log_lo) * i / bins));
    return b;
}

Binning Binning::integers(int lo, int hi) {
    Binning b;
    for (int v = lo; v <= hi + 1; ++v) b.edges.push_back(static_cast<double>(v) - 0.5);
    return b;
}

std::size_t Binning::index(double value) const {
    if (bins() == 0) return 0;
    if (value < edges.front()) return 0;
    if (value >= edges.back()) return bins() - 1;
    // Last bin whose left edge is <= value.
    auto it = std::upper_bound(edges.begin(), edges.end(), value);
    std::size_t i = static_cast<std::size_t>(it - edges.begin());
    return std::min(i - 1, bins() - 1);
}

std::vector<double> histogram(const std::vector<double>& values, const Binning& binning) {
    std::vector<double> h(binning.bins(), 0.0);
    if (h.empty() || values.empty()) return h;
    for (double v : values) h[binning.index(v)] += 1.0;
    normalize(h);
    return h;
}

double jensen_shannon(std::vector<double> p, std::vector<double> q) {
    normalize(p);
    normalize(q);
    const std::size_t n = std::max(p.size(), q.size());
    p.resize(n, 0.0);
    q.resize(n, 0.0);
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = 0.5 * (p[i] + q[i]);
    double jsd = entropy_bits(m) - 0.5 * (entropy_bits(p) + entropy_bits(q));
    return std::max(0.0, std::min(1.0, jsd));
}

double distribution_divergence(const std::vector<double>& a, const std::vector<double>& b,
                               const Binning& binning) {
    return jensen_shannon(histogram(a, binning), histogram(b, binning));
}

SocialTripStats social_trip_stats(const std::vector<TripRecord>& trips,
                                  const std::map<std::string, NeedTier>& tiers) {
    SocialTripStats stats;
    std::vector<double> social_distances;
    for (const auto& trip : trips) {
        ++stats.total;
        if (!trip.need) continue;
        auto it = tiers.find(*trip.need);
        if (it == tiers.end() || it->second != NeedTier::social) continue;
        ++stats.social;
        social_distances.push_back(trip.distance_km);
    }
    if (stats.total > 0)
        stats.proportion_pct = 100.0 * static_cast<double>(stats.social) / stats.total;
    if (!social_distances.empty()) {
        std::sort(social_distances.begin(), social_distances.end());
        const std::size_t n = social_distances.size();
        stats.median_km = (n % 2 == 1)
                              ? social_distances[n / 2]
                              : 0.5 * (social_distances[n / 2 - 1] + social_distances[n / 2]);
    }
    return stats;
}

std::optional<double> cumulative_distance_ratio(const std::vector<TripRecord>& target,
                                                const std::vector<TripRecord>& reference) {
    if (target.empty() || reference.empty()) return std::nullopt;
    double t = 0.0, r = 0.0;
    for (const auto& trip : target) t += trip.distance_km;
    for (const auto& trip : reference) r += trip.distance_km;
    if (r <= 0.0) return std::nullopt;
    return t / r;
}

std::vector<double> weekly_trip_counts(const std::vector<TripRecord>& trips, int weeks) {
    std::vector<double> counts(static_cast<std::size_t>(std::max(weeks, 0)), 0.0);
    for (const auto& trip : trips) {
        std::int64_t week = trip.depart_tick / kTicksPerWeek;
        if (week >= 0 && week < static_cast<std::int64_t>(counts.size()))
            counts[static_cast<std::size_t>(week)] += 1.0;
    }
    return counts;
}

std::vector<double> mobility_ratio_trend(const std::vector<TripRecord>& trips, int weeks,
                                         int baseline_week) {
    std::vector<double> counts = weekly_trip_counts(trips, weeks);
    std::vector<double> trend(counts.size(), 0.0);
    if (baseline_week < 0 || baseline_week >= static_cast<int>(counts.size())) return trend;
    double base = counts[static_cast<std::size_t>(baseline_week)];
    if (base <= 0.0) return trend;
    for (std::size_t w = 0; w < counts.size(); ++w) trend[w] = counts[w] / base;
    return trend;
}

std::map<std::string, double> group_reduction(const std::vector<TripRecord>& trips,
                                              const std::map<std::string, std::string>& group_of,
                                              int first_week, int last_week) {
    std::map<std::string, std::map<int, double>> weekly; // group -> week -> trips
    for (const auto& trip : trips) {
        auto it = group_of.find(trip.agent_id);
        if (it == group_of.end()) continue;
        weekly[it->second][static_cast<int>(trip.depart_tick / kTicksPerWeek)] += 1.0;
    }
    std::map<std::string, double> out;
    for (auto& [group, by_week] : weekly) {
        double first = by_week.count(first_week) ? by_week[first_week] : 0.0;
        double last = by_week.count(last_week) ? by_week[last_week] : 0.0;
        out[group] = first > 0.0 ? (first - last) / first : 0.0;
    }
    return out;
}

double category_alignment(const std::vector<TrajectoryRecord>& a,
                          const std::vector<TrajectoryRecord>& b) {
    std::set<std::string> categories;
    std::map<std::string, double> ca, cb;
    for (const auto& r : a)
        if (!r.poi_id.empty()) {
            ca[r.poi_category] += 1.0;
            categories.insert(r.poi_category);
        }
    for (const auto& r : b)
        if (!r.poi_id.empty()) {
            cb[r.poi_category] += 1.0;
            categories.insert(r.poi_category);
        }
    std::vector<double> p, q;
    for (const auto& c : categories) {
        p.push_back(ca.count(c) ? ca[c] : 0.0);
        q.push_back(cb.count(c) ? cb[c] : 0.0);
    }
    return 1.0 - jensen_shannon(std::move(p), std::move(q));
}

} // namespace socialsim
