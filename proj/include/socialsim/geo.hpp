#pragma once

#include <cmath>

namespace socialsim {

enum class CoordinateSystem { planar_km, geographic };

struct Point {
    double x = 0.0; // km east (planar) or longitude (geographic)
    double y = 0.0; // km north (planar) or latitude (geographic)

    friend bool operator==(const Point& a, const Point& b) {
        return a.x == b.x && a.y == b.y;
    }
};

inline double euclidean_km(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

// Haversine great-circle distance; points carry (lon, lat) in degrees.
inline double haversine_km(const Point& a, const Point& b) {
    constexpr double kEarthRadiusKm = 6371.0088;
    constexpr double kDeg = 3.14159265358979323846 / 180.0;
    const double lat1 = a.y * kDeg, lat2 = b.y * kDeg;
    const double dlat = (b.y - a.y) * kDeg;
    const double dlon = (b.x - a.x) * kDeg;
    const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(s)));
}

inline double distance_km(const Point& a, const Point& b, CoordinateSystem cs) {
    return cs == CoordinateSystem::geographic ? haversine_km(a, b) : euclidean_km(a, b);
}

// Linear interpolation along the segment a->b; t in [0, 1].
inline Point lerp(const Point& a, const Point& b, double t) {
    return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

} // namespace socialsim
