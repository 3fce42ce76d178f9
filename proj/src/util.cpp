#include "socialsim/util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace socialsim {

std::set<std::string> tokenize(std::string_view text) {
    std::set<std::string> out;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            out.insert(cur);
            cur.clear();
        }
    }
    if (!cur.empty())
        out.insert(cur);
    return out;
}

std::string slugify(std::string_view text) {
    std::string out;
    bool pending_sep = false;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            if (pending_sep && !out.empty())
                out.push_back('_');
            pending_sep = false;
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            pending_sep = true;
        }
    }
    return out;
}

bool contains_word(std::string_view text, std::string_view word) {
    auto words = tokenize(text);
    return words.count(std::string(word)) > 0;
}

std::int64_t travel_ticks(double distance_km, double speed_kmh) {
    if (distance_km <= 0.0) return 0;
    double km_per_tick = speed_kmh * (kMinutesPerTick / 60.0);
    return std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(distance_km / km_per_tick)));
}

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    month = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    year = static_cast<int>(y + (month <= 2));
}

std::int64_t parse_civil_date(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(std::string(text).c_str(), "%d-%d-%d", &y, &m, &d) != 3 || m < 1 ||
        m > 12 || d < 1 || d > 31)
        throw InputError("malformed date, expected YYYY-MM-DD: " + std::string(text));
    return days_from_civil(y, m, d);
}

std::string iso_timestamp(std::int64_t epoch_day, std::int64_t tick) {
    const std::int64_t minutes = tick * 30;
    std::int64_t day = epoch_day + minutes / (24 * 60);
    int rem = static_cast<int>(minutes % (24 * 60));
    if (rem < 0) {
        rem += 24 * 60;
        day -= 1;
    }
    int y, m, d;
    civil_from_days(day, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:00", y, m, d, rem / 60,
                  rem % 60);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw RuntimeFailure("cannot write file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw RuntimeFailure("short write: " + path);
}

} // namespace socialsim
