#include "gluco/timeutil.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace gluco {

namespace {

// days-from-civil and its inverse, valid across the whole int64 range we care
// about; the era arithmetic is the standard proleptic-Gregorian formulation.
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y += m <= 2;
}

int parse_fixed(const std::string& s, std::size_t pos, std::size_t len, const char* what) {
    int v = 0;
    const char* first = s.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, v);
    if (ec != std::errc{} || ptr != first + len) {
        throw ParseError("bad " + std::string(what) + " in timestamp '" + s + "'");
    }
    return v;
}

}  // namespace

std::int64_t parse_iso8601_utc(const std::string& text) {
    // YYYY-MM-DDTHH:MM:SSZ
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
        throw ParseError("timestamp '" + text + "' is not of the form YYYY-MM-DDTHH:MM:SSZ");
    }
    const int year = parse_fixed(text, 0, 4, "year");
    const int month = parse_fixed(text, 5, 2, "month");
    const int day = parse_fixed(text, 8, 2, "day");
    const int hour = parse_fixed(text, 11, 2, "hour");
    const int minute = parse_fixed(text, 14, 2, "minute");
    const int second = parse_fixed(text, 17, 2, "second");

    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 59) {
        throw ParseError("timestamp '" + text + "' has an out-of-range field");
    }
    return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_iso8601_utc(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y;
    int m, d;
    civil_from_days(days, y, m, d);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04lld-%02d-%02dT%02d:%02d:%02dZ",
                  static_cast<long long>(y), m, d, static_cast<int>(rem / 3600),
                  static_cast<int>((rem / 60) % 60), static_cast<int>(rem % 60));
    return buf;
}

}  // namespace gluco
