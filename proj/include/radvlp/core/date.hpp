/**
 * @file date.hpp
 * @brief Proleptic Gregorian civil dates with exact day arithmetic.
 *
 * Dates carry no time zone. Conversions go through a serial day number
 * (days since 1970-01-01) using the classic era/day-of-era decomposition,
 * so shifting by any number of days is exact and reversible.
 */

#pragma once

#include "radvlp/core/error.hpp"

#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace radvlp {

struct CalendarDate {
    int year = 1970;
    int month = 1;
    int day = 1;

    friend constexpr auto operator<=>(const CalendarDate&, const CalendarDate&) = default;
};

inline constexpr int kMinSupportedYear = 1800;
inline constexpr int kMaxSupportedYear = 2200;

constexpr bool is_leap_year(int y) noexcept {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

constexpr int days_in_month(int y, int m) noexcept {
    constexpr int table[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap_year(y)) return 29;
    return (m >= 1 && m <= 12) ? table[m - 1] : 0;
}

constexpr bool is_valid(const CalendarDate& d) noexcept {
    return d.month >= 1 && d.month <= 12 && d.day >= 1 && d.day <= days_in_month(d.year, d.month);
}

/// Serial day number, 1970-01-01 == 0.
constexpr std::int64_t to_days(const CalendarDate& d) noexcept {
    const std::int64_t y = d.year - (d.month <= 2 ? 1 : 0);
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const std::int64_t yoe = y - era * 400;
    const std::int64_t mp = (d.month + 9) % 12;
    const std::int64_t doy = (153 * mp + 2) / 5 + d.day - 1;
    const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

constexpr CalendarDate from_days(std::int64_t z) noexcept {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const std::int64_t doe = z - era * 146097;
    const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::int64_t mp = (5 * doy + 2) / 153;
    const int day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    const int month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    const int year = static_cast<int>(yoe + era * 400 + (month <= 2 ? 1 : 0));
    return {year, month, day};
}

inline std::int64_t days_between(const CalendarDate& from, const CalendarDate& to) noexcept {
    return to_days(to) - to_days(from);
}

/**
 * @brief Date exactly @p offset_days after @p d.
 *
 * Both the input and the result must fall in the supported year range
 * [1800, 2200]; anything else raises InputError.
 */
inline CalendarDate shift_date(const CalendarDate& d, std::int64_t offset_days) {
    if (!is_valid(d)) throw InputError("shift_date: invalid calendar date");
    if (d.year < kMinSupportedYear || d.year > kMaxSupportedYear) {
        throw InputError("shift_date: year " + std::to_string(d.year) + " outside supported range");
    }
    const CalendarDate out = from_days(to_days(d) + offset_days);
    if (out.year < kMinSupportedYear || out.year > kMaxSupportedYear) {
        throw InputError("shift_date: result year " + std::to_string(out.year) + " outside supported range");
    }
    return out;
}

inline std::string to_iso(const CalendarDate& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

/// Parses strict `YYYY-MM-DD`.
inline CalendarDate parse_iso_date(std::string_view s) {
    auto digits = [&](std::size_t pos, std::size_t n) {
        int v = 0;
        for (std::size_t i = pos; i < pos + n; ++i) {
            if (s[i] < '0' || s[i] > '9') throw InputError("invalid ISO date '" + std::string(s) + "'");
            v = v * 10 + (s[i] - '0');
        }
        return v;
    };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        throw InputError("invalid ISO date '" + std::string(s) + "'");
    }
    CalendarDate d{digits(0, 4), digits(5, 2), digits(8, 2)};
    if (!is_valid(d)) throw InputError("invalid calendar date '" + std::string(s) + "'");
    return d;
}

}  // namespace radvlp
