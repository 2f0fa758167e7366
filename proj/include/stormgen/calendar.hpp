#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <string>

#include "stormgen/errors.hpp"

namespace stormgen {

// Proleptic Gregorian calendar date. Day arithmetic goes through the
// civil <-> day-number conversions below (Howard Hinnant's algorithms),
// which are exact over the full range of int32 years.
struct Date {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31

    friend bool operator==(const Date&, const Date&) = default;
};

constexpr bool is_leap_year(int year) {
    return year % 4 == 0 && (year % 100 != 0 || year % 400 == 0);
}

constexpr int days_in_month(int year, int month) {
    constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                             31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap_year(year)) return 29;
    return lengths[static_cast<std::size_t>(month - 1)];
}

constexpr int days_in_year(int year) { return is_leap_year(year) ? 366 : 365; }

// Days since 1970-01-01.
constexpr std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr Date civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
                static_cast<int>(d)};
}

constexpr std::int64_t to_day_number(const Date& date) {
    return days_from_civil(date.year, date.month, date.day);
}

constexpr Date add_days(const Date& date, std::int64_t n) {
    return civil_from_days(to_day_number(date) + n);
}

constexpr bool is_valid_date(const Date& d) {
    return d.month >= 1 && d.month <= 12 && d.day >= 1 &&
           d.day <= days_in_month(d.year, d.month);
}

inline std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return std::string(buf);
}

// Parses a date against a format spec containing the tokens YYYY, MM and DD
// separated by literal characters, e.g. "YYYY-MM-DD" or "DD/MM/YYYY".
inline Date parse_date(const std::string& text, const std::string& format = "YYYY-MM-DD") {
    Date out{0, 0, 0};
    std::size_t ti = 0;
    for (std::size_t fi = 0; fi < format.size();) {
        auto read_int = [&](std::size_t digits) {
            int value = 0;
            for (std::size_t k = 0; k < digits; ++k, ++ti) {
                if (ti >= text.size() || text[ti] < '0' || text[ti] > '9')
                    throw_io("invalid date '" + text + "' for format '" + format + "'");
                value = value * 10 + (text[ti] - '0');
            }
            return value;
        };
        if (format.compare(fi, 4, "YYYY") == 0) {
            out.year = read_int(4);
            fi += 4;
        } else if (format.compare(fi, 2, "MM") == 0) {
            out.month = read_int(2);
            fi += 2;
        } else if (format.compare(fi, 2, "DD") == 0) {
            out.day = read_int(2);
            fi += 2;
        } else {
            if (ti >= text.size() || text[ti] != format[fi])
                throw_io("invalid date '" + text + "' for format '" + format + "'");
            ++ti;
            ++fi;
        }
    }
    if (ti != text.size() || !is_valid_date(out))
        throw_io("invalid date '" + text + "' for format '" + format + "'");
    return out;
}

} // namespace stormgen
