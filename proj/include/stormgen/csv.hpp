#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "stormgen/calendar.hpp"
#include "stormgen/errors.hpp"
#include "stormgen/series.hpp"

namespace stormgen {

enum class GapPolicy { reject, fill_zero, fill_missing_marker };

struct CsvOptions {
    std::string date_column = "date";
    std::string value_column = "precip_mm";
    std::string date_format = "YYYY-MM-DD";
    GapPolicy gap_policy = GapPolicy::reject;
    std::string station_id;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

inline double parse_value(const std::string& text, std::size_t line_no) {
    if (text.empty())
        return std::numeric_limits<double>::quiet_NaN(); // missing observation
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw_io("malformed value '" + text + "' at line " + std::to_string(line_no));
    }
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    if (pos != text.size())
        throw_io("malformed value '" + text + "' at line " + std::to_string(line_no));
    return v;
}

} // namespace detail

// Reads a `date,precip_mm` CSV (header required, column order free) into a
// DailySeries. Gaps in the date sequence are handled per options.gap_policy.
inline DailySeries read_daily_csv(const std::string& path, const CsvOptions& options = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw_io("empty file '" + path + "'");
    const auto header = detail::split_csv_line(line);
    std::ptrdiff_t date_col = -1, value_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == options.date_column) date_col = static_cast<std::ptrdiff_t>(i);
        if (header[i] == options.value_column) value_col = static_cast<std::ptrdiff_t>(i);
    }
    if (date_col < 0 || value_col < 0)
        throw_io("header must contain columns '" + options.date_column + "' and '" +
                 options.value_column + "' in '" + path + "'");

    DailySeries series;
    series.station_id = options.station_id;
    bool first = true;
    std::int64_t prev_day = 0;
    std::size_t line_no = 1;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw_io("malformed row at line " + std::to_string(line_no));

        Date date;
        try {
            date = parse_date(fields[static_cast<std::size_t>(date_col)], options.date_format);
        } catch (const Error&) {
            throw_io("malformed date at line " + std::to_string(line_no));
        }
        const double value =
            detail::parse_value(fields[static_cast<std::size_t>(value_col)], line_no);
        if (std::isnan(value) && options.gap_policy != GapPolicy::fill_missing_marker)
            throw_io("missing value at line " + std::to_string(line_no));
        if (value < 0.0)
            throw_io("negative precipitation at line " + std::to_string(line_no));

        const std::int64_t day = to_day_number(date);
        if (first) {
            series.start_date = date;
            first = false;
        } else {
            if (day <= prev_day)
                throw_io("non-monotone date at line " + std::to_string(line_no));
            if (day != prev_day + 1) {
                switch (options.gap_policy) {
                    case GapPolicy::reject:
                        throw_io("date gap at line " + std::to_string(line_no));
                    case GapPolicy::fill_zero:
                        series.values.insert(series.values.end(),
                                             static_cast<std::size_t>(day - prev_day - 1), 0.0);
                        break;
                    case GapPolicy::fill_missing_marker:
                        series.values.insert(series.values.end(),
                                             static_cast<std::size_t>(day - prev_day - 1),
                                             std::numeric_limits<double>::quiet_NaN());
                        break;
                }
            }
        }
        series.values.push_back(value);
        prev_day = day;
    }
    if (series.values.empty()) throw_io("no data rows in '" + path + "'");
    series.validate(options.gap_policy == GapPolicy::fill_missing_marker);
    return series;
}

// precision 17 round-trips doubles exactly; the pipeline writes its
// artifacts at precision 9 for stable text output.
inline void write_daily_csv(std::ostream& out, const DailySeries& series, int precision = 17) {
    out << "date,precip_mm\n";
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double v = series.values[i];
        if (std::isnan(v)) {
            out << format_date(series.date_at(i)) << ",\n";
        } else {
            std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
            out << format_date(series.date_at(i)) << ',' << buf << '\n';
        }
    }
}

inline void write_daily_csv(const std::string& path, const DailySeries& series,
                            int precision = 17) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot write '" + path + "'");
    write_daily_csv(out, series, precision);
}

struct AnnualTotals {
    std::vector<std::pair<int, double>> totals; // (year, mm) for complete years
    std::vector<int> excluded_years;            // incomplete boundary years

    std::vector<double> values() const {
        std::vector<double> out;
        out.reserve(totals.size());
        for (const auto& [year, total] : totals) out.push_back(total);
        return out;
    }
};

// Sums daily values for each complete calendar year; partial boundary
// years are excluded and reported.
inline AnnualTotals annual_totals(const DailySeries& series) {
    series.validate();
    AnnualTotals out;
    const std::int64_t first = to_day_number(series.start_date);
    const std::int64_t last = first + static_cast<std::int64_t>(series.size()) - 1;
    const Date last_date = civil_from_days(last);

    for (int year = series.start_date.year; year <= last_date.year; ++year) {
        const std::int64_t y0 = days_from_civil(year, 1, 1);
        const std::int64_t y1 = days_from_civil(year, 12, 31);
        if (y0 < first || y1 > last) {
            out.excluded_years.push_back(year);
            continue;
        }
        double total = 0.0;
        for (std::int64_t d = y0; d <= y1; ++d)
            total += series.values[static_cast<std::size_t>(d - first)];
        out.totals.emplace_back(year, total);
    }
    if (out.totals.empty()) throw_domain("no complete years");
    return out;
}

} // namespace stormgen
