#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stormgen/calendar.hpp"
#include "stormgen/errors.hpp"
#include "stormgen/stats.hpp"

namespace stormgen {

// Dry < Wet < Extreme; the order is relied on for serialization and
// transition-matrix indexing.
enum class OccurrenceState : int { Dry = 0, Wet = 1, Extreme = 2 };

constexpr int state_index(OccurrenceState s) { return static_cast<int>(s); }

constexpr const char* state_name(OccurrenceState s) {
    switch (s) {
        case OccurrenceState::Dry: return "dry";
        case OccurrenceState::Wet: return "wet";
        case OccurrenceState::Extreme: return "extreme";
    }
    return "?";
}

// Threshold rule classifying a day. Both thresholds are inclusive on the
// upper class: value >= wet_threshold is Wet, value >= extreme_threshold
// is Extreme, so the percentile day itself counts as extreme.
struct ExtremeDefinition {
    double wet_threshold = 0.1; // trace-precipitation cutoff, mm/day
    double extreme_threshold = 0.0;
    std::optional<double> percentile_used;
    // Set when the threshold collapses onto the sample minimum, i.e. every
    // day would classify as extreme.
    bool degenerate = false;

    void validate() const {
        if (!(wet_threshold >= 0.0) || !(wet_threshold < extreme_threshold))
            throw_domain("extreme definition requires 0 <= wet_threshold < extreme_threshold");
    }
};

// Daily precipitation record on consecutive calendar days. A NaN value
// marks a missing observation (only the CSV reader's fill_missing_marker
// gap policy produces those); negative and infinite values are invalid.
struct DailySeries {
    Date start_date;
    std::vector<double> values; // mm/day
    std::string station_id;

    std::size_t size() const { return values.size(); }
    Date date_at(std::size_t i) const {
        return add_days(start_date, static_cast<std::int64_t>(i));
    }

    bool has_missing() const {
        for (double v : values)
            if (std::isnan(v)) return true;
        return false;
    }

    void validate(bool allow_missing = false) const {
        if (values.empty()) throw_domain("daily series must contain at least one day");
        if (!is_valid_date(start_date)) throw_domain("invalid start date");
        for (double v : values) {
            if (std::isnan(v)) {
                if (!allow_missing) throw_domain("daily series contains missing values");
                continue;
            }
            if (!std::isfinite(v) || v < 0.0)
                throw_domain("daily series values must be finite and non-negative");
        }
    }
};

struct StateSequence {
    Date start_date;
    std::vector<OccurrenceState> states;

    std::size_t size() const { return states.size(); }
    Date date_at(std::size_t i) const {
        return add_days(start_date, static_cast<std::int64_t>(i));
    }
};

inline OccurrenceState classify_value(double value, const ExtremeDefinition& def) {
    if (value >= def.extreme_threshold) return OccurrenceState::Extreme;
    if (value >= def.wet_threshold) return OccurrenceState::Wet;
    return OccurrenceState::Dry;
}

inline StateSequence classify(const DailySeries& series, const ExtremeDefinition& def) {
    def.validate();
    series.validate();
    StateSequence out;
    out.start_date = series.start_date;
    out.states.reserve(series.size());
    for (double v : series.values) out.states.push_back(classify_value(v, def));
    return out;
}

// One maximal run of consecutive days inside a single calendar month.
struct MonthRun {
    int year = 0;
    int month = 0;
    std::size_t start_index = 0; // offset into the series
    std::size_t length = 0;
    bool partial = false; // run does not cover the whole calendar month
};

// Partitions the series indices by calendar month. Every day lands in
// exactly one run; runs at the series edges that do not span their full
// month are flagged partial.
inline std::map<int, std::vector<MonthRun>> monthly_slices(const DailySeries& series) {
    series.validate(true);
    std::map<int, std::vector<MonthRun>> out;
    std::size_t i = 0;
    const std::size_t n = series.size();
    while (i < n) {
        const Date d = series.date_at(i);
        const std::size_t month_days = static_cast<std::size_t>(days_in_month(d.year, d.month));
        const std::size_t remaining_in_month = month_days - static_cast<std::size_t>(d.day) + 1;
        const std::size_t len = std::min(remaining_in_month, n - i);

        MonthRun run;
        run.year = d.year;
        run.month = d.month;
        run.start_index = i;
        run.length = len;
        run.partial = (d.day != 1) || (len != month_days);
        out[d.month].push_back(run);
        i += len;
    }
    return out;
}

} // namespace stormgen
