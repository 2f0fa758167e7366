#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "stormgen/csv.hpp"
#include "stormgen/errors.hpp"
#include "stormgen/series.hpp"
#include "stormgen/stats.hpp"

namespace stormgen {

enum class ForecastSource { climatology, ar_model, tercile_category };

constexpr const char* forecast_source_name(ForecastSource s) {
    switch (s) {
        case ForecastSource::climatology: return "climatology";
        case ForecastSource::ar_model: return "ar_model";
        case ForecastSource::tercile_category: return "tercile_category";
    }
    return "?";
}

// A mean-precipitation forecast for a target period. `mean` is the period
// total in mm; `anomalous` marks forecasts that had to be floored at zero.
struct MeanForecast {
    int target_year = 0;                // 0 when the target is a generic period
    std::optional<int> target_month;    // absent for annual targets
    double mean = 0.0;                  // mm, period total
    double sd = 0.0;                    // mm
    ForecastSource source = ForecastSource::climatology;
    bool anomalous = false;
};

enum class TercileCategory { below, near, above };

inline TercileCategory parse_tercile_category(const std::string& name) {
    if (name == "below") return TercileCategory::below;
    if (name == "near") return TercileCategory::near;
    if (name == "above") return TercileCategory::above;
    throw_usage("unknown tercile category '" + name + "'");
}

struct ClimatologyModel {
    std::array<double, 12> monthly_mean = {}; // mm/day, per month-of-year
    std::array<double, 12> monthly_sd = {};   // mm/day
    double annual_mean = 0.0;                 // mm/year
    double annual_sd = 0.0;                   // mm/year
    double tercile_low = 0.0;                 // mm/year
    double tercile_high = 0.0;                // mm/year
    std::array<double, 3> tercile_bin_mean = {}; // mean annual total per bin
    std::array<double, 3> tercile_bin_sd = {};
    int n_years = 0;
    bool degenerate = false; // fewer than 2 complete years

    void validate() const {
        if (!(tercile_low <= tercile_high)) throw_domain("tercile boundaries out of order");
        if (annual_sd < 0.0) throw_domain("negative annual sd");
        for (double m : monthly_mean)
            if (m < 0.0) throw_domain("negative monthly mean");
        for (double s : monthly_sd)
            if (s < 0.0) throw_domain("negative monthly sd");
    }
};

// Seasonal averages: per-month daily means/sds pooled across years plus
// annual-total statistics and tercile boundaries (type-7 quantiles at
// 1/3 and 2/3 of the complete-year totals).
inline ClimatologyModel fit_climatology(const DailySeries& series) {
    const AnnualTotals annual = annual_totals(series); // throws if no complete year

    ClimatologyModel model;
    std::array<std::vector<double>, 12> per_month;
    const auto slices = monthly_slices(series);
    for (const auto& [month, runs] : slices) {
        auto& pool = per_month[static_cast<std::size_t>(month - 1)];
        for (const MonthRun& run : runs)
            for (std::size_t i = 0; i < run.length; ++i)
                pool.push_back(series.values[run.start_index + i]);
    }
    for (int m = 0; m < 12; ++m) {
        const auto& pool = per_month[static_cast<std::size_t>(m)];
        if (pool.empty()) continue;
        model.monthly_mean[static_cast<std::size_t>(m)] = mean(pool);
        model.monthly_sd[static_cast<std::size_t>(m)] = sample_sd(pool);
    }

    const std::vector<double> totals = annual.values();
    model.n_years = static_cast<int>(totals.size());
    model.degenerate = totals.size() < 2;
    model.annual_mean = mean(totals);
    model.annual_sd = sample_sd(totals);
    model.tercile_low = empirical_quantile(totals, 1.0 / 3.0);
    model.tercile_high = empirical_quantile(totals, 2.0 / 3.0);

    // Half-open bins (-inf, t1], (t1, t2], (t2, inf).
    std::array<std::vector<double>, 3> bins;
    for (double t : totals) {
        if (t <= model.tercile_low) bins[0].push_back(t);
        else if (t <= model.tercile_high) bins[1].push_back(t);
        else bins[2].push_back(t);
    }
    for (std::size_t b = 0; b < 3; ++b) {
        // An empty bin (degenerate terciles) falls back to the overall mean.
        model.tercile_bin_mean[b] = bins[b].empty() ? model.annual_mean : mean(bins[b]);
        model.tercile_bin_sd[b] = bins[b].empty() ? 0.0 : sample_sd(bins[b]);
    }
    return model;
}

// Maps a tercile forecast category onto the mean historical annual total
// of that bin, as an annual calibration target.
inline MeanForecast tercile_to_target(TercileCategory category, const ClimatologyModel& clim) {
    clim.validate();
    const std::size_t b = static_cast<std::size_t>(category);
    MeanForecast f;
    f.mean = clim.tercile_bin_mean[b];
    f.sd = clim.tercile_bin_sd[b];
    f.source = ForecastSource::tercile_category;
    return f;
}

inline MeanForecast climatology_annual_forecast(const ClimatologyModel& clim) {
    MeanForecast f;
    f.mean = clim.annual_mean;
    f.sd = clim.annual_sd;
    f.source = ForecastSource::climatology;
    return f;
}

// Converts an annual-total forecast into a month target by the
// climatological share of that month (leap-aware via `year` when given).
inline MeanForecast annual_to_month_target(const MeanForecast& annual,
                                           const ClimatologyModel& clim, int month,
                                           int year = 0) {
    if (month < 1 || month > 12) throw_usage("month out of range");
    if (clim.annual_mean <= 0.0) throw_domain("climatology has zero annual mean");
    const int ndays = days_in_month(year > 0 ? year : 2001, month);
    const double month_total =
        clim.monthly_mean[static_cast<std::size_t>(month - 1)] * static_cast<double>(ndays);
    const double share = month_total / clim.annual_mean;
    MeanForecast f = annual;
    f.target_month = month;
    f.target_year = year;
    f.mean = annual.mean * share;
    f.sd = annual.sd * share;
    return f;
}

} // namespace stormgen
