#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "stormgen/errors.hpp"
#include "stormgen/series.hpp"
#include "stormgen/stats.hpp"

namespace stormgen {

// Shape parameters follow the (1 + xi * z)^(-1/xi) parameterization
// throughout: xi > 0 is heavy-tailed, xi < 0 has a bounded upper endpoint,
// xi = 0 degenerates to the exponential / Gumbel limit.

struct GPDFit {
    double threshold = 0.0;       // u, mm/day
    double shape = 0.0;           // xi
    double scale = 0.0;           // sigma, mm/day
    double exceedance_rate = 0.0; // zeta, exceedances per day
    std::size_t n_exceedances = 0;

    void validate() const {
        if (!(scale > 0.0)) throw_domain("GPD scale must be positive");
        if (exceedance_rate < 0.0 || exceedance_rate > 1.0)
            throw_domain("exceedance rate out of [0,1]");
        if (n_exceedances < 2) throw_domain("GPD fit needs at least 2 exceedances");
    }
};

struct GEVFit {
    int block_length = 0; // days per block; 0 = calendar-month blocks
    double location = 0.0;
    double scale = 0.0;
    double shape = 0.0;
    std::size_t n_blocks = 0;

    void validate() const {
        if (!(scale > 0.0)) throw_domain("GEV scale must be positive");
        if (n_blocks < 3) throw_domain("GEV fit needs at least 3 blocks");
    }
};

enum class ExtremeProbMethod { empirical, gpd, gev };

constexpr const char* extreme_prob_method_name(ExtremeProbMethod m) {
    switch (m) {
        case ExtremeProbMethod::empirical: return "empirical";
        case ExtremeProbMethod::gpd: return "gpd";
        case ExtremeProbMethod::gev: return "gev";
    }
    return "?";
}

// Probability that a period contains at least one extreme day. `p_day` is
// the per-day exceedance probability the period form was aggregated from
// (meaningful for the fitted methods).
struct ExtremeProbability {
    int month = 0; // month-of-year of the period
    double p = 0.0;
    double p_day = 0.0;
    ExtremeProbMethod method = ExtremeProbMethod::empirical;
    bool bounded_support = false; // threshold beyond the fitted upper endpoint
};

// Sets the extreme threshold at the given percentile of the full daily
// record (type-7). The wet threshold comes from configuration.
inline ExtremeDefinition define_extreme(const DailySeries& series, double percentile,
                                        double wet_threshold = 0.1) {
    if (!(percentile > 0.0 && percentile < 1.0))
        throw_usage("percentile must be in (0,1)");
    series.validate();
    ExtremeDefinition def;
    def.wet_threshold = wet_threshold;
    def.extreme_threshold = empirical_quantile(series.values, percentile);
    def.percentile_used = percentile;
    const double lo = *std::min_element(series.values.begin(), series.values.end());
    def.degenerate = def.extreme_threshold <= lo;
    def.validate();
    return def;
}

// Per-month variant; months with no data keep an absent entry.
inline std::array<std::optional<ExtremeDefinition>, 12>
define_extreme_per_month(const DailySeries& series, double percentile,
                         double wet_threshold = 0.1) {
    if (!(percentile > 0.0 && percentile < 1.0))
        throw_usage("percentile must be in (0,1)");
    std::array<std::optional<ExtremeDefinition>, 12> out;
    std::array<std::vector<double>, 12> pools;
    for (const auto& [month, runs] : monthly_slices(series))
        for (const MonthRun& run : runs)
            for (std::size_t i = 0; i < run.length; ++i)
                pools[static_cast<std::size_t>(month - 1)].push_back(
                    series.values[run.start_index + i]);
    for (std::size_t m = 0; m < 12; ++m) {
        if (pools[m].empty()) continue;
        ExtremeDefinition def;
        def.wet_threshold = wet_threshold;
        def.extreme_threshold = empirical_quantile(pools[m], percentile);
        def.percentile_used = percentile;
        def.degenerate =
            def.extreme_threshold <= *std::min_element(pools[m].begin(), pools[m].end());
        def.validate();
        out[m] = def;
    }
    return out;
}

// Classification under per-month definitions; months without one use the
// fallback.
inline StateSequence classify_per_month(const DailySeries& series,
                                        const std::array<std::optional<ExtremeDefinition>, 12>& defs,
                                        const ExtremeDefinition& fallback) {
    fallback.validate();
    series.validate();
    StateSequence out;
    out.start_date = series.start_date;
    out.states.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::size_t m = static_cast<std::size_t>(series.date_at(i).month - 1);
        const ExtremeDefinition& def = defs[m] ? *defs[m] : fallback;
        out.states.push_back(classify_value(series.values[i], def));
    }
    return out;
}

// Observed frequency: fraction of complete historical instances of the
// month that contain at least one Extreme day.
inline ExtremeProbability empirical_extreme_probability(const StateSequence& states, int month) {
    if (month < 1 || month > 12) throw_usage("month out of range");
    if (states.states.empty()) throw_domain("empty state sequence");

    std::size_t instances = 0;
    std::size_t with_extreme = 0;
    std::size_t i = 0;
    const std::size_t n = states.size();
    while (i < n) {
        const Date d = states.date_at(i);
        const std::size_t month_days = static_cast<std::size_t>(days_in_month(d.year, d.month));
        const std::size_t remaining = month_days - static_cast<std::size_t>(d.day) + 1;
        const std::size_t len = std::min(remaining, n - i);
        const bool complete = (d.day == 1) && (len == month_days);
        if (d.month == month && complete) {
            ++instances;
            for (std::size_t k = 0; k < len; ++k) {
                if (states.states[i + k] == OccurrenceState::Extreme) {
                    ++with_extreme;
                    break;
                }
            }
        }
        i += len;
    }
    if (instances == 0)
        throw_domain("no complete instance of month " + std::to_string(month) + " in record");

    ExtremeProbability out;
    out.month = month;
    out.p = static_cast<double>(with_extreme) / static_cast<double>(instances);
    out.p_day = out.p; // no finer resolution for the empirical method
    out.method = ExtremeProbMethod::empirical;
    return out;
}

namespace detail {

// L-moment (probability-weighted moment) estimator for the generalized
// Pareto distribution of the exceedances x - u (Hosking & Wallis 1987,
// translated to the xi sign convention above):
//   xi = 2 - l1/l2,  sigma = l1 * (1 - xi)
inline GPDFit fit_gpd_from_exceedances(std::vector<double> exceedances, double u,
                                       std::size_t n_days) {
    if (exceedances.size() < 2) throw_domain("insufficient exceedances");
    const LMoments lm = sample_lmoments(exceedances);
    if (!(lm.l2 > 0.0)) throw_domain("degenerate exceedance sample");

    GPDFit fit;
    fit.threshold = u;
    fit.shape = 2.0 - lm.l1 / lm.l2;
    fit.scale = lm.l1 * (1.0 - fit.shape);
    fit.n_exceedances = exceedances.size();
    fit.exceedance_rate =
        n_days > 0 ? static_cast<double>(exceedances.size()) / static_cast<double>(n_days) : 0.0;
    fit.validate();
    return fit;
}

// Hosking's rational approximation for the GEV shape from the L-skewness,
// then scale and location in closed form. k is Hosking's shape (= -xi).
inline GEVFit fit_gev_from_maxima(const std::vector<double>& maxima, int block_length) {
    if (maxima.size() < 3) throw_domain("GEV fit needs at least 3 blocks");
    const LMoments lm = sample_lmoments(maxima);
    if (!(lm.l2 > 0.0)) throw_domain("degenerate block maxima sample");

    constexpr double ln2 = 0.6931471805599453;
    constexpr double ln3 = 1.0986122886681098;
    constexpr double euler_gamma = 0.5772156649015329;

    const double t3 = lm.t3();
    const double c = 2.0 / (3.0 + t3) - ln2 / ln3;
    const double k = 7.8590 * c + 2.9554 * c * c;

    GEVFit fit;
    fit.block_length = block_length;
    fit.n_blocks = maxima.size();
    if (std::fabs(k) < 1e-8) {
        // Gumbel limit
        fit.shape = 0.0;
        fit.scale = lm.l2 / ln2;
        fit.location = lm.l1 - euler_gamma * fit.scale;
    } else {
        const double gamma_1k = std::tgamma(1.0 + k);
        fit.shape = -k;
        fit.scale = lm.l2 * k / ((1.0 - std::pow(2.0, -k)) * gamma_1k);
        fit.location = lm.l1 - fit.scale * (1.0 - gamma_1k) / k;
    }
    fit.validate();
    return fit;
}

} // namespace detail

// Threshold method: fit a GPD to the exceedances above u.
inline GPDFit fit_gpd(const DailySeries& series, double u) {
    series.validate();
    std::vector<double> exceedances;
    for (double v : series.values)
        if (v > u) exceedances.push_back(v - u);
    return detail::fit_gpd_from_exceedances(std::move(exceedances), u, series.size());
}

// Block method: GEV on maxima of consecutive non-overlapping blocks of
// `block_length` days. Trailing days that do not fill a block are dropped.
inline GEVFit fit_gev(const DailySeries& series, int block_length) {
    series.validate();
    if (block_length < 1) throw_usage("block length must be >= 1");
    const std::size_t bl = static_cast<std::size_t>(block_length);
    std::vector<double> maxima;
    for (std::size_t start = 0; start + bl <= series.size(); start += bl)
        maxima.push_back(
            *std::max_element(series.values.begin() + static_cast<std::ptrdiff_t>(start),
                              series.values.begin() + static_cast<std::ptrdiff_t>(start + bl)));
    return detail::fit_gev_from_maxima(maxima, block_length);
}

// Calendar-month blocks (complete months only).
inline GEVFit fit_gev_monthly(const DailySeries& series) {
    series.validate();
    std::vector<double> maxima;
    for (const auto& [month, runs] : monthly_slices(series))
        for (const MonthRun& run : runs) {
            if (run.partial) continue;
            double m = series.values[run.start_index];
            for (std::size_t i = 1; i < run.length; ++i)
                m = std::max(m, series.values[run.start_index + i]);
            maxima.push_back(m);
        }
    return detail::fit_gev_from_maxima(maxima, 0);
}

// GPD survival of the exceedance T - u, in the stable form with the
// exponential branch once |xi| drops below 1e-6.
inline double gpd_survival(double excess, double shape, double scale) {
    if (excess <= 0.0) return 1.0;
    if (std::fabs(shape) < 1e-6) return std::exp(-excess / scale);
    const double base = 1.0 + shape * excess / scale;
    if (base <= 0.0) return 0.0; // beyond the bounded upper endpoint
    return std::pow(base, -1.0 / shape);
}

// Period probability of at least one extreme day under daily independence:
// p_day = zeta * S(T - u), p = 1 - (1 - p_day)^period_days.
inline ExtremeProbability prob_extreme_from_fit(const GPDFit& fit, const ExtremeDefinition& def,
                                                int period_days) {
    fit.validate();
    def.validate();
    if (period_days < 1) throw_usage("period must be >= 1 days");
    if (def.extreme_threshold < fit.threshold)
        throw_domain("extreme threshold below GPD threshold");

    const double excess = def.extreme_threshold - fit.threshold;
    ExtremeProbability out;
    out.method = ExtremeProbMethod::gpd;
    if (fit.shape < 0.0) {
        const double endpoint_base = 1.0 + fit.shape * excess / fit.scale;
        out.bounded_support = endpoint_base <= 0.0;
    }
    out.p_day = fit.exceedance_rate * gpd_survival(excess, fit.shape, fit.scale);
    out.p = 1.0 - std::pow(1.0 - out.p_day, static_cast<double>(period_days));
    return out;
}

} // namespace stormgen
