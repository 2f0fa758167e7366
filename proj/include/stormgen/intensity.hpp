#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "stormgen/errors.hpp"
#include "stormgen/rng.hpp"
#include "stormgen/series.hpp"
#include "stormgen/stats.hpp"

namespace stormgen {

// Nonparametric intensity model: per (month, state) pools of historical
// amounts, resampled through a k-nearest-neighbour kernel density scheme.
// A draw picks one of the k pool values nearest to the previous day's
// amount (weights 1/r by nearness rank), adds Gaussian kernel noise, and
// reflects at the state's interval boundaries so occurrence and intensity
// never contradict each other.
struct IntensityModel {
    struct Pool {
        std::vector<double> values; // sorted ascending
        double bandwidth = 0.0;     // Silverman, 0 when the pool is degenerate
        std::size_t knn_k = 0;
    };

    std::array<Pool, 12> wet = {};
    std::array<Pool, 12> extreme = {};
    // State-interval boundaries per month-of-year; all twelve agree unless
    // the model was fitted with per-month extreme definitions.
    std::array<double, 12> wet_threshold = {};
    std::array<double, 12> extreme_threshold = {};

    const Pool& pool(int month, OccurrenceState state) const {
        if (month < 1 || month > 12) throw_usage("month out of range");
        switch (state) {
            case OccurrenceState::Wet: return wet[static_cast<std::size_t>(month - 1)];
            case OccurrenceState::Extreme: return extreme[static_cast<std::size_t>(month - 1)];
            default: throw_usage("intensity pools exist only for wet and extreme states");
        }
    }

    void set_thresholds(double wet_t, double extreme_t) {
        wet_threshold.fill(wet_t);
        extreme_threshold.fill(extreme_t);
    }

    // [lo, hi) for Wet, [lo, inf) for Extreme.
    std::pair<double, double> interval(int month, OccurrenceState state) const {
        const std::size_t m = static_cast<std::size_t>(month - 1);
        if (state == OccurrenceState::Wet) return {wet_threshold[m], extreme_threshold[m]};
        return {extreme_threshold[m], std::numeric_limits<double>::infinity()};
    }
};

struct IntensityFitOptions {
    std::size_t knn_k = 0;        // 0 = max(5, ceil(sqrt(pool size)))
    double bandwidth = -1.0;      // < 0 = Silverman's rule per pool
};

namespace detail {

inline double silverman_bandwidth(const std::vector<double>& sorted_pool) {
    const std::size_t n = sorted_pool.size();
    if (n < 2) return 0.0;
    const double sd = sample_sd(sorted_pool);
    const double iqr =
        quantile_sorted(sorted_pool, 0.75) - quantile_sorted(sorted_pool, 0.25);
    const double a = sd;
    const double b = iqr / 1.34;
    double spread;
    if (a > 0.0 && b > 0.0) spread = std::min(a, b);
    else spread = std::max(a, b);
    if (spread <= 0.0) return 0.0;
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

inline std::size_t default_knn_k(std::size_t pool_size) {
    const std::size_t root =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(pool_size))));
    return std::min(pool_size, std::max<std::size_t>(5, root));
}

inline void finish_pool(IntensityModel::Pool& pool, const IntensityFitOptions& options) {
    std::sort(pool.values.begin(), pool.values.end());
    pool.bandwidth =
        options.bandwidth >= 0.0 ? options.bandwidth : silverman_bandwidth(pool.values);
    pool.knn_k = options.knn_k > 0 ? std::min(options.knn_k, pool.values.size())
                                   : default_knn_k(pool.values.size());
}

// Folds x into [lo, hi) by repeated reflection (triangle-wave closed form).
inline double fold_into_interval(double x, double lo, double hi) {
    if (x >= lo && (x < hi)) return x;
    if (!std::isfinite(hi)) {
        // reflect at the lower boundary only
        if (x < lo) x = 2.0 * lo - x;
        return x;
    }
    const double width = hi - lo;
    double t = std::fmod(x - lo, 2.0 * width);
    if (t < 0.0) t += 2.0 * width;
    double folded = t < width ? lo + t : lo + (2.0 * width - t);
    if (folded >= hi) folded = std::nextafter(hi, lo); // keep the interval right-open
    if (folded < lo) folded = lo;
    return folded;
}

} // namespace detail

inline IntensityModel fit_intensity(const DailySeries& series, const StateSequence& states,
                                    const ExtremeDefinition& def,
                                    const IntensityFitOptions& options = {}) {
    def.validate();
    if (series.size() != states.size())
        throw_domain("series and state sequence lengths differ");

    IntensityModel model;
    model.set_thresholds(def.wet_threshold, def.extreme_threshold);

    for (std::size_t i = 0; i < series.size(); ++i) {
        const Date d = series.date_at(i);
        const std::size_t m = static_cast<std::size_t>(d.month - 1);
        switch (states.states[i]) {
            case OccurrenceState::Wet: model.wet[m].values.push_back(series.values[i]); break;
            case OccurrenceState::Extreme:
                model.extreme[m].values.push_back(series.values[i]);
                break;
            case OccurrenceState::Dry: break;
        }
    }
    for (std::size_t m = 0; m < 12; ++m) {
        detail::finish_pool(model.wet[m], options);
        detail::finish_pool(model.extreme[m], options);
    }
    return model;
}

// Variant for per-month extreme definitions: each month keeps its own
// state-interval boundaries; months without a definition fall back.
inline IntensityModel fit_intensity(const DailySeries& series, const StateSequence& states,
                                    const std::array<std::optional<ExtremeDefinition>, 12>& defs,
                                    const ExtremeDefinition& fallback,
                                    const IntensityFitOptions& options = {}) {
    IntensityModel model = fit_intensity(series, states, fallback, options);
    for (std::size_t m = 0; m < 12; ++m) {
        if (!defs[m]) continue;
        model.wet_threshold[m] = defs[m]->wet_threshold;
        model.extreme_threshold[m] = defs[m]->extreme_threshold;
    }
    return model;
}

// One intensity draw. `context_value` is the previous day's amount when
// that day was non-dry; without context the whole pool is weighted
// uniformly. `scale` multiplies pool values and bandwidth (used by
// calibration); the result is always folded back into the state interval.
inline double sample_intensity(const IntensityModel& model, int month, OccurrenceState state,
                               std::optional<double> context_value, Rng& rng,
                               double scale = 1.0) {
    const IntensityModel::Pool& pool = model.pool(month, state);
    const std::size_t n = pool.values.size();
    if (n == 0)
        throw_domain(std::string("no historical analogue for ") + state_name(state) +
                     " days in month " + std::to_string(month));

    std::size_t chosen;
    if (!context_value || n == 1) {
        chosen = rng.next_index(n);
    } else {
        // k nearest pool values form a contiguous window of the sorted pool.
        const double c = *context_value;
        const std::size_t k = std::min(pool.knn_k == 0 ? n : pool.knn_k, n);
        auto it = std::lower_bound(pool.values.begin(), pool.values.end(), c);
        std::size_t hi = static_cast<std::size_t>(it - pool.values.begin());
        std::size_t lo = hi; // window is [lo, hi)
        for (std::size_t taken = 0; taken < k; ++taken) {
            const bool can_down = lo > 0;
            const bool can_up = hi < n;
            if (!can_up || (can_down && c - pool.values[lo - 1] <= pool.values[hi] - c))
                --lo;
            else
                ++hi;
        }

        // Weights 1/r with dense distance ranks, so equidistant neighbours
        // share the same weight and the walk has no directional bias.
        std::array<double, 64> weights_buf;
        std::vector<double> weights_vec;
        double* weights = weights_buf.data();
        if (k > weights_buf.size()) {
            weights_vec.resize(k);
            weights = weights_vec.data();
        }
        std::vector<double> dist(k);
        for (std::size_t j = 0; j < k; ++j) dist[j] = std::fabs(pool.values[lo + j] - c);
        std::vector<double> sorted_dist = dist;
        std::sort(sorted_dist.begin(), sorted_dist.end());
        sorted_dist.erase(std::unique(sorted_dist.begin(), sorted_dist.end()),
                          sorted_dist.end());
        double total = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t rank = static_cast<std::size_t>(
                std::lower_bound(sorted_dist.begin(), sorted_dist.end(), dist[j]) -
                sorted_dist.begin());
            weights[j] = 1.0 / static_cast<double>(rank + 1);
            total += weights[j];
        }
        double u = rng.next_double() * total;
        std::size_t j = 0;
        while (j + 1 < k && u >= weights[j]) {
            u -= weights[j];
            ++j;
        }
        chosen = lo + j;
    }

    double value = pool.values[chosen] * scale;
    const double h = pool.bandwidth * scale;
    if (h > 0.0) value += h * rng.next_normal();

    const auto [lo_bound, hi_bound] = model.interval(month, state);
    return detail::fold_into_interval(value, lo_bound, hi_bound);
}

} // namespace stormgen
