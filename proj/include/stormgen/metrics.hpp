#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "stormgen/errors.hpp"
#include "stormgen/series.hpp"
#include "stormgen/stats.hpp"

namespace stormgen {

// Mean squared error of probabilistic forecasts of a binary event.
inline double brier_score(std::span<const double> forecasts, std::span<const int> outcomes) {
    if (forecasts.size() != outcomes.size()) throw_domain("forecast/outcome length mismatch");
    if (forecasts.empty()) throw_domain("empty forecast sequence");
    double sum = 0.0;
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        const double f = forecasts[i];
        if (!(f >= 0.0 && f <= 1.0)) throw_domain("forecast probability out of [0,1]");
        if (outcomes[i] != 0 && outcomes[i] != 1) throw_domain("outcomes must be 0 or 1");
        const double d = f - static_cast<double>(outcomes[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(forecasts.size());
}

// Classical ensemble CRPS estimator:
//   (1/m) sum |x_i - y| - (1/(2 m^2)) sum sum |x_i - x_j|
// (not the m(m-1) "fair" variant).
inline double crps_ensemble(std::span<const double> ensemble, double obs) {
    const std::size_t m = ensemble.size();
    if (m == 0) throw_domain("empty ensemble");
    for (double x : ensemble)
        if (!std::isfinite(x)) throw_domain("non-finite ensemble member");
    if (!std::isfinite(obs)) throw_domain("non-finite observation");

    double term1 = 0.0;
    for (double x : ensemble) term1 += std::fabs(x - obs);
    term1 /= static_cast<double>(m);

    double term2 = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            term2 += std::fabs(ensemble[i] - ensemble[j]);
    term2 /= 2.0 * static_cast<double>(m) * static_cast<double>(m);

    return term1 - term2;
}

// Plot-ready quantile comparison at midpoint levels (i + 0.5) / n_points.
struct QQData {
    std::vector<double> probs;
    std::vector<double> sim_q;  // mm/day
    std::vector<double> hist_q; // mm/day
};

inline QQData qq_data(std::span<const double> simulated, std::span<const double> historical,
                      std::size_t n_points) {
    if (simulated.empty() || historical.empty()) throw_domain("empty pool");
    if (n_points < 2) throw_usage("need at least 2 quantile levels");

    std::vector<double> sim_sorted(simulated.begin(), simulated.end());
    std::vector<double> hist_sorted(historical.begin(), historical.end());
    std::sort(sim_sorted.begin(), sim_sorted.end());
    std::sort(hist_sorted.begin(), hist_sorted.end());

    QQData out;
    out.probs.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n_points);
        out.probs.push_back(p);
        out.sim_q.push_back(quantile_sorted(sim_sorted, p));
        out.hist_q.push_back(quantile_sorted(hist_sorted, p));
    }
    return out;
}

// Dry spells are maximal runs of Dry; wet spells are maximal runs of
// non-Dry (Wet and Extreme both count as wet); extreme days reported
// separately.
struct SpellStats {
    double dry_mean = 0.0;
    std::size_t dry_max = 0;
    std::size_t n_dry_spells = 0;
    double wet_mean = 0.0;
    std::size_t wet_max = 0;
    std::size_t n_wet_spells = 0;
    std::size_t extreme_days = 0;
};

inline SpellStats spell_stats(const StateSequence& states) {
    if (states.states.empty()) throw_domain("empty state sequence");
    SpellStats out;
    std::size_t dry_total = 0, wet_total = 0;
    std::size_t run = 0;
    bool run_dry = states.states.front() == OccurrenceState::Dry;

    auto flush = [&](bool dry, std::size_t len) {
        if (len == 0) return;
        if (dry) {
            ++out.n_dry_spells;
            dry_total += len;
            out.dry_max = std::max(out.dry_max, len);
        } else {
            ++out.n_wet_spells;
            wet_total += len;
            out.wet_max = std::max(out.wet_max, len);
        }
    };

    for (OccurrenceState s : states.states) {
        if (s == OccurrenceState::Extreme) ++out.extreme_days;
        const bool dry = s == OccurrenceState::Dry;
        if (dry == run_dry) {
            ++run;
        } else {
            flush(run_dry, run);
            run_dry = dry;
            run = 1;
        }
    }
    flush(run_dry, run);

    if (out.n_dry_spells > 0)
        out.dry_mean = static_cast<double>(dry_total) / static_cast<double>(out.n_dry_spells);
    if (out.n_wet_spells > 0)
        out.wet_mean = static_cast<double>(wet_total) / static_cast<double>(out.n_wet_spells);
    return out;
}

// Exact two-sample Kolmogorov-Smirnov statistic by a merged sweep over
// both sorted samples.
inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw_domain("empty pool");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < sa.size() && ib < sb.size()) {
        const double x = std::min(sa[ia], sb[ib]);
        while (ia < sa.size() && sa[ia] <= x) ++ia;
        while (ib < sb.size() && sb[ib] <= x) ++ib;
        d = std::max(d, std::fabs(static_cast<double>(ia) / na -
                                  static_cast<double>(ib) / nb));
    }
    return d;
}

} // namespace stormgen
