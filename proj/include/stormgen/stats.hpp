#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "stormgen/errors.hpp"

namespace stormgen {

inline double mean(std::span<const double> values) {
    if (values.empty()) throw_domain("empty sample");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

// Sample standard deviation (n-1 denominator); 0 for a single observation.
inline double sample_sd(std::span<const double> values) {
    if (values.empty()) throw_domain("empty sample");
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

// Type-7 quantile on an already sorted sample: h = (n-1)q, linear
// interpolation between the straddling order statistics.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw_domain("empty sample");
    const std::size_t n = sorted.size();
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double h = static_cast<double>(n - 1) * q;
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double empirical_quantile(std::span<const double> values, double q) {
    if (values.empty()) throw_domain("empty sample");
    for (double v : values)
        if (!std::isfinite(v)) throw_domain("non-finite sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, q);
}

// First three sample L-moments, via the unbiased probability-weighted
// moment estimators b0, b1, b2 on the sorted sample.
struct LMoments {
    double l1 = 0.0;
    double l2 = 0.0;
    double l3 = 0.0;

    double t3() const { return l3 / l2; } // L-skewness
};

inline LMoments sample_lmoments(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw_domain("L-moments need at least 2 observations");
    std::vector<double> x(values.begin(), values.end());
    std::sort(x.begin(), x.end());

    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double di = static_cast<double>(i);
        b0 += x[i];
        b1 += di / (dn - 1.0) * x[i];
        if (n >= 3) b2 += di * (di - 1.0) / ((dn - 1.0) * (dn - 2.0)) * x[i];
    }
    b0 /= dn;
    b1 /= dn;
    b2 /= dn;

    LMoments lm;
    lm.l1 = b0;
    lm.l2 = 2.0 * b1 - b0;
    lm.l3 = n >= 3 ? 6.0 * b2 - 6.0 * b1 + b0 : 0.0;
    return lm;
}

} // namespace stormgen
