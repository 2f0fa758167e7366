#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "stormgen/climatology.hpp"
#include "stormgen/errors.hpp"

namespace stormgen {

// Annual-total forecaster: AR(p) with optional first differencing,
// estimated by ordinary least squares. No moving-average terms; the AR
// coefficients are deterministic and exactly recoverable on noiseless
// input, which the tests rely on.
struct AnnualARModel {
    int p = 1;
    int d = 0; // 0 or 1
    std::vector<double> coefficients; // p values
    double intercept = 0.0;           // mm/year (of the differenced series when d=1)
    double innovation_sd = 0.0;       // mm/year
    double in_sample_rmse = 0.0;      // one-step, on the fitting data
    bool intercept_only = false;      // rank-deficient fallback

    void validate() const {
        if (p < 1) throw_domain("AR order must be >= 1");
        if (d != 0 && d != 1) throw_domain("differencing order must be 0 or 1");
        if (innovation_sd < 0.0) throw_domain("negative innovation sd");
        if (coefficients.size() != static_cast<std::size_t>(p))
            throw_domain("coefficient count does not match order");
    }
};

namespace detail {

// Gaussian elimination with partial pivoting; returns false when the
// system is numerically singular.
inline bool solve_linear_system(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-12) return false;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
    return true;
}

} // namespace detail

inline AnnualARModel fit_annual_ar(const std::vector<std::pair<int, double>>& totals, int p = 1,
                                   int d = 0) {
    if (p < 1) throw_usage("AR order must be >= 1");
    if (d != 0 && d != 1) throw_usage("differencing order must be 0 or 1");
    const std::size_t n_years = totals.size();
    if (n_years < static_cast<std::size_t>(p + d + 2))
        throw_domain("need at least p + d + 2 years to fit the AR model");
    for (std::size_t i = 1; i < n_years; ++i)
        if (totals[i].first != totals[i - 1].first + 1)
            throw_domain("annual totals must cover consecutive years");

    std::vector<double> y;
    y.reserve(n_years);
    for (const auto& [year, total] : totals) y.push_back(total);
    if (d == 1) {
        std::vector<double> diff(y.size() - 1);
        for (std::size_t i = 1; i < y.size(); ++i) diff[i - 1] = y[i] - y[i - 1];
        y = std::move(diff);
    }

    AnnualARModel model;
    model.p = p;
    model.d = d;
    model.coefficients.assign(static_cast<std::size_t>(p), 0.0);

    const std::size_t up = static_cast<std::size_t>(p);
    const std::size_t n_obs = y.size() - up;
    const std::size_t dim = up + 1; // intercept column + p lags

    // Normal equations for y_t = c + sum_i phi_i y_{t-i}.
    std::vector<std::vector<double>> xtx(dim, std::vector<double>(dim, 0.0));
    std::vector<double> xty(dim, 0.0);
    for (std::size_t t = up; t < y.size(); ++t) {
        std::vector<double> row(dim, 1.0);
        for (std::size_t i = 1; i <= up; ++i) row[i] = y[t - i];
        for (std::size_t a = 0; a < dim; ++a) {
            xty[a] += row[a] * y[t];
            for (std::size_t b = 0; b < dim; ++b) xtx[a][b] += row[a] * row[b];
        }
    }

    // Scale-aware singularity guard: a constant series makes the lag
    // columns collinear with the intercept.
    bool solved = false;
    {
        auto a = xtx;
        auto b = xty;
        double scale = 0.0;
        for (std::size_t i = 0; i < dim; ++i) scale = std::max(scale, std::fabs(a[i][i]));
        bool degenerate = scale <= 0.0;
        if (!degenerate) {
            const double sd_y = sample_sd(std::span<const double>(y.data() + up, n_obs));
            const double mean_abs = std::fabs(mean(std::span<const double>(y.data(), y.size())));
            degenerate = sd_y <= 1e-9 * std::max(1.0, mean_abs);
        }
        if (!degenerate && detail::solve_linear_system(a, b)) {
            model.intercept = b[0];
            for (std::size_t i = 0; i < up; ++i) model.coefficients[i] = b[i + 1];
            solved = true;
        }
    }
    if (!solved) {
        // Fallback: intercept-only model at the sample mean.
        model.intercept = mean(y);
        model.intercept_only = true;
    }

    double ss = 0.0;
    for (std::size_t t = up; t < y.size(); ++t) {
        double pred = model.intercept;
        for (std::size_t i = 1; i <= up; ++i) pred += model.coefficients[i - 1] * y[t - i];
        const double r = y[t] - pred;
        ss += r * r;
    }
    model.in_sample_rmse = std::sqrt(ss / static_cast<double>(n_obs));
    const std::size_t dof = model.intercept_only
                                ? (n_obs > 1 ? n_obs - 1 : 1)
                                : (n_obs > dim ? n_obs - dim : 1);
    model.innovation_sd = std::sqrt(ss / static_cast<double>(dof));
    return model;
}

// Iterated one-step forecasts with the standard linear-prediction variance
// recursion (psi weights). Negative means are floored at zero and flagged.
inline std::vector<MeanForecast> forecast_annual(const AnnualARModel& model,
                                                 const std::vector<std::pair<int, double>>& history,
                                                 int horizon) {
    model.validate();
    if (history.empty()) throw_domain("empty history");
    if (horizon < 1) throw_usage("horizon must be >= 1");
    const std::size_t up = static_cast<std::size_t>(model.p);
    if (history.size() < static_cast<std::size_t>(model.p + model.d))
        throw_domain("history shorter than model order");

    std::vector<double> levels;
    levels.reserve(history.size());
    for (const auto& [year, total] : history) levels.push_back(total);
    const int last_year = history.back().first;

    std::vector<double> y = levels;
    if (model.d == 1) {
        std::vector<double> diff(y.size() - 1);
        for (std::size_t i = 1; i < y.size(); ++i) diff[i - 1] = y[i] - y[i - 1];
        y = std::move(diff);
        if (y.size() < up) throw_domain("history shorter than model order");
    }

    // psi weights: psi_0 = 1, psi_j = sum_i phi_i psi_{j-i}.
    std::vector<double> psi_full;
    psi_full.push_back(1.0);
    for (int j = 1; j < horizon; ++j) {
        double s = 0.0;
        for (int i = 1; i <= model.p && i <= j; ++i)
            s += model.coefficients[static_cast<std::size_t>(i - 1)] *
                 psi_full[static_cast<std::size_t>(j - i)];
        psi_full.push_back(s);
    }

    std::vector<double> extended = y;
    std::vector<MeanForecast> out;
    double last_level = levels.back();
    double var_diff_cum = 0.0;  // cumulative psi^2 (d=0)
    double cum_psi = 0.0;       // running sum of psi for the d=1 variance
    double var_level_cum = 0.0;

    for (int h = 1; h <= horizon; ++h) {
        double pred = model.intercept;
        for (std::size_t i = 1; i <= up; ++i)
            pred += model.coefficients[i - 1] * extended[extended.size() - i];
        extended.push_back(pred);

        const double psi_h = psi_full[static_cast<std::size_t>(h - 1)];
        var_diff_cum += psi_h * psi_h;
        cum_psi += psi_h;
        var_level_cum += cum_psi * cum_psi;

        MeanForecast f;
        f.target_year = last_year + h;
        f.source = ForecastSource::ar_model;
        double m = pred;
        double var = var_diff_cum;
        if (model.d == 1) {
            last_level += pred;
            m = last_level;
            var = var_level_cum;
        }
        if (m < 0.0) {
            m = 0.0;
            f.anomalous = true;
        }
        f.mean = m;
        f.sd = model.innovation_sd * std::sqrt(var);
        out.push_back(f);
    }
    return out;
}

} // namespace stormgen
