#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "stormgen/errors.hpp"
#include "stormgen/rng.hpp"
#include "stormgen/series.hpp"

namespace stormgen {

using TransitionMatrix = std::array<std::array<double, 3>, 3>;
using StateDistribution = std::array<double, 3>;

// First-order three-state occurrence model, one transition matrix and
// initial distribution per month-of-year. Rows are from-states in
// Dry/Wet/Extreme order and must be stochastic.
struct MonthlyMarkovModel {
    struct MonthModel {
        TransitionMatrix transition = {};
        StateDistribution initial = {};
        bool fitted = false;
        std::size_t n_days = 0; // observations behind the fit
    };

    std::array<MonthModel, 12> months = {};
    double smoothing_alpha = 0.5;

    const MonthModel& month(int m) const {
        if (m < 1 || m > 12) throw_usage("month out of range");
        const MonthModel& mm = months[static_cast<std::size_t>(m - 1)];
        if (!mm.fitted) throw_domain("no occurrence data for month " + std::to_string(m));
        return mm;
    }

    bool is_fitted(int m) const {
        return m >= 1 && m <= 12 && months[static_cast<std::size_t>(m - 1)].fitted;
    }

    void validate() const {
        for (const MonthModel& mm : months) {
            if (!mm.fitted) continue;
            double pi_sum = 0.0;
            for (int s = 0; s < 3; ++s) {
                const double p = mm.initial[static_cast<std::size_t>(s)];
                if (p < 0.0) throw_domain("negative initial probability");
                pi_sum += p;
                double row_sum = 0.0;
                for (int t = 0; t < 3; ++t) {
                    const double q = mm.transition[static_cast<std::size_t>(s)]
                                                  [static_cast<std::size_t>(t)];
                    if (q < 0.0) throw_domain("negative transition probability");
                    row_sum += q;
                }
                if (std::fabs(row_sum - 1.0) > 1e-12)
                    throw_domain("transition row does not sum to 1");
            }
            if (std::fabs(pi_sum - 1.0) > 1e-12)
                throw_domain("initial distribution does not sum to 1");
        }
    }
};

// Transition counts use additive (Jeffreys) smoothing so that transitions
// never observed in the record (above all into Extreme) keep nonzero
// probability:
//   T[i][j] = (c_ij + alpha) / (c_i. + 3 alpha)
// A transition between two days belongs to the destination day's month.
inline MonthlyMarkovModel fit_markov(const StateSequence& states, double alpha = 0.5) {
    if (states.states.empty()) throw_domain("empty state sequence");
    if (!(alpha > 0.0)) throw_usage("smoothing alpha must be positive");

    std::array<std::array<std::array<std::size_t, 3>, 3>, 12> counts = {};
    std::array<std::array<std::size_t, 3>, 12> occupancy = {};

    for (std::size_t i = 0; i < states.size(); ++i) {
        const Date d = states.date_at(i);
        const std::size_t m = static_cast<std::size_t>(d.month - 1);
        occupancy[m][static_cast<std::size_t>(state_index(states.states[i]))] += 1;
        if (i > 0) {
            const std::size_t from = static_cast<std::size_t>(state_index(states.states[i - 1]));
            const std::size_t to = static_cast<std::size_t>(state_index(states.states[i]));
            counts[m][from][to] += 1;
        }
    }

    MonthlyMarkovModel model;
    model.smoothing_alpha = alpha;
    for (std::size_t m = 0; m < 12; ++m) {
        std::size_t month_days = occupancy[m][0] + occupancy[m][1] + occupancy[m][2];
        if (month_days == 0) continue;
        auto& mm = model.months[m];
        mm.fitted = true;
        mm.n_days = month_days;
        for (std::size_t from = 0; from < 3; ++from) {
            const double row_total = static_cast<double>(counts[m][from][0] + counts[m][from][1] +
                                                         counts[m][from][2]);
            for (std::size_t to = 0; to < 3; ++to)
                mm.transition[from][to] =
                    (static_cast<double>(counts[m][from][to]) + alpha) / (row_total + 3.0 * alpha);
        }
        const double n = static_cast<double>(month_days);
        for (std::size_t s = 0; s < 3; ++s)
            mm.initial[s] = (static_cast<double>(occupancy[m][s]) + alpha) / (n + 3.0 * alpha);
    }
    model.validate();
    return model;
}

namespace detail {

inline OccurrenceState draw_state(const StateDistribution& dist, Rng& rng) {
    const double u = rng.next_double() * (dist[0] + dist[1] + dist[2]);
    if (u < dist[0]) return OccurrenceState::Dry;
    if (u < dist[0] + dist[1]) return OccurrenceState::Wet;
    return OccurrenceState::Extreme;
}

} // namespace detail

// Simulates one month: first state from the month's initial distribution,
// then first-order transitions. Deterministic given the Rng state.
inline std::vector<OccurrenceState> simulate_occurrence(const MonthlyMarkovModel& model, int month,
                                                        std::size_t n_days, Rng& rng) {
    const auto& mm = model.month(month); // throws if unfit
    std::vector<OccurrenceState> states;
    states.reserve(n_days);
    if (n_days == 0) return states;
    states.push_back(detail::draw_state(mm.initial, rng));
    for (std::size_t i = 1; i < n_days; ++i) {
        const auto& row =
            mm.transition[static_cast<std::size_t>(state_index(states.back()))];
        states.push_back(detail::draw_state(row, rng));
    }
    return states;
}

// Multi-month simulation over real calendar dates. Matches the fitting
// attribution: each transition is governed by the destination day's month;
// the first day draws from its own month's initial distribution.
inline StateSequence simulate_daily_states(const MonthlyMarkovModel& model, Date start,
                                           std::size_t n_days, Rng& rng) {
    StateSequence out;
    out.start_date = start;
    out.states.reserve(n_days);
    for (std::size_t i = 0; i < n_days; ++i) {
        const Date d = add_days(start, static_cast<std::int64_t>(i));
        const auto& mm = model.month(d.month);
        if (i == 0) {
            out.states.push_back(detail::draw_state(mm.initial, rng));
        } else {
            const auto& row =
                mm.transition[static_cast<std::size_t>(state_index(out.states.back()))];
            out.states.push_back(detail::draw_state(row, rng));
        }
    }
    return out;
}

} // namespace stormgen
