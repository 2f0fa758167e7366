#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "stormgen/calendar.hpp"
#include "stormgen/climatology.hpp"
#include "stormgen/errors.hpp"
#include "stormgen/intensity.hpp"
#include "stormgen/markov.hpp"
#include "stormgen/rng.hpp"
#include "stormgen/series.hpp"

namespace stormgen {

// Banker's rounding; used for the extreme-scenario count so sweeps of P
// are unbiased and deterministic.
inline std::size_t round_half_even(double x) {
    if (x < 0.0) throw_usage("round_half_even expects a non-negative value");
    const double f = std::floor(x);
    const double diff = x - f;
    auto n = static_cast<std::size_t>(f);
    if (diff > 0.5) return n + 1;
    if (diff < 0.5) return n;
    return n % 2 == 0 ? n : n + 1;
}

struct EnsembleSpec {
    std::size_t n_scenarios = 1;       // N
    double p_extreme = 0.0;            // P: fraction of scenarios with >= 1 extreme day
    int target_month = 1;              // month-of-year
    int target_year = 0;               // 0 = generic month (non-leap calendar)
    std::optional<MeanForecast> calibration_target;
    std::uint64_t master_seed = 0;

    void validate() const {
        if (n_scenarios < 1) throw_usage("ensemble needs at least one scenario");
        if (!(p_extreme >= 0.0 && p_extreme <= 1.0)) throw_usage("P must be in [0,1]");
        if (target_month < 1 || target_month > 12) throw_usage("month out of range");
    }

    std::size_t n_extreme_scenarios() const {
        return round_half_even(p_extreme * static_cast<double>(n_scenarios));
    }

    int scenario_days() const {
        return days_in_month(target_year > 0 ? target_year : 2001, target_month);
    }

    Date scenario_start() const {
        return Date{target_year > 0 ? target_year : 2001, target_month, 1};
    }
};

struct Scenario {
    DailySeries series;
    std::vector<OccurrenceState> states; // simulated occurrence, classify-consistent
    std::size_t index = 0;
    std::uint64_t seed = 0; // seed of the accepted draw
    bool contains_extreme = false;
    std::size_t rejections_used = 0;
    bool forced = false;

    double total() const {
        double t = 0.0;
        for (double v : series.values) t += v;
        return t;
    }
};

struct ScenarioSet {
    EnsembleSpec spec;
    std::vector<Scenario> scenarios;
    double calibration_factor = 1.0; // cumulative intensity scale applied

    std::size_t n_extreme() const {
        std::size_t n = 0;
        for (const Scenario& s : scenarios) n += s.contains_extreme ? 1 : 0;
        return n;
    }
};

namespace detail {

constexpr std::size_t kRejectionCap = 1000;
constexpr std::uint64_t kForceSalt = 1'000'000;
constexpr std::uint64_t kCalibrationSalt = 2'000'000;

inline bool any_extreme(const std::vector<OccurrenceState>& states) {
    for (OccurrenceState s : states)
        if (s == OccurrenceState::Extreme) return true;
    return false;
}

// KNN context: the previous day's amount, but only when that day was in
// the same state as the one being drawn. A dry day has no amount, and an
// amount from the other wet regime has no analogue in the current pool
// (conditioning a wet draw on an extreme amount would always select the
// top of the wet pool and bias whole wet spells upward).
inline std::optional<double> context_from(const std::vector<double>& values,
                                          const std::vector<OccurrenceState>& states,
                                          std::size_t i) {
    if (i == 0 || states[i - 1] != states[i]) return std::nullopt;
    return values[i - 1];
}

} // namespace detail

namespace detail {

// Amounts for a fixed state sequence, chained on the previous day's value.
inline std::vector<double> draw_values(const std::vector<OccurrenceState>& states,
                                       const IntensityModel& intensity, int month, Rng& rng,
                                       double scale) {
    std::vector<double> values;
    values.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        double value = 0.0;
        if (states[i] != OccurrenceState::Dry) {
            const auto context = context_from(values, states, i);
            value = sample_intensity(intensity, month, states[i], context, rng, scale);
        }
        values.push_back(value);
    }
    return values;
}

} // namespace detail

// One synthetic month: occurrence from the Markov model, amounts from the
// intensity model chained on the previous day's value. The result
// reclassifies to exactly the simulated state sequence.
inline Scenario generate_scenario(const MonthlyMarkovModel& markov,
                                  const IntensityModel& intensity, const ExtremeDefinition& def,
                                  int month, std::size_t n_days, std::uint64_t seed,
                                  double scale = 1.0, Date start_date = Date{2001, 1, 1}) {
    def.validate();
    Rng rng(seed);
    Scenario scenario;
    scenario.seed = seed;
    scenario.states = simulate_occurrence(markov, month, n_days, rng);
    scenario.series.start_date = start_date;
    scenario.series.values = detail::draw_values(scenario.states, intensity, month, rng, scale);
    scenario.contains_extreme = detail::any_extreme(scenario.states);
    return scenario;
}

namespace detail {

// Rejection sampling against the scenario's assigned class. Each attempt
// simulates the occurrence sequence only; amounts are drawn (continuing
// the same stream, so the result matches generate_scenario bit for bit)
// once a sequence of the right class comes up. Past the attempt cap the
// class is forced: one uniformly chosen day is flipped to Extreme, or all
// Extreme days are demoted to Wet (Dry when no wet amounts exist), and
// amounts are redrawn for the adjusted sequence.
inline Scenario make_conditioned_scenario(const EnsembleSpec& spec,
                                          const MonthlyMarkovModel& markov,
                                          const IntensityModel& intensity, std::size_t index,
                                          bool assigned_extreme, double scale,
                                          std::uint64_t attempt_salt) {
    const int month = spec.target_month;
    const std::size_t n_days = static_cast<std::size_t>(spec.scenario_days());

    Scenario scenario;
    scenario.index = index;
    scenario.series.start_date = spec.scenario_start();

    std::uint64_t seed = 0;
    for (std::size_t attempt = 0; attempt < kRejectionCap; ++attempt) {
        seed = seed_sequence(spec.master_seed, index, attempt_salt + attempt);
        Rng rng(seed);
        std::vector<OccurrenceState> states = simulate_occurrence(markov, month, n_days, rng);
        if (any_extreme(states) != assigned_extreme) continue;
        scenario.seed = seed;
        scenario.states = std::move(states);
        scenario.series.values =
            draw_values(scenario.states, intensity, month, rng, scale);
        scenario.rejections_used = attempt;
        scenario.contains_extreme = assigned_extreme;
        return scenario;
    }

    // Forced path: adjust the last attempt's states, then draw amounts.
    Rng rng(seed_sequence(spec.master_seed, index, attempt_salt + kForceSalt));
    {
        Rng last(seed);
        scenario.states = simulate_occurrence(markov, month, n_days, last);
    }
    if (assigned_extreme) {
        scenario.states[rng.next_index(n_days)] = OccurrenceState::Extreme;
    } else {
        const bool wet_available = !intensity.pool(month, OccurrenceState::Wet).values.empty();
        for (OccurrenceState& s : scenario.states)
            if (s == OccurrenceState::Extreme)
                s = wet_available ? OccurrenceState::Wet : OccurrenceState::Dry;
    }
    scenario.seed = seed;
    scenario.series.values = draw_values(scenario.states, intensity, month, rng, scale);
    scenario.rejections_used = kRejectionCap;
    scenario.forced = true;
    scenario.contains_extreme = any_extreme(scenario.states);
    return scenario;
}

inline void run_indexed(std::size_t n, unsigned workers,
                        const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const unsigned n_threads = std::min<unsigned>(workers, static_cast<unsigned>(n));
    std::vector<std::thread> threads;
    std::mutex error_mutex;
    std::exception_ptr first_error;
    for (unsigned t = 0; t < n_threads; ++t) {
        threads.emplace_back([&, t]() {
            try {
                for (std::size_t i = t; i < n; i += n_threads) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace detail

// Generates N scenarios of which exactly round_half_even(P*N) contain at
// least one extreme day. Per-scenario seeds derive from (master_seed,
// index, attempt), so the output does not depend on the worker count or
// execution order.
inline ScenarioSet generate_ensemble(const EnsembleSpec& spec, const MonthlyMarkovModel& markov,
                                     const IntensityModel& intensity,
                                     const ExtremeDefinition& def, unsigned workers = 1) {
    spec.validate();
    def.validate();
    markov.month(spec.target_month); // throws if the month is unfit

    const std::size_t n_extreme = spec.n_extreme_scenarios();
    if (n_extreme > 0 &&
        intensity.pool(spec.target_month, OccurrenceState::Extreme).values.empty())
        throw_domain("conditioning infeasible: no historical extreme intensities for month " +
                     std::to_string(spec.target_month));

    ScenarioSet set;
    set.spec = spec;
    set.scenarios.resize(spec.n_scenarios);
    detail::run_indexed(spec.n_scenarios, workers, [&](std::size_t i) {
        set.scenarios[i] = detail::make_conditioned_scenario(spec, markov, intensity, i,
                                                             i < n_extreme, 1.0, 0);
    });
    return set;
}

// Rescales the ensemble so the mean of scenario period totals hits the
// target. Only nonzero amounts are scaled (dry days stay exactly zero).
// When scaling pushes a scenario out of its assigned extreme class, that
// scenario is regenerated with the cumulative factor applied inside the
// intensity sampler; up to 5 scale-then-check rounds.
inline ScenarioSet calibrate(ScenarioSet set, const MeanForecast& target,
                             const MonthlyMarkovModel& markov, const IntensityModel& intensity,
                             const ExtremeDefinition& def, unsigned workers = 1) {
    if (!(target.mean > 0.0)) throw_domain("calibration target mean must be positive");
    const std::size_t n = set.scenarios.size();
    if (n == 0) throw_domain("empty scenario set");
    const std::size_t n_extreme = set.spec.n_extreme_scenarios();

    constexpr int kMaxRounds = 5;
    for (int round = 1; round <= kMaxRounds; ++round) {
        double mean_total = 0.0;
        for (const Scenario& s : set.scenarios) mean_total += s.total();
        mean_total /= static_cast<double>(n);
        if (!(mean_total > 0.0)) throw_domain("ensemble mean must be positive for calibration");

        const double f = target.mean / mean_total;
        for (Scenario& s : set.scenarios)
            for (double& v : s.series.values)
                if (v > 0.0) v *= f;
        set.calibration_factor *= f;

        std::vector<std::size_t> offenders;
        for (std::size_t i = 0; i < n; ++i) {
            const bool assigned = i < n_extreme;
            bool now_extreme = false;
            auto& s = set.scenarios[i];
            for (std::size_t d = 0; d < s.series.values.size(); ++d) {
                const OccurrenceState cls = classify_value(s.series.values[d], def);
                s.states[d] = cls;
                now_extreme = now_extreme || cls == OccurrenceState::Extreme;
            }
            s.contains_extreme = now_extreme;
            if (now_extreme != assigned) offenders.push_back(i);
        }
        if (offenders.empty()) return set;
        if (round == kMaxRounds) break;

        const double scale = set.calibration_factor;
        const std::uint64_t salt =
            detail::kCalibrationSalt + static_cast<std::uint64_t>(round) * 10'000;
        detail::run_indexed(offenders.size(), workers, [&](std::size_t j) {
            const std::size_t i = offenders[j];
            set.scenarios[i] = detail::make_conditioned_scenario(
                set.spec, markov, intensity, i, i < n_extreme, scale, salt);
        });
    }
    throw_domain("calibration conflicts with extreme conditioning");
}

} // namespace stormgen
