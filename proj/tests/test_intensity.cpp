#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "stormgen/extremes.hpp"
#include "stormgen/intensity.hpp"
#include "stormgen/rng.hpp"

using namespace stormgen;

namespace {

// Hand-built model with one wet pool for January.
IntensityModel model_with_pool(std::vector<double> pool, double bandwidth, std::size_t k,
                               double wet = 0.1, double extreme = 1000.0) {
    IntensityModel model;
    model.set_thresholds(wet, extreme);
    auto& p = model.wet[0];
    p.values = std::move(pool);
    std::sort(p.values.begin(), p.values.end());
    p.bandwidth = bandwidth;
    p.knn_k = k;
    return model;
}

} // namespace

TEST_CASE("singleton pool with zero bandwidth always returns the value", "[intensity]") {
    const auto model = model_with_pool({10.0}, 0.0, 1);
    Rng rng(1);
    for (int i = 0; i < 100; ++i)
        CHECK(sample_intensity(model, 1, OccurrenceState::Wet, std::nullopt, rng) == 10.0);
    Rng rng2(2);
    CHECK(sample_intensity(model, 1, OccurrenceState::Wet, 55.0, rng2) == 10.0);
}

TEST_CASE("KNN restricts selection to the nearest values", "[intensity]") {
    const auto model = model_with_pool({5.0, 6.0, 100.0}, 0.0, 2);
    Rng rng(42);
    std::set<double> seen;
    for (int i = 0; i < 2000; ++i)
        seen.insert(sample_intensity(model, 1, OccurrenceState::Wet, 5.5, rng));
    CHECK(seen == std::set<double>{5.0, 6.0});
}

TEST_CASE("equidistant neighbours share the same weight", "[intensity]") {
    // context 5.5 sits exactly between 5 and 6: dense distance ranks make
    // the two picks equally likely.
    const auto model = model_with_pool({5.0, 6.0, 100.0}, 0.0, 2);
    Rng rng(4242);
    int low = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
        low += sample_intensity(model, 1, OccurrenceState::Wet, 5.5, rng) == 5.0 ? 1 : 0;
    CHECK(static_cast<double>(low) / n == Catch::Approx(0.5).margin(0.005));
}

TEST_CASE("rank weights prefer nearer values", "[intensity]") {
    // context at 6: distances 1 and 2 -> weights 1 and 1/2
    const auto model = model_with_pool({5.0, 7.0, 8.0}, 0.0, 2);
    Rng rng(99);
    int nearest = 0;
    const int n = 300000;
    for (int i = 0; i < n; ++i)
        nearest += sample_intensity(model, 1, OccurrenceState::Wet, 6.9, rng) == 7.0 ? 1 : 0;
    CHECK(static_cast<double>(nearest) / n == Catch::Approx(2.0 / 3.0).margin(0.005));
}

TEST_CASE("uncontexted sampling is unbiased over the pool", "[intensity]") {
    // mean of {2,4,6,8} with symmetric kernel noise: 5.0 (bandwidth small
    // enough that the folding boundaries stay out of reach)
    const auto model = model_with_pool({2.0, 4.0, 6.0, 8.0}, 0.5, 4);
    Rng rng(777);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i)
        sum += sample_intensity(model, 1, OccurrenceState::Wet, std::nullopt, rng);
    CHECK(sum / n == Catch::Approx(5.0).margin(0.02));
}

TEST_CASE("samples stay inside the state interval", "[intensity]") {
    // narrow wet interval [4, 6) with a large bandwidth: folding keeps
    // every draw inside and classification stays consistent
    auto model = model_with_pool({4.5, 5.0, 5.5}, 3.0, 3, 4.0, 6.0);
    auto& epool = model.extreme[0];
    epool.values = {6.0, 7.0, 20.0};
    epool.bandwidth = 5.0;
    epool.knn_k = 3;

    Rng rng(31415);
    for (int i = 0; i < 200000; ++i) {
        const double wet = sample_intensity(model, 1, OccurrenceState::Wet, std::nullopt, rng);
        CHECK(wet >= 4.0);
        CHECK(wet < 6.0);
        const double extreme =
            sample_intensity(model, 1, OccurrenceState::Extreme, std::nullopt, rng);
        CHECK(extreme >= 6.0);
    }
}

TEST_CASE("intensity scale multiplies values and bandwidth", "[intensity]") {
    const auto model = model_with_pool({10.0}, 0.0, 1, 0.1, 1000.0);
    Rng rng(5);
    CHECK(sample_intensity(model, 1, OccurrenceState::Wet, std::nullopt, rng, 2.0) == 20.0);
    // scaled draws still fold into the interval
    const auto narrow = model_with_pool({10.0}, 0.0, 1, 0.1, 15.0);
    Rng rng2(6);
    const double v = sample_intensity(narrow, 1, OccurrenceState::Wet, std::nullopt, rng2, 2.0);
    CHECK(v >= 0.1);
    CHECK(v < 15.0);
}

TEST_CASE("empty pool raises no historical analogue", "[intensity]") {
    IntensityModel model;
    model.set_thresholds(0.1, 10.0);
    Rng rng(1);
    CHECK_THROWS_WITH(sample_intensity(model, 1, OccurrenceState::Wet, std::nullopt, rng),
                      Catch::Matchers::ContainsSubstring("no historical analogue"));
}

TEST_CASE("per-month definitions give each month its own interval", "[intensity]") {
    // January days around 10, July days around 30; per-month thresholds
    // keep july's wet draws below its own extreme cutoff.
    DailySeries s;
    s.start_date = Date{1980, 1, 1};
    s.values.assign(366, 0.0);
    Rng fill(9);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Date d = s.date_at(i);
        s.values[i] = (d.month == 7 ? 25.0 : 8.0) + 4.0 * fill.next_double();
    }
    const auto defs = define_extreme_per_month(s, 0.9);
    const ExtremeDefinition fallback{0.1, 100.0, std::nullopt, false};
    const StateSequence states = classify_per_month(s, defs, fallback);
    const IntensityModel model = fit_intensity(s, states, defs, fallback);

    CHECK(model.extreme_threshold[0] == defs[0]->extreme_threshold);
    CHECK(model.extreme_threshold[6] == defs[6]->extreme_threshold);
    CHECK(model.extreme_threshold[0] < model.extreme_threshold[6]);

    Rng rng(11);
    for (int i = 0; i < 5000; ++i) {
        const double jan = sample_intensity(model, 1, OccurrenceState::Wet, std::nullopt, rng);
        CHECK(jan < model.extreme_threshold[0]);
        const double jul = sample_intensity(model, 7, OccurrenceState::Wet, std::nullopt, rng);
        CHECK(jul < model.extreme_threshold[6]);
    }
}

TEST_CASE("fit_intensity pools by month and state", "[intensity]") {
    DailySeries s;
    s.start_date = Date{1990, 1, 1};
    s.values = {0.0, 5.0, 25.0, 3.0, 0.0, 30.0}; // Jan 1..6
    const ExtremeDefinition def{0.1, 20.0, std::nullopt, false};
    const StateSequence states = classify(s, def);
    const IntensityModel model = fit_intensity(s, states, def);

    CHECK(model.wet[0].values == std::vector<double>{3.0, 5.0});
    CHECK(model.extreme[0].values == std::vector<double>{25.0, 30.0});
    CHECK(model.wet[1].values.empty());
    CHECK(model.wet[0].knn_k == 2); // capped at pool size
    CHECK(model.wet[0].bandwidth > 0.0);

    // degenerate pool: both values equal -> zero bandwidth
    DailySeries flat;
    flat.start_date = Date{1990, 1, 1};
    flat.values = {5.0, 5.0};
    const IntensityModel fm = fit_intensity(flat, classify(flat, def), def);
    CHECK(fm.wet[0].bandwidth == 0.0);
}

TEST_CASE("bandwidth override wins over Silverman", "[intensity]") {
    DailySeries s;
    s.start_date = Date{1990, 1, 1};
    s.values = {1.0, 2.0, 3.0, 4.0, 5.0};
    const ExtremeDefinition def{0.1, 100.0, std::nullopt, false};
    IntensityFitOptions options;
    options.bandwidth = 0.25;
    options.knn_k = 2;
    const IntensityModel model = fit_intensity(s, classify(s, def), def, options);
    CHECK(model.wet[0].bandwidth == 0.25);
    CHECK(model.wet[0].knn_k == 2);
}
