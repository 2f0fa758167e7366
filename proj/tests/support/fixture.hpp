#pragma once

// The bundled synthetic record: 30 years of daily precipitation
// (1981-01-01 .. 2010-12-31, 10957 days). The construction keeps the value
// multiset in closed form while placing amounts without temporal structure
// a first-order occurrence model could not reproduce:
//
//   - days cycle through the 10-day pattern  D W W D D W W D W W
//     (wet spells of exactly two days, 4383 dry and 6574 wet days)
//   - the multiset of wet amounts is exact: the grid k/10 mm for
//     k = 60..400, where k <= 154 appears 20 times and k >= 155 appears
//     19 times  (95 * 20 + 246 * 19 = 6574)
//   - the order of the amounts over the wet days is a Fisher-Yates
//     shuffle with a fixed seed, so extreme amounts scatter across months
//     the way an independent process would, and the file is reproducible
//     byte for byte
//
// The type-7 95th percentile of the full record is exactly 37.2 mm/day:
// h = 10956 * 0.95 = 10408.2, and both ranks 10408 and 10409 of the
// sorted sample (offsets 6024 and 6025 into the wet block, which value
// k = 372 occupies from 6023 to 6041) hold 37.2. The 551 days at or above
// that threshold are 8.38% of the wet days.
//
// Wet amounts start at 6.0 mm by construction, so 6.0 is the natural wet
// threshold for this dataset (kWetThreshold); fitting with it keeps the
// intensity-model state intervals aligned with the support of the data.
//
// data/boston_synthetic.csv is this series written at full precision; a
// test regenerates it and checks the file byte-for-byte.

#include <cstddef>
#include <vector>

#include "stormgen/rng.hpp"
#include "stormgen/series.hpp"

namespace fixture {

constexpr std::size_t kDays = 10957;
constexpr double kPercentile95 = 37.2; // mm/day, exact type-7 value
constexpr double kWetThreshold = 6.0;  // mm/day, the grid floor
constexpr const char* kStationId = "synthetic-boston";

inline stormgen::DailySeries synthetic_series() {
    std::vector<double> amounts;
    amounts.reserve(6574);
    for (int k = 60; k <= 400; ++k) {
        const int copies = k <= 154 ? 20 : 19;
        for (int c = 0; c < copies; ++c) amounts.push_back(static_cast<double>(k) / 10.0);
    }

    stormgen::Rng rng(19810101);
    for (std::size_t i = amounts.size() - 1; i > 0; --i)
        std::swap(amounts[i], amounts[rng.next_index(i + 1)]);

    stormgen::DailySeries series;
    series.start_date = stormgen::Date{1981, 1, 1};
    series.station_id = kStationId;
    series.values.reserve(kDays);
    constexpr bool wet_pattern[10] = {false, true, true,  false, false,
                                      true,  true, false, true,  true};
    std::size_t wet_counter = 0;
    for (std::size_t i = 0; i < kDays; ++i) {
        if (!wet_pattern[i % 10]) {
            series.values.push_back(0.0);
        } else {
            series.values.push_back(amounts[wet_counter]);
            ++wet_counter;
        }
    }
    return series;
}

} // namespace fixture
