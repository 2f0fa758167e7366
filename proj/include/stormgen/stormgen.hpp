#pragma once

// Umbrella header for the stormgen toolkit.

#include "stormgen/ar_model.hpp"
#include "stormgen/calendar.hpp"
#include "stormgen/climatology.hpp"
#include "stormgen/csv.hpp"
#include "stormgen/errors.hpp"
#include "stormgen/extremes.hpp"
#include "stormgen/generator.hpp"
#include "stormgen/intensity.hpp"
#include "stormgen/log.hpp"
#include "stormgen/markov.hpp"
#include "stormgen/metrics.hpp"
#include "stormgen/model_io.hpp"
#include "stormgen/pipeline.hpp"
#include "stormgen/rng.hpp"
#include "stormgen/series.hpp"
#include "stormgen/stats.hpp"
