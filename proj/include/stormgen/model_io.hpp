#pragma once

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stormgen/ar_model.hpp"
#include "stormgen/climatology.hpp"
#include "stormgen/errors.hpp"
#include "stormgen/extremes.hpp"
#include "stormgen/intensity.hpp"
#include "stormgen/markov.hpp"

namespace stormgen {

// All numbers in persisted artifacts are rounded to 9 significant digits
// before serialization, which keeps fitted bundles and reports byte-stable
// across platforms and reruns.
inline double round9(double v) {
    if (!std::isfinite(v)) throw_domain("cannot serialize non-finite value");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::strtod(buf, nullptr);
}

inline std::string format9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
}

// FNV-1a over the raw bytes of a file; used as the input-data fingerprint
// recorded in fitted bundles.
inline std::string fingerprint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open '" + path + "'");
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(out);
}

// Everything cmd_fit produces, reusable across CLI invocations.
struct ModelBundle {
    static constexpr int kSchemaVersion = 1;

    std::string fingerprint;
    ExtremeDefinition extreme_definition;
    std::array<std::optional<ExtremeDefinition>, 12> monthly_extreme; // per-month mode
    bool per_month_extreme = false;
    ClimatologyModel climatology;
    AnnualARModel ar_model;
    std::optional<GPDFit> gpd;
    std::optional<GEVFit> gev;
    MonthlyMarkovModel markov;
    IntensityModel intensity;
    std::vector<std::pair<int, double>> annual_totals;          // (year, mm)
    std::array<std::optional<double>, 12> empirical_extreme_p;  // per month-of-year
    std::vector<std::string> warnings;
};

namespace detail {

using json = nlohmann::ordered_json;

inline json def_to_json(const ExtremeDefinition& def) {
    json j;
    j["wet_threshold"] = round9(def.wet_threshold);
    j["extreme_threshold"] = round9(def.extreme_threshold);
    if (def.percentile_used) j["percentile_used"] = round9(*def.percentile_used);
    j["degenerate"] = def.degenerate;
    return j;
}

inline ExtremeDefinition def_from_json(const json& j) {
    ExtremeDefinition def;
    def.wet_threshold = j.at("wet_threshold").get<double>();
    def.extreme_threshold = j.at("extreme_threshold").get<double>();
    if (j.contains("percentile_used")) def.percentile_used = j["percentile_used"].get<double>();
    def.degenerate = j.value("degenerate", false);
    def.validate();
    return def;
}

inline json rounded_array(const std::vector<double>& values) {
    json j = json::array();
    for (double v : values) j.push_back(round9(v));
    return j;
}

template <std::size_t N>
inline json rounded_array(const std::array<double, N>& values) {
    json j = json::array();
    for (double v : values) j.push_back(round9(v));
    return j;
}

// Probability rows: the first entries are rounded to 9 digits, the last is
// stored as the exact residual so reloaded rows still sum to 1 within
// machine precision.
inline json probability_row(const std::array<double, 3>& row) {
    const double a = round9(row[0]);
    const double b = round9(row[1]);
    return json::array({a, b, 1.0 - a - b});
}

} // namespace detail

inline nlohmann::ordered_json bundle_to_json(const ModelBundle& bundle) {
    using detail::json;
    json j;
    j["kind"] = "stormgen_model_bundle";
    j["schema_version"] = ModelBundle::kSchemaVersion;
    j["fingerprint"] = bundle.fingerprint;
    j["extreme_definition"] = detail::def_to_json(bundle.extreme_definition);
    j["per_month_extreme"] = bundle.per_month_extreme;
    if (bundle.per_month_extreme) {
        json months = json::array();
        for (const auto& def : bundle.monthly_extreme)
            months.push_back(def ? detail::def_to_json(*def) : json(nullptr));
        j["monthly_extreme"] = months;
    }

    {
        const ClimatologyModel& c = bundle.climatology;
        json jc;
        jc["monthly_mean"] = detail::rounded_array(c.monthly_mean);
        jc["monthly_sd"] = detail::rounded_array(c.monthly_sd);
        jc["annual_mean"] = round9(c.annual_mean);
        jc["annual_sd"] = round9(c.annual_sd);
        jc["tercile_low"] = round9(c.tercile_low);
        jc["tercile_high"] = round9(c.tercile_high);
        jc["tercile_bin_mean"] = detail::rounded_array(c.tercile_bin_mean);
        jc["tercile_bin_sd"] = detail::rounded_array(c.tercile_bin_sd);
        jc["n_years"] = c.n_years;
        jc["degenerate"] = c.degenerate;
        j["climatology"] = jc;
    }
    {
        const AnnualARModel& m = bundle.ar_model;
        json jm;
        jm["p"] = m.p;
        jm["d"] = m.d;
        jm["coefficients"] = detail::rounded_array(m.coefficients);
        jm["intercept"] = round9(m.intercept);
        jm["innovation_sd"] = round9(m.innovation_sd);
        jm["in_sample_rmse"] = round9(m.in_sample_rmse);
        jm["intercept_only"] = m.intercept_only;
        j["ar_model"] = jm;
    }
    if (bundle.gpd) {
        json jg;
        jg["threshold"] = round9(bundle.gpd->threshold);
        jg["shape"] = round9(bundle.gpd->shape);
        jg["scale"] = round9(bundle.gpd->scale);
        jg["exceedance_rate"] = round9(bundle.gpd->exceedance_rate);
        jg["n_exceedances"] = bundle.gpd->n_exceedances;
        j["gpd"] = jg;
    } else {
        j["gpd"] = nullptr;
    }
    if (bundle.gev) {
        json jg;
        jg["block_length"] = bundle.gev->block_length;
        jg["location"] = round9(bundle.gev->location);
        jg["scale"] = round9(bundle.gev->scale);
        jg["shape"] = round9(bundle.gev->shape);
        jg["n_blocks"] = bundle.gev->n_blocks;
        j["gev"] = jg;
    } else {
        j["gev"] = nullptr;
    }
    {
        json jm;
        jm["alpha"] = round9(bundle.markov.smoothing_alpha);
        json months = json::array();
        for (const auto& mm : bundle.markov.months) {
            json jmonth;
            jmonth["fitted"] = mm.fitted;
            if (mm.fitted) {
                jmonth["n_days"] = mm.n_days;
                jmonth["initial"] = detail::probability_row(mm.initial);
                json rows = json::array();
                for (const auto& row : mm.transition)
                    rows.push_back(detail::probability_row(row));
                jmonth["transition"] = rows;
            }
            months.push_back(jmonth);
        }
        jm["months"] = months;
        j["markov"] = jm;
    }
    {
        json ji;
        ji["wet_threshold"] = detail::rounded_array(bundle.intensity.wet_threshold);
        ji["extreme_threshold"] = detail::rounded_array(bundle.intensity.extreme_threshold);
        json months = json::array();
        for (std::size_t m = 0; m < 12; ++m) {
            json jmonth;
            for (const char* key : {"wet", "extreme"}) {
                const IntensityModel::Pool& pool = std::string(key) == "wet"
                                                       ? bundle.intensity.wet[m]
                                                       : bundle.intensity.extreme[m];
                json jp;
                jp["values"] = detail::rounded_array(pool.values);
                jp["bandwidth"] = round9(pool.bandwidth);
                jp["knn_k"] = pool.knn_k;
                jmonth[key] = jp;
            }
            months.push_back(jmonth);
        }
        ji["months"] = months;
        j["intensity"] = ji;
    }
    {
        json totals = json::array();
        for (const auto& [year, total] : bundle.annual_totals)
            totals.push_back(json::array({year, round9(total)}));
        j["annual_totals"] = totals;
    }
    {
        json probs = json::array();
        for (const auto& p : bundle.empirical_extreme_p)
            probs.push_back(p ? json(round9(*p)) : json(nullptr));
        j["empirical_extreme_probability"] = probs;
    }
    j["warnings"] = bundle.warnings;
    return j;
}

inline ModelBundle bundle_from_json(const nlohmann::ordered_json& j) {
    using detail::json;
    if (j.value("kind", "") != std::string("stormgen_model_bundle"))
        throw_io("not a stormgen model bundle");
    if (j.at("schema_version").get<int>() != ModelBundle::kSchemaVersion)
        throw_io("unsupported bundle schema version " +
                 std::to_string(j.at("schema_version").get<int>()));

    ModelBundle bundle;
    bundle.fingerprint = j.at("fingerprint").get<std::string>();
    bundle.extreme_definition = detail::def_from_json(j.at("extreme_definition"));
    bundle.per_month_extreme = j.value("per_month_extreme", false);
    if (bundle.per_month_extreme && j.contains("monthly_extreme")) {
        const auto& months = j.at("monthly_extreme");
        for (std::size_t m = 0; m < 12 && m < months.size(); ++m)
            if (!months[m].is_null())
                bundle.monthly_extreme[m] = detail::def_from_json(months[m]);
    }
    {
        const auto& jc = j.at("climatology");
        ClimatologyModel& c = bundle.climatology;
        for (std::size_t m = 0; m < 12; ++m) {
            c.monthly_mean[m] = jc.at("monthly_mean").at(m).get<double>();
            c.monthly_sd[m] = jc.at("monthly_sd").at(m).get<double>();
        }
        c.annual_mean = jc.at("annual_mean").get<double>();
        c.annual_sd = jc.at("annual_sd").get<double>();
        c.tercile_low = jc.at("tercile_low").get<double>();
        c.tercile_high = jc.at("tercile_high").get<double>();
        for (std::size_t b = 0; b < 3; ++b) {
            c.tercile_bin_mean[b] = jc.at("tercile_bin_mean").at(b).get<double>();
            c.tercile_bin_sd[b] = jc.at("tercile_bin_sd").at(b).get<double>();
        }
        c.n_years = jc.at("n_years").get<int>();
        c.degenerate = jc.value("degenerate", false);
        c.validate();
    }
    {
        const auto& jm = j.at("ar_model");
        AnnualARModel& m = bundle.ar_model;
        m.p = jm.at("p").get<int>();
        m.d = jm.at("d").get<int>();
        m.coefficients = jm.at("coefficients").get<std::vector<double>>();
        m.intercept = jm.at("intercept").get<double>();
        m.innovation_sd = jm.at("innovation_sd").get<double>();
        m.in_sample_rmse = jm.at("in_sample_rmse").get<double>();
        m.intercept_only = jm.value("intercept_only", false);
        m.validate();
    }
    if (!j.at("gpd").is_null()) {
        const auto& jg = j.at("gpd");
        GPDFit fit;
        fit.threshold = jg.at("threshold").get<double>();
        fit.shape = jg.at("shape").get<double>();
        fit.scale = jg.at("scale").get<double>();
        fit.exceedance_rate = jg.at("exceedance_rate").get<double>();
        fit.n_exceedances = jg.at("n_exceedances").get<std::size_t>();
        fit.validate();
        bundle.gpd = fit;
    }
    if (!j.at("gev").is_null()) {
        const auto& jg = j.at("gev");
        GEVFit fit;
        fit.block_length = jg.at("block_length").get<int>();
        fit.location = jg.at("location").get<double>();
        fit.scale = jg.at("scale").get<double>();
        fit.shape = jg.at("shape").get<double>();
        fit.n_blocks = jg.at("n_blocks").get<std::size_t>();
        fit.validate();
        bundle.gev = fit;
    }
    {
        const auto& jm = j.at("markov");
        bundle.markov.smoothing_alpha = jm.at("alpha").get<double>();
        const auto& months = jm.at("months");
        for (std::size_t m = 0; m < 12; ++m) {
            auto& mm = bundle.markov.months[m];
            mm.fitted = months.at(m).at("fitted").get<bool>();
            if (!mm.fitted) continue;
            mm.n_days = months.at(m).at("n_days").get<std::size_t>();
            for (std::size_t s = 0; s < 3; ++s) {
                mm.initial[s] = months.at(m).at("initial").at(s).get<double>();
                for (std::size_t t = 0; t < 3; ++t)
                    mm.transition[s][t] = months.at(m).at("transition").at(s).at(t).get<double>();
            }
        }
        bundle.markov.validate(); // row-stochasticity is re-checked on every load
    }
    {
        const auto& ji = j.at("intensity");
        for (std::size_t m = 0; m < 12; ++m) {
            bundle.intensity.wet_threshold[m] = ji.at("wet_threshold").at(m).get<double>();
            bundle.intensity.extreme_threshold[m] =
                ji.at("extreme_threshold").at(m).get<double>();
        }
        const auto& months = ji.at("months");
        for (std::size_t m = 0; m < 12; ++m) {
            for (const char* key : {"wet", "extreme"}) {
                IntensityModel::Pool& pool = std::string(key) == "wet"
                                                 ? bundle.intensity.wet[m]
                                                 : bundle.intensity.extreme[m];
                const auto& jp = months.at(m).at(key);
                pool.values = jp.at("values").get<std::vector<double>>();
                pool.bandwidth = jp.at("bandwidth").get<double>();
                pool.knn_k = jp.at("knn_k").get<std::size_t>();
                if (!std::is_sorted(pool.values.begin(), pool.values.end()))
                    throw_io("intensity pool is not sorted");
            }
        }
    }
    for (const auto& entry : j.at("annual_totals"))
        bundle.annual_totals.emplace_back(entry.at(0).get<int>(), entry.at(1).get<double>());
    {
        const auto& probs = j.at("empirical_extreme_probability");
        for (std::size_t m = 0; m < 12 && m < probs.size(); ++m)
            if (!probs[m].is_null()) bundle.empirical_extreme_p[m] = probs[m].get<double>();
    }
    bundle.warnings = j.at("warnings").get<std::vector<std::string>>();
    return bundle;
}

inline void save_bundle(const std::string& path, const ModelBundle& bundle) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_io("cannot write '" + path + "'");
    out << bundle_to_json(bundle).dump(2) << "\n";
}

inline ModelBundle load_bundle(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open bundle '" + path + "'");
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw_io("malformed bundle '" + path + "': " + e.what());
    }
    return bundle_from_json(j);
}

} // namespace stormgen
