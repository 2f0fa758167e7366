#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stormgen/ar_model.hpp"
#include "stormgen/climatology.hpp"
#include "stormgen/csv.hpp"
#include "stormgen/extremes.hpp"
#include "stormgen/generator.hpp"
#include "stormgen/log.hpp"
#include "stormgen/metrics.hpp"
#include "stormgen/model_io.hpp"

namespace stormgen {

// Wiring configuration for the fit -> generate -> evaluate -> report
// pipeline. Loaded from a JSON file; CLI flags override file values.
struct PipelineConfig {
    std::string input;   // historical daily CSV
    std::string heldout; // optional observations for CRPS / Brier
    CsvOptions csv;

    double extreme_percentile = 0.95;
    double wet_threshold = 0.1;
    bool per_month_extreme = false;
    double gpd_threshold_percentile = 0.90; // of wet-day amounts

    double markov_alpha = 0.5;
    std::size_t knn_k = 0;           // 0 = automatic
    double bandwidth_override = -1.0; // < 0 = Silverman
    unsigned workers = 1;

    std::size_t n_scenarios = 100;
    std::string p_extreme = "from:empirical"; // number | from:empirical | from:gpd
    int target_month = 1;
    int target_year = 0;
    std::uint64_t master_seed = 0;

    std::string calibration = "none"; // none | climatology | ar_model | tercile:<cat>
    int ar_p = 1;
    int ar_d = 0;

    std::size_t qq_points = 20;
    bool qq_wet_only = false;

    std::string output_dir = "out";

    void validate() const {
        if (input.empty()) throw_usage("config: 'input' is required");
        if (!(extreme_percentile > 0.0 && extreme_percentile < 1.0))
            throw_usage("config: extreme percentile must be in (0,1)");
        if (!(wet_threshold >= 0.0)) throw_usage("config: wet threshold must be >= 0");
        if (target_month < 1 || target_month > 12)
            throw_usage("config: target month out of range");
        if (n_scenarios < 1) throw_usage("config: need at least one scenario");
        if (workers < 1) throw_usage("config: workers must be >= 1");
        if (qq_points < 2) throw_usage("config: need at least 2 QQ points");
    }
};

inline PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_usage("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw_usage("malformed config '" + path + "': " + e.what());
    }

    PipelineConfig cfg;
    cfg.input = j.value("input", "");
    cfg.heldout = j.value("heldout", "");
    if (j.contains("csv")) {
        const auto& jc = j["csv"];
        cfg.csv.date_column = jc.value("date_column", cfg.csv.date_column);
        cfg.csv.value_column = jc.value("value_column", cfg.csv.value_column);
        cfg.csv.date_format = jc.value("date_format", cfg.csv.date_format);
        const std::string policy = jc.value("gap_policy", "reject");
        if (policy == "reject") cfg.csv.gap_policy = GapPolicy::reject;
        else if (policy == "fill_zero") cfg.csv.gap_policy = GapPolicy::fill_zero;
        else if (policy == "fill_missing_marker")
            cfg.csv.gap_policy = GapPolicy::fill_missing_marker;
        else throw_usage("config: unknown gap_policy '" + policy + "'");
        cfg.csv.station_id = jc.value("station_id", "");
    }
    if (j.contains("extreme")) {
        const auto& je = j["extreme"];
        cfg.extreme_percentile = je.value("percentile", cfg.extreme_percentile);
        cfg.wet_threshold = je.value("wet_threshold", cfg.wet_threshold);
        cfg.per_month_extreme = je.value("per_month", cfg.per_month_extreme);
        cfg.gpd_threshold_percentile =
            je.value("gpd_threshold_percentile", cfg.gpd_threshold_percentile);
    }
    if (j.contains("generator")) {
        const auto& jg = j["generator"];
        cfg.markov_alpha = jg.value("alpha", cfg.markov_alpha);
        cfg.knn_k = jg.value("knn_k", cfg.knn_k);
        cfg.bandwidth_override = jg.value("bandwidth_override", cfg.bandwidth_override);
        cfg.workers = jg.value("workers", cfg.workers);
    }
    if (j.contains("ensemble")) {
        const auto& je = j["ensemble"];
        cfg.n_scenarios = je.value("n_scenarios", cfg.n_scenarios);
        if (je.contains("p_extreme")) {
            if (je["p_extreme"].is_number())
                cfg.p_extreme = format9(je["p_extreme"].get<double>());
            else
                cfg.p_extreme = je["p_extreme"].get<std::string>();
        }
        cfg.target_month = je.value("target_month", cfg.target_month);
        cfg.target_year = je.value("target_year", cfg.target_year);
        cfg.master_seed = je.value("master_seed", cfg.master_seed);
    }
    if (j.contains("calibration")) cfg.calibration = j["calibration"].value("source", "none");
    if (j.contains("ar")) {
        cfg.ar_p = j["ar"].value("p", cfg.ar_p);
        cfg.ar_d = j["ar"].value("d", cfg.ar_d);
    }
    if (j.contains("evaluate")) {
        cfg.qq_points = j["evaluate"].value("qq_points", cfg.qq_points);
        cfg.qq_wet_only = j["evaluate"].value("wet_only", cfg.qq_wet_only);
    }
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    return cfg;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

inline ModelBundle fit_bundle(const PipelineConfig& cfg) {
    cfg.validate();
    const DailySeries series = read_daily_csv(cfg.input, cfg.csv);
    if (series.has_missing())
        throw_domain("input contains missing values; models require a complete record");

    ModelBundle bundle;
    bundle.fingerprint = fingerprint_file(cfg.input);
    bundle.extreme_definition =
        define_extreme(series, cfg.extreme_percentile, cfg.wet_threshold);
    if (bundle.extreme_definition.degenerate)
        bundle.warnings.push_back("degenerate extreme definition: threshold at sample minimum");
    bundle.per_month_extreme = cfg.per_month_extreme;
    if (cfg.per_month_extreme)
        bundle.monthly_extreme =
            define_extreme_per_month(series, cfg.extreme_percentile, cfg.wet_threshold);

    const StateSequence states =
        cfg.per_month_extreme
            ? classify_per_month(series, bundle.monthly_extreme, bundle.extreme_definition)
            : classify(series, bundle.extreme_definition);
    bool any_extreme_day = false;
    for (OccurrenceState s : states.states)
        if (s == OccurrenceState::Extreme) any_extreme_day = true;
    if (!any_extreme_day)
        bundle.warnings.push_back("no extreme days at the configured percentile");

    bundle.climatology = fit_climatology(series);
    const AnnualTotals totals = annual_totals(series);
    bundle.annual_totals = totals.totals;
    bundle.ar_model = fit_annual_ar(totals.totals, cfg.ar_p, cfg.ar_d);
    if (bundle.ar_model.intercept_only)
        bundle.warnings.push_back("annual AR fit is rank-deficient; using intercept-only model");

    bundle.markov = fit_markov(states, cfg.markov_alpha);
    IntensityFitOptions fit_options;
    fit_options.knn_k = cfg.knn_k;
    fit_options.bandwidth = cfg.bandwidth_override;
    bundle.intensity =
        cfg.per_month_extreme
            ? fit_intensity(series, states, bundle.monthly_extreme, bundle.extreme_definition,
                            fit_options)
            : fit_intensity(series, states, bundle.extreme_definition, fit_options);

    // Threshold method on wet-day amounts; skipped when too sparse.
    {
        std::vector<double> wet_values;
        for (double v : series.values)
            if (v >= bundle.extreme_definition.wet_threshold) wet_values.push_back(v);
        if (wet_values.size() >= 10) {
            const double u = empirical_quantile(wet_values, cfg.gpd_threshold_percentile);
            try {
                bundle.gpd = fit_gpd(series, u);
            } catch (const Error& e) {
                bundle.warnings.push_back(std::string("GPD fit skipped: ") + e.what());
            }
        } else {
            bundle.warnings.push_back("GPD fit skipped: too few wet days");
        }
    }
    try {
        bundle.gev = fit_gev_monthly(series);
    } catch (const Error& e) {
        bundle.warnings.push_back(std::string("GEV fit skipped: ") + e.what());
    }

    for (int month = 1; month <= 12; ++month) {
        try {
            bundle.empirical_extreme_p[static_cast<std::size_t>(month - 1)] =
                empirical_extreme_probability(states, month).p;
        } catch (const Error&) {
            // month without a complete instance; leave absent
        }
    }
    return bundle;
}

inline std::filesystem::path bundle_path(const PipelineConfig& cfg) {
    return std::filesystem::path(cfg.output_dir) / "model.json";
}

inline int cmd_fit(const PipelineConfig& cfg) {
    const ModelBundle bundle = fit_bundle(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = bundle_path(cfg);
    save_bundle(path.string(), bundle);
    log_info("wrote model bundle to " + path.string());
    for (const std::string& w : bundle.warnings) log_warn(w);
    return 0;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

// The definition governing the target month: the month's own in per-month
// mode, the global one otherwise.
inline ExtremeDefinition definition_for_month(const ModelBundle& bundle, int month) {
    if (bundle.per_month_extreme) {
        const auto& def = bundle.monthly_extreme[static_cast<std::size_t>(month - 1)];
        if (def) return *def;
    }
    return bundle.extreme_definition;
}

inline double resolve_p_extreme(const PipelineConfig& cfg, const ModelBundle& bundle) {
    if (cfg.p_extreme == "from:empirical") {
        const auto& p = bundle.empirical_extreme_p[static_cast<std::size_t>(cfg.target_month - 1)];
        if (!p)
            throw_domain("no empirical extreme probability for month " +
                         std::to_string(cfg.target_month));
        return *p;
    }
    if (cfg.p_extreme == "from:gpd") {
        if (!bundle.gpd) throw_domain("bundle has no GPD fit for p_extreme=from:gpd");
        const int ndays = days_in_month(cfg.target_year > 0 ? cfg.target_year : 2001,
                                        cfg.target_month);
        return prob_extreme_from_fit(*bundle.gpd, definition_for_month(bundle, cfg.target_month),
                                     ndays)
            .p;
    }
    char* end = nullptr;
    const double p = std::strtod(cfg.p_extreme.c_str(), &end);
    if (end == cfg.p_extreme.c_str() || *end != '\0' || !(p >= 0.0 && p <= 1.0))
        throw_usage("p_extreme must be a probability, 'from:empirical' or 'from:gpd'");
    return p;
}

inline std::optional<MeanForecast> resolve_calibration_target(const PipelineConfig& cfg,
                                                              const ModelBundle& bundle) {
    if (cfg.calibration == "none" || cfg.calibration.empty()) return std::nullopt;
    MeanForecast annual;
    if (cfg.calibration == "climatology") {
        annual = climatology_annual_forecast(bundle.climatology);
    } else if (cfg.calibration == "ar_model") {
        const int last_year = bundle.annual_totals.back().first;
        const int horizon = cfg.target_year > last_year ? cfg.target_year - last_year : 1;
        const auto forecasts = forecast_annual(bundle.ar_model, bundle.annual_totals, horizon);
        annual = forecasts.back();
    } else if (cfg.calibration.rfind("tercile:", 0) == 0) {
        const TercileCategory cat = parse_tercile_category(cfg.calibration.substr(8));
        annual = tercile_to_target(cat, bundle.climatology);
    } else {
        throw_usage("unknown calibration source '" + cfg.calibration + "'");
    }
    return annual_to_month_target(annual, bundle.climatology, cfg.target_month, cfg.target_year);
}

inline std::string scenario_filename(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "scenario_%04zu.csv", index);
    return std::string(buf);
}

inline void write_scenario_set(const std::filesystem::path& dir, const ScenarioSet& set,
                               const PipelineConfig& cfg, double resolved_p,
                               const std::optional<MeanForecast>& target) {
    namespace fs = std::filesystem;
    const fs::path scenario_dir = dir / "scenarios";
    fs::create_directories(scenario_dir);

    nlohmann::ordered_json manifest;
    manifest["kind"] = "stormgen_scenario_set";
    manifest["schema_version"] = 1;
    manifest["n_scenarios"] = set.spec.n_scenarios;
    manifest["p_extreme"] = round9(resolved_p);
    manifest["n_extreme_scenarios"] = set.n_extreme();
    manifest["target_month"] = set.spec.target_month;
    manifest["target_year"] = set.spec.target_year;
    manifest["master_seed"] = set.spec.master_seed;
    manifest["wet_threshold"] = round9(cfg.wet_threshold);
    manifest["calibration"]["source"] = cfg.calibration;
    if (target) {
        manifest["calibration"]["target_mean"] = round9(target->mean);
        manifest["calibration"]["factor"] = round9(set.calibration_factor);
    }

    nlohmann::ordered_json scenarios = nlohmann::ordered_json::array();
    for (const Scenario& s : set.scenarios) {
        write_daily_csv((scenario_dir / scenario_filename(s.index)).string(), s.series, 9);
        nlohmann::ordered_json js;
        js["index"] = s.index;
        js["file"] = "scenarios/" + scenario_filename(s.index);
        js["seed"] = s.seed;
        js["contains_extreme"] = s.contains_extreme;
        js["rejections_used"] = s.rejections_used;
        js["forced"] = s.forced;
        js["total_mm"] = round9(s.total());
        scenarios.push_back(js);
    }
    manifest["scenarios"] = scenarios;

    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw_io("cannot write '" + (dir / "manifest.json").string() + "'");
    out << manifest.dump(2) << "\n";
}

inline int cmd_generate(const PipelineConfig& cfg, bool force = false) {
    cfg.validate();
    const auto bpath = bundle_path(cfg);
    if (!std::filesystem::exists(bpath))
        throw_io("missing bundle file '" + bpath.string() + "' (run fit first)");
    const ModelBundle bundle = load_bundle(bpath.string());

    if (!force) {
        if (!std::filesystem::exists(cfg.input))
            throw_io("cannot verify bundle fingerprint: missing input '" + cfg.input +
                     "' (use --force to skip)");
        const std::string current = fingerprint_file(cfg.input);
        if (current != bundle.fingerprint)
            throw_domain("bundle fingerprint mismatch for '" + cfg.input +
                         "' (refit or use --force)");
    }

    EnsembleSpec spec;
    spec.n_scenarios = cfg.n_scenarios;
    spec.p_extreme = resolve_p_extreme(cfg, bundle);
    spec.target_month = cfg.target_month;
    spec.target_year = cfg.target_year;
    spec.master_seed = cfg.master_seed;
    const std::optional<MeanForecast> target = resolve_calibration_target(cfg, bundle);
    spec.calibration_target = target;

    const ExtremeDefinition def = definition_for_month(bundle, cfg.target_month);
    ScenarioSet set = generate_ensemble(spec, bundle.markov, bundle.intensity, def, cfg.workers);
    if (target)
        set = calibrate(std::move(set), *target, bundle.markov, bundle.intensity, def,
                        cfg.workers);

    write_scenario_set(cfg.output_dir, set, cfg, spec.p_extreme, target);
    log_info("wrote " + std::to_string(set.scenarios.size()) + " scenarios to " +
             cfg.output_dir);
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

inline int cmd_evaluate(const PipelineConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path))
        throw_io("missing manifest '" + manifest_path.string() + "' (run generate first)");

    nlohmann::ordered_json manifest;
    {
        std::ifstream in(manifest_path, std::ios::binary);
        in >> manifest;
    }
    const int target_month = manifest.at("target_month").get<int>();
    const double p_extreme = manifest.at("p_extreme").get<double>();

    const DailySeries historical = read_daily_csv(cfg.input, cfg.csv);
    const auto bpath = bundle_path(cfg);
    if (!fs::exists(bpath)) throw_io("missing bundle file '" + bpath.string() + "'");
    const ModelBundle bundle = load_bundle(bpath.string());
    const ExtremeDefinition def = definition_for_month(bundle, target_month);

    // Pool simulated days against the same calendar month of the record;
    // spells compare per month instance, matching the scenario layout.
    std::vector<double> sim_pool;
    std::vector<DailySeries> scenarios;
    for (const auto& js : manifest.at("scenarios")) {
        const fs::path file = dir / js.at("file").get<std::string>();
        CsvOptions plain;
        DailySeries s = read_daily_csv(file.string(), plain);
        for (double v : s.values) sim_pool.push_back(v);
        scenarios.push_back(std::move(s));
    }

    std::vector<double> hist_pool;
    double hist_dry_mean = 0.0, hist_wet_mean = 0.0, hist_extreme = 0.0;
    std::size_t hist_dry_max = 0, hist_wet_max = 0, hist_instances = 0;
    {
        const auto slices = monthly_slices(historical);
        const auto it = slices.find(target_month);
        if (it == slices.end())
            throw_domain("historical record has no data for month " +
                         std::to_string(target_month));
        for (const MonthRun& run : it->second) {
            DailySeries instance;
            instance.start_date = historical.date_at(run.start_index);
            instance.values.assign(
                historical.values.begin() + static_cast<std::ptrdiff_t>(run.start_index),
                historical.values.begin() +
                    static_cast<std::ptrdiff_t>(run.start_index + run.length));
            for (double v : instance.values) hist_pool.push_back(v);
            if (run.partial) continue;
            const SpellStats st = spell_stats(classify(instance, def));
            hist_dry_mean += st.dry_mean;
            hist_wet_mean += st.wet_mean;
            hist_extreme += static_cast<double>(st.extreme_days);
            hist_dry_max = std::max(hist_dry_max, st.dry_max);
            hist_wet_max = std::max(hist_wet_max, st.wet_max);
            ++hist_instances;
        }
    }
    if (hist_instances > 0) {
        hist_dry_mean /= static_cast<double>(hist_instances);
        hist_wet_mean /= static_cast<double>(hist_instances);
        hist_extreme /= static_cast<double>(hist_instances);
    }

    if (cfg.qq_wet_only) {
        auto keep_wet = [&](std::vector<double>& pool) {
            std::vector<double> wet;
            for (double v : pool)
                if (v >= def.wet_threshold) wet.push_back(v);
            pool = std::move(wet);
        };
        keep_wet(sim_pool);
        keep_wet(hist_pool);
        if (sim_pool.empty() || hist_pool.empty())
            throw_domain("wet-only pools are empty");
    }

    const QQData qq = qq_data(sim_pool, hist_pool, cfg.qq_points);
    const double ks = ks_statistic(sim_pool, hist_pool);

    double sim_dry_mean = 0.0, sim_wet_mean = 0.0, sim_extreme = 0.0;
    std::size_t sim_dry_max = 0, sim_wet_max = 0;
    for (const DailySeries& s : scenarios) {
        const SpellStats st = spell_stats(classify(s, def));
        sim_dry_mean += st.dry_mean;
        sim_wet_mean += st.wet_mean;
        sim_extreme += static_cast<double>(st.extreme_days);
        sim_dry_max = std::max(sim_dry_max, st.dry_max);
        sim_wet_max = std::max(sim_wet_max, st.wet_max);
    }
    const double n_scen = static_cast<double>(scenarios.size());
    sim_dry_mean /= n_scen;
    sim_wet_mean /= n_scen;
    sim_extreme /= n_scen;

    fs::create_directories(dir / "eval");
    {
        std::ofstream out(dir / "eval" / "qq.csv", std::ios::binary);
        if (!out) throw_io("cannot write qq.csv");
        out << "level,sim_q,hist_q\n";
        for (std::size_t i = 0; i < qq.probs.size(); ++i)
            out << format9(qq.probs[i]) << ',' << format9(qq.sim_q[i]) << ','
                << format9(qq.hist_q[i]) << '\n';
    }

    nlohmann::ordered_json report;
    report["kind"] = "stormgen_evaluation";
    report["schema_version"] = 1;
    report["n_scenarios"] = scenarios.size();
    report["target_month"] = target_month;
    report["pool"] = cfg.qq_wet_only ? "wet_days" : "all_days";
    report["ks"] = round9(ks);
    report["spells"]["historical_mean"] = {{"dry_mean", round9(hist_dry_mean)},
                                           {"dry_max", hist_dry_max},
                                           {"wet_mean", round9(hist_wet_mean)},
                                           {"wet_max", hist_wet_max},
                                           {"extreme_days", round9(hist_extreme)},
                                           {"n_instances", hist_instances}};
    report["spells"]["simulated_mean"] = {{"dry_mean", round9(sim_dry_mean)},
                                          {"dry_max", sim_dry_max},
                                          {"wet_mean", round9(sim_wet_mean)},
                                          {"wet_max", sim_wet_max},
                                          {"extreme_days", round9(sim_extreme)}};

    // CRPS of scenario period totals and Brier of the extreme-occurrence
    // forecast, both against held-out observations when provided.
    if (cfg.heldout.empty()) {
        report["crps"] = "skipped";
        report["brier"] = "skipped";
    } else {
        const DailySeries heldout = read_daily_csv(cfg.heldout, cfg.csv);
        std::vector<double> obs_totals;
        std::vector<int> obs_extreme;
        const auto slices = monthly_slices(heldout);
        const auto it = slices.find(target_month);
        if (it != slices.end()) {
            for (const MonthRun& run : it->second) {
                if (run.partial) continue;
                double total = 0.0;
                bool has_extreme = false;
                for (std::size_t i = 0; i < run.length; ++i) {
                    const double v = heldout.values[run.start_index + i];
                    total += v;
                    has_extreme = has_extreme || v >= def.extreme_threshold;
                }
                obs_totals.push_back(total);
                obs_extreme.push_back(has_extreme ? 1 : 0);
            }
        }
        if (obs_totals.empty()) {
            report["crps"] = "skipped";
            report["brier"] = "skipped";
        } else {
            std::vector<double> ensemble_totals;
            for (const DailySeries& s : scenarios) {
                double total = 0.0;
                for (double v : s.values) total += v;
                ensemble_totals.push_back(total);
            }
            double crps_sum = 0.0;
            for (double obs : obs_totals) crps_sum += crps_ensemble(ensemble_totals, obs);
            report["crps"] = {{"mean_mm", round9(crps_sum / static_cast<double>(obs_totals.size()))},
                              {"n_periods", obs_totals.size()}};
            const std::vector<double> forecasts(obs_extreme.size(), p_extreme);
            report["brier"] = {{"score", round9(brier_score(forecasts, obs_extreme))},
                               {"n_periods", obs_extreme.size()}};
        }
    }

    std::ofstream out(dir / "eval" / "metrics.json", std::ios::binary);
    if (!out) throw_io("cannot write metrics.json");
    out << report.dump(2) << "\n";
    log_info("wrote evaluation to " + (dir / "eval").string());
    return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

inline int cmd_report(const PipelineConfig& cfg, std::ostream& out) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    const fs::path metrics_path = dir / "eval" / "metrics.json";
    if (!fs::exists(metrics_path))
        throw_io("missing metrics '" + metrics_path.string() + "' (run evaluate first)");

    nlohmann::ordered_json metrics;
    {
        std::ifstream in(metrics_path, std::ios::binary);
        in >> metrics;
    }
    std::ostringstream text;
    text << "stormgen evaluation report\n";
    text << "==========================\n";
    text << "scenarios:       " << metrics.at("n_scenarios").get<std::size_t>() << "\n";
    text << "target month:    " << metrics.at("target_month").get<int>() << "\n";
    text << "value pool:      " << metrics.at("pool").get<std::string>() << "\n";
    text << "KS distance:     " << format9(metrics.at("ks").get<double>()) << "\n";
    const auto& hs = metrics.at("spells").at("historical_mean");
    const auto& ss = metrics.at("spells").at("simulated_mean");
    text << "dry spells:      hist mean " << format9(hs.at("dry_mean").get<double>())
         << " / max " << hs.at("dry_max").get<std::size_t>() << ", sim mean "
         << format9(ss.at("dry_mean").get<double>()) << " / max "
         << ss.at("dry_max").get<std::size_t>() << "\n";
    text << "wet spells:      hist mean " << format9(hs.at("wet_mean").get<double>())
         << " / max " << hs.at("wet_max").get<std::size_t>() << ", sim mean "
         << format9(ss.at("wet_mean").get<double>()) << " / max "
         << ss.at("wet_max").get<std::size_t>() << "\n";
    text << "extreme days:    hist mean " << format9(hs.at("extreme_days").get<double>())
         << " per month, sim mean " << format9(ss.at("extreme_days").get<double>()) << "\n";
    if (metrics.at("crps").is_string())
        text << "CRPS:            skipped (no held-out data)\n";
    else
        text << "CRPS:            " << format9(metrics.at("crps").at("mean_mm").get<double>())
             << " mm over " << metrics.at("crps").at("n_periods").get<std::size_t>()
             << " period(s)\n";
    if (metrics.at("brier").is_string())
        text << "Brier:           skipped (no held-out data)\n";
    else
        text << "Brier:           " << format9(metrics.at("brier").at("score").get<double>())
             << " over " << metrics.at("brier").at("n_periods").get<std::size_t>()
             << " period(s)\n";

    const std::string body = text.str();
    out << body;
    std::ofstream file(dir / "report.txt", std::ios::binary);
    if (!file) throw_io("cannot write report.txt");
    file << body;
    return 0;
}

} // namespace stormgen
