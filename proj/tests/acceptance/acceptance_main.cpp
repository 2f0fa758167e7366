// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Runs standalone (no test framework) so the output stays
// a stable, machine-parseable checklist.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "stormgen/stormgen.hpp"

#include "support/fixture.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace stormgen;

namespace {

struct Criterion {
    std::string name;
    std::function<void(std::ostringstream&)> run; // throws on failure
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Shared scratch space for the pipeline-level criteria.
struct Workspace {
    fs::path root;
    fs::path hist_csv;
    ModelBundle bundle;

    Workspace() {
        root = fs::temp_directory_path() / "stormgen_acceptance";
        fs::remove_all(root);
        fs::create_directories(root);
        hist_csv = root / "hist.csv";
        write_daily_csv(hist_csv.string(), fixture::synthetic_series());

        PipelineConfig cfg;
        cfg.input = hist_csv.string();
        cfg.output_dir = (root / "fit").string();
        cfg.wet_threshold = fixture::kWetThreshold;
        bundle = fit_bundle(cfg);
    }

    ~Workspace() {
        std::error_code ec;
        fs::remove_all(root, ec);
    }
};

Workspace& workspace() {
    static Workspace ws;
    return ws;
}

// --------------------------------------------------------------------------
// 1. conditioning contract
// --------------------------------------------------------------------------

void criterion_conditioning(std::ostringstream& detail) {
    const Workspace& ws = workspace();
    std::size_t checked = 0;
    for (int pi = 0; pi <= 10; ++pi) {
        const double p = static_cast<double>(pi) / 10.0;
        for (std::size_t n : {std::size_t{1}, std::size_t{10}, std::size_t{100}}) {
            EnsembleSpec spec;
            spec.n_scenarios = n;
            spec.p_extreme = p;
            spec.target_month = 1;
            spec.master_seed = 1234;
            const ScenarioSet set = generate_ensemble(spec, ws.bundle.markov,
                                                      ws.bundle.intensity,
                                                      ws.bundle.extreme_definition);
            const std::size_t expected = round_half_even(p * static_cast<double>(n));
            require(set.n_extreme() == expected,
                    "P=" + std::to_string(p) + " N=" + std::to_string(n) + ": got " +
                        std::to_string(set.n_extreme()) + ", want " + std::to_string(expected));
            // flags must agree with reclassification
            for (const Scenario& s : set.scenarios) {
                bool has = false;
                for (OccurrenceState st : classify(s.series, ws.bundle.extreme_definition).states)
                    has = has || st == OccurrenceState::Extreme;
                require(has == s.contains_extreme, "flag inconsistent with classify()");
            }
            ++checked;
        }
    }
    detail << checked << " ensembles, exact split everywhere";
}

// --------------------------------------------------------------------------
// 2. extreme threshold (bundled fixture always; Maurer Boston when supplied)
// --------------------------------------------------------------------------

void criterion_threshold(std::ostringstream& detail) {
    const DailySeries series = fixture::synthetic_series();
    const ExtremeDefinition def = define_extreme(series, 0.95, fixture::kWetThreshold);
    require(std::fabs(def.extreme_threshold - fixture::kPercentile95) <= 1e-9,
            "fixture percentile: got " + format9(def.extreme_threshold));
    detail << "fixture 95th percentile = " << format9(def.extreme_threshold) << " mm/day";

    if (const char* path = std::getenv("STORMGEN_MAURER_BOSTON_CSV")) {
        const DailySeries boston = read_daily_csv(path);
        const ExtremeDefinition bdef = define_extreme(boston, 0.95);
        require(std::fabs(bdef.extreme_threshold - 18.2) <= 0.1,
                "Boston 95th percentile: got " + format9(bdef.extreme_threshold));
        detail << "; Boston cell = " << format9(bdef.extreme_threshold) << " mm/day";
    } else {
        detail << "; Maurer check skipped (STORMGEN_MAURER_BOSTON_CSV unset)";
    }
}

// --------------------------------------------------------------------------
// 3. Markov recovery
// --------------------------------------------------------------------------

double matrix_inf_norm_diff(const TransitionMatrix& a, const TransitionMatrix& b) {
    double worst = 0.0;
    for (int row = 0; row < 3; ++row) {
        double sum = 0.0;
        for (int col = 0; col < 3; ++col) sum += std::fabs(a[row][col] - b[row][col]);
        worst = std::max(worst, sum);
    }
    return worst;
}

MonthlyMarkovModel truth_chain() {
    // Sticky spell-like regimes. The rows are concentrated on purpose: at
    // 1e5 days each (month, from-state) cell sees ~2.8e3 transitions, and
    // entry probabilities near 0 or 1 keep the multinomial noise of the
    // row-wise L1 error safely inside the 0.02 tolerance.
    MonthlyMarkovModel model;
    for (int m = 0; m < 12; ++m) {
        auto& mm = model.months[static_cast<std::size_t>(m)];
        mm.fitted = true;
        const double d = 0.982 - 0.002 * (m % 4);
        const double a = 0.008 + 0.002 * (m % 3);
        const double b = 1.0 - d - a;
        mm.transition = {{{d, a, b}, {b, d, a}, {a, b, d}}};
        mm.initial = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    }
    model.validate();
    return model;
}

void criterion_markov_recovery(std::ostringstream& detail) {
    const MonthlyMarkovModel truth = truth_chain();

    // test-side simulator (destination-month attribution), 1e5 days
    const std::size_t n_days = 100000;
    StateSequence seq;
    seq.start_date = Date{1700, 1, 1};
    seq.states.reserve(n_days);
    Rng rng(777001);
    for (std::size_t i = 0; i < n_days; ++i) {
        const Date d = add_days(seq.start_date, static_cast<std::int64_t>(i));
        const auto& mm = truth.months[static_cast<std::size_t>(d.month - 1)];
        const StateDistribution& dist =
            i == 0 ? mm.initial
                   : mm.transition[static_cast<std::size_t>(state_index(seq.states.back()))];
        const double u = rng.next_double();
        seq.states.push_back(u < dist[0] ? OccurrenceState::Dry
                                         : (u < dist[0] + dist[1] ? OccurrenceState::Wet
                                                                  : OccurrenceState::Extreme));
    }

    const MonthlyMarkovModel fitted = fit_markov(seq);
    double worst_fit = 0.0;
    for (int m = 1; m <= 12; ++m)
        worst_fit = std::max(worst_fit,
                             matrix_inf_norm_diff(fitted.month(m).transition,
                                                  truth.month(m).transition));
    require(worst_fit < 0.02,
            "fitted vs truth inf-norm " + format9(worst_fit) + " (tolerance 0.02)");

    // re-simulate from the fitted model and recount transitions by brute force
    Rng rng2(777002);
    const StateSequence resim = simulate_daily_states(fitted, Date{1700, 1, 1}, n_days, rng2);
    std::array<std::array<std::array<double, 3>, 3>, 12> counts = {};
    for (std::size_t i = 1; i < resim.size(); ++i) {
        const Date d = resim.date_at(i);
        counts[static_cast<std::size_t>(d.month - 1)]
              [static_cast<std::size_t>(state_index(resim.states[i - 1]))]
              [static_cast<std::size_t>(state_index(resim.states[i]))] += 1.0;
    }
    double worst_resim = 0.0;
    for (int m = 0; m < 12; ++m) {
        TransitionMatrix empirical = {};
        for (int row = 0; row < 3; ++row) {
            const double total = counts[m][row][0] + counts[m][row][1] + counts[m][row][2];
            require(total > 0.0, "re-simulation starved a from-state");
            for (int col = 0; col < 3; ++col) empirical[row][col] = counts[m][row][col] / total;
        }
        worst_resim = std::max(
            worst_resim,
            matrix_inf_norm_diff(empirical, fitted.months[static_cast<std::size_t>(m)].transition));
    }
    require(worst_resim < 0.02,
            "re-simulated vs fitted inf-norm " + format9(worst_resim) + " (tolerance 0.02)");
    detail << "fit err " << format9(worst_fit) << ", re-sim err " << format9(worst_resim)
           << " (inf-norm, tol 0.02)";
}

// --------------------------------------------------------------------------
// 4. EVT estimator correctness
// --------------------------------------------------------------------------

void criterion_evt(std::ostringstream& detail) {
    const std::size_t n = 100000;

    // GPD, exponential case (xi = 0, sigma = 5)
    {
        Rng rng(888001);
        DailySeries s;
        s.start_date = Date{1900, 1, 1};
        s.values.resize(n);
        for (double& v : s.values)
            v = 10.0 + oracles::exponential_quantile(rng.next_double(), 5.0);
        const GPDFit fit = fit_gpd(s, 10.0);
        require(std::fabs(fit.shape) <= 0.02, "GPD exp shape " + format9(fit.shape));
        require(std::fabs(fit.scale - 5.0) <= 0.1, "GPD exp scale " + format9(fit.scale));
    }
    // GPD, heavy tail (xi = 0.2, sigma = 10)
    {
        Rng rng(888002);
        DailySeries s;
        s.start_date = Date{1900, 1, 1};
        s.values.resize(n);
        for (double& v : s.values) v = 5.0 + oracles::gpd_quantile(rng.next_double(), 0.2, 10.0);
        const GPDFit fit = fit_gpd(s, 5.0);
        require(std::fabs(fit.shape - 0.2) <= 0.02, "GPD shape " + format9(fit.shape));
        require(std::fabs(fit.scale - 10.0) <= 0.2, "GPD scale " + format9(fit.scale));
    }
    // GEV, Gumbel case (mu = 30, sigma = 8, xi = 0)
    {
        Rng rng(888003);
        DailySeries s;
        s.start_date = Date{1900, 1, 1};
        s.values.resize(n);
        for (double& v : s.values) v = oracles::gev_quantile(rng.next_double(), 30.0, 8.0, 0.0);
        const GEVFit fit = fit_gev(s, 1);
        require(std::fabs(fit.shape) <= 0.02, "GEV Gumbel shape " + format9(fit.shape));
        require(std::fabs(fit.scale - 8.0) <= 0.16, "GEV Gumbel scale " + format9(fit.scale));
        require(std::fabs(fit.location - 30.0) <= 0.2, "GEV Gumbel loc " + format9(fit.location));
    }
    // GEV, bounded tail (xi = -0.1)
    {
        Rng rng(888004);
        DailySeries s;
        s.start_date = Date{1900, 1, 1};
        s.values.resize(n);
        for (double& v : s.values) v = oracles::gev_quantile(rng.next_double(), 30.0, 8.0, -0.1);
        const GEVFit fit = fit_gev(s, 1);
        require(std::fabs(fit.shape - (-0.1)) <= 0.02, "GEV shape " + format9(fit.shape));
        require(std::fabs(fit.scale - 8.0) <= 0.16, "GEV scale " + format9(fit.scale));
    }
    detail << "GPD(xi 0/0.2) and GEV(xi 0/-0.1) recovered on 1e5 inverse-CDF samples";
}

// --------------------------------------------------------------------------
// 5. CRPS oracle equivalence + Brier hand values
// --------------------------------------------------------------------------

void criterion_scores(std::ostringstream& detail) {
    Rng rng(999001);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> ensemble(1 + rng.next_index(20));
        for (double& x : ensemble) x = 60.0 * rng.next_double() - 20.0;
        const double obs = 60.0 * rng.next_double() - 20.0;
        const double diff = std::fabs(crps_ensemble(ensemble, obs) -
                                      oracles::crps_by_integration(ensemble, obs));
        worst = std::max(worst, diff);
    }
    require(worst <= 1e-6, "CRPS vs integration worst diff " + format9(worst));

    require(brier_score(std::vector<double>{1.0}, std::vector<int>{1}) == 0.0,
            "Brier perfect forecast");
    require(std::fabs(brier_score(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 1}) - 0.25) <=
                1e-12,
            "Brier constant-half");
    require(std::fabs(brier_score(std::vector<double>{0.3, 0.7, 0.9}, std::vector<int>{0, 1, 1}) -
                      0.19 / 3.0) <= 1e-12,
            "Brier hand value");
    detail << "CRPS worst |closed-form - integral| = " << format9(worst)
           << "; Brier hand values exact";
}

// --------------------------------------------------------------------------
// 6. QQ fidelity
// --------------------------------------------------------------------------

void criterion_qq(std::ostringstream& detail) {
    const Workspace& ws = workspace();
    const DailySeries hist = fixture::synthetic_series();

    std::vector<double> sim_pool;
    for (int month = 1; month <= 12; ++month) {
        EnsembleSpec spec;
        spec.n_scenarios = 100;
        const auto& p = ws.bundle.empirical_extreme_p[static_cast<std::size_t>(month - 1)];
        spec.p_extreme = p ? *p : 0.0;
        spec.target_month = month;
        spec.master_seed = 50607;
        const ScenarioSet set = generate_ensemble(spec, ws.bundle.markov, ws.bundle.intensity,
                                                  ws.bundle.extreme_definition, 4);
        for (const Scenario& s : set.scenarios)
            for (double v : s.series.values)
                if (v > 0.0) sim_pool.push_back(v);
    }
    std::vector<double> hist_pool;
    for (double v : hist.values)
        if (v > 0.0) hist_pool.push_back(v);

    require(sim_pool.size() >= 10000,
            "simulated pool too small: " + std::to_string(sim_pool.size()));

    double worst_rel = 0.0;
    double worst_level = 0.0;
    for (int i = 1; i <= 19; ++i) {
        const double level = 0.05 * i;
        const double sq = empirical_quantile(sim_pool, level);
        const double hq = empirical_quantile(hist_pool, level);
        const double rel = std::fabs(sq - hq) / hq;
        if (rel > worst_rel) {
            worst_rel = rel;
            worst_level = level;
        }
    }
    require(worst_rel <= 0.10, "worst quantile deviation " + format9(worst_rel) + " at level " +
                                   format9(worst_level));

    const double ks = ks_statistic(sim_pool, hist_pool);
    require(ks < 0.05, "KS " + format9(ks));
    detail << "pool " << sim_pool.size() << " days, worst quantile dev "
           << format9(100.0 * worst_rel) << "% (tol 10%), KS " << format9(ks) << " (tol 0.05)";
}

// --------------------------------------------------------------------------
// 7. determinism across runs and worker counts
// --------------------------------------------------------------------------

fs::path run_pipeline_once(const fs::path& out_dir, unsigned workers) {
    const Workspace& ws = workspace();
    PipelineConfig cfg;
    cfg.input = ws.hist_csv.string();
    cfg.output_dir = out_dir.string();
    cfg.wet_threshold = fixture::kWetThreshold;
    cfg.n_scenarios = 80;
    cfg.p_extreme = "0.45";
    cfg.target_month = 1;
    cfg.master_seed = 31337;
    cfg.workers = workers;
    cfg.qq_points = 10;
    cfg.qq_wet_only = true;

    cmd_fit(cfg);
    cmd_generate(cfg);
    cmd_evaluate(cfg);
    std::ostringstream sink;
    cmd_report(cfg, sink);
    return out_dir;
}

void criterion_determinism(std::ostringstream& detail) {
    const Workspace& ws = workspace();
    const fs::path a = run_pipeline_once(ws.root / "det_w1", 1);
    const fs::path b = run_pipeline_once(ws.root / "det_w8", 8);
    const fs::path c = run_pipeline_once(ws.root / "det_again", 1);

    std::size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        const fs::path rel = fs::relative(entry.path(), a);
        const std::string bytes_a = slurp(entry.path());
        require(fs::exists(b / rel), "missing in 8-worker run: " + rel.string());
        require(bytes_a == slurp(b / rel), "differs between 1 and 8 workers: " + rel.string());
        require(bytes_a == slurp(c / rel), "differs between reruns: " + rel.string());
        ++files;
    }
    require(files >= 84, "expected scenario files plus reports, saw " + std::to_string(files));
    detail << files << " artifact files byte-identical across reruns and worker counts";
}

// --------------------------------------------------------------------------
// 8. calibration
// --------------------------------------------------------------------------

void criterion_calibration(std::ostringstream& detail) {
    // A 1.5x target must be reachable for the criterion to be satisfiable:
    // wet amounts need headroom below the extreme threshold (the bundled
    // fixture's wet grid runs right up to its 95th percentile, so scaling
    // it 1.5x can never keep non-extreme scenarios in class). This model
    // leaves that headroom yet still exercises regeneration: the 19 mm
    // pool value crosses the 20 mm threshold under the first scaling and
    // the offenders are rebuilt with the factor inside the sampler.
    MonthlyMarkovModel markov;
    auto& jan = markov.months[0];
    jan.fitted = true;
    jan.initial = {0.55, 0.40, 0.05};
    jan.transition = {{{0.65, 0.32, 0.03}, {0.40, 0.55, 0.05}, {0.30, 0.55, 0.15}}};
    markov.validate();

    const ExtremeDefinition def{0.1, 20.0, std::nullopt, false};
    IntensityModel intensity;
    intensity.set_thresholds(def.wet_threshold, def.extreme_threshold);
    auto& wet = intensity.wet[0];
    for (int i = 1; i <= 12; ++i) wet.values.push_back(static_cast<double>(i));
    wet.values.push_back(19.0);
    wet.bandwidth = 0.2;
    wet.knn_k = 4;
    auto& extreme = intensity.extreme[0];
    extreme.values = {30.0, 34.0, 40.0};
    extreme.bandwidth = 0.5;
    extreme.knn_k = 2;

    EnsembleSpec spec;
    spec.n_scenarios = 100;
    spec.p_extreme = 0.3;
    spec.target_month = 1;
    spec.master_seed = 424242;
    const ScenarioSet base = generate_ensemble(spec, markov, intensity, def);
    require(base.n_extreme() == 30, "base split wrong");

    double mean = 0.0;
    for (const Scenario& s : base.scenarios) mean += s.total();
    mean /= static_cast<double>(base.scenarios.size());

    MeanForecast target;
    target.mean = 1.5 * mean;
    const ScenarioSet calibrated = calibrate(base, target, markov, intensity, def);

    double new_mean = 0.0;
    for (const Scenario& s : calibrated.scenarios) new_mean += s.total();
    new_mean /= static_cast<double>(calibrated.scenarios.size());
    const double rel = std::fabs(new_mean - target.mean) / target.mean;
    require(rel <= 1e-9, "mean off target by " + format9(rel));

    std::size_t regenerated = 0;
    for (std::size_t i = 0; i < base.scenarios.size(); ++i) {
        const Scenario& before = base.scenarios[i];
        const Scenario& after = calibrated.scenarios[i];
        if (after.seed == before.seed) {
            // untouched scenario: the dry-day pattern is preserved
            for (std::size_t d = 0; d < before.series.values.size(); ++d)
                if (before.series.values[d] == 0.0)
                    require(after.series.values[d] == 0.0, "dry day gained precipitation");
        } else {
            ++regenerated;
        }
        for (std::size_t d = 0; d < after.series.values.size(); ++d)
            if (after.states[d] == OccurrenceState::Dry)
                require(after.series.values[d] == 0.0, "dry day gained precipitation");
    }

    require(calibrated.n_extreme() == round_half_even(0.3 * 100.0),
            "count contract broken after calibration: " +
                std::to_string(calibrated.n_extreme()));
    detail << "mean relative error " << format9(rel) << ", dry days exact zero, split 30/70 kept, "
           << regenerated << " scenario(s) regenerated";
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"criterion 1: conditioning contract (P*N split exact)", criterion_conditioning},
        {"criterion 2: extreme threshold on the bundled fixture", criterion_threshold},
        {"criterion 3: Markov recovery within 0.02", criterion_markov_recovery},
        {"criterion 4: EVT estimators on inverse-CDF samples", criterion_evt},
        {"criterion 5: CRPS/Brier oracle equivalence", criterion_scores},
        {"criterion 6: QQ fidelity of generated scenarios", criterion_qq},
        {"criterion 7: byte-identical determinism", criterion_determinism},
        {"criterion 8: calibration to 1.5x the ensemble mean", criterion_calibration},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::ostringstream detail;
        bool ok = true;
        std::string reason;
        try {
            criterion.run(detail);
        } catch (const std::exception& e) {
            ok = false;
            reason = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (ok) {
            std::printf("PASS  %s  [%s] (%.1fs)\n", criterion.name.c_str(),
                        detail.str().c_str(), seconds);
        } else {
            std::printf("FAIL  %s  [%s] (%.1fs)\n", criterion.name.c_str(), reason.c_str(),
                        seconds);
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
