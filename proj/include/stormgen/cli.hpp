#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stormgen/errors.hpp"
#include "stormgen/log.hpp"
#include "stormgen/pipeline.hpp"

namespace stormgen {

// Exit codes: 0 ok, 1 domain error, 2 usage/IO error. Every error path
// prints a single "stormgen: error: ..." line on stderr.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"stochastic daily-precipitation scenario toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    bool force = false;

    app.add_option("--config", config_path, "pipeline configuration file (JSON)");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "master seed (overrides config)");
    app.add_option("--workers", workers, "generation worker threads (overrides config)");
    app.add_flag("--force", force, "skip the bundle fingerprint check");

    CLI::App* fit = app.add_subcommand("fit", "fit all model components and write a bundle");
    CLI::App* generate =
        app.add_subcommand("generate", "generate a conditioned scenario ensemble");
    CLI::App* evaluate = app.add_subcommand("evaluate", "compute verification metrics");
    CLI::App* report = app.add_subcommand("report", "print a roll-up of evaluate outputs");
    for (CLI::App* sub : {fit, generate, evaluate, report}) sub->fallthrough();

    // CLI11 wants argv in reverse order for its vector overload.
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "stormgen: error: usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (config_path.empty()) throw_usage("--config is required");
        PipelineConfig cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed) cfg.master_seed = *seed;
        if (workers) cfg.workers = *workers;

        if (app.got_subcommand(fit)) return cmd_fit(cfg);
        if (app.got_subcommand(generate)) return cmd_generate(cfg, force);
        if (app.got_subcommand(evaluate)) return cmd_evaluate(cfg);
        if (app.got_subcommand(report)) return cmd_report(cfg, out);
        throw_usage("no subcommand given");
    } catch (const Error& e) {
        err << "stormgen: error: " << e.what() << "\n";
        return e.kind() == ErrorKind::domain ? 1 : 2;
    } catch (const std::exception& e) {
        err << "stormgen: error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace stormgen
