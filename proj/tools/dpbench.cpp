#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "dpbench/cli/commands.hpp"

using namespace dpbench;

namespace {

/// --out, then the config's [run] output, then $DPBENCH_OUT, then ./dpbench-out.
std::filesystem::path output_dir(const std::string& flag, const std::optional<std::filesystem::path>& configured = {}) {
    if (!flag.empty()) return flag;
    if (configured) return *configured;
    if (const char* env = std::getenv("DPBENCH_OUT"); env != nullptr && *env != '\0') return env;
    return "dpbench-out";
}

bench_config config_for(const std::string& config_path, const std::string& preset) {
    if (!config_path.empty() && !preset.empty()) throw parse_error("use either --config or --preset, not both");
    if (!config_path.empty()) return load_config(config_path);
    if (!preset.empty()) return preset_config(preset);
    throw parse_error("one of --config or --preset is required");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark differentially private range-query algorithms"};
    app.require_subcommand(1);

    std::string config_path, preset, out_flag, suite = "budget", summary_path, algorithms;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    std::size_t trials = 0;

    auto* run = app.add_subcommand("run", "Run a benchmark grid and write trial and summary CSVs");
    run->add_option("--config", config_path, "Config file");
    run->add_option("--preset", preset, "desk-1d, desk-2d, full-1d or full-2d");

    auto* tune = app.add_subcommand("tune", "Learn a parameter table for mwem_star or ahp_star");
    tune->add_option("--config", config_path, "Config file with a [tune] section")->required();

    auto* check = app.add_subcommand("check", "Run a property suite");
    check->add_option("--suite", suite, "exchangeability, consistency or budget")->required();
    check->add_option("--algorithms", algorithms, "Comma-separated subset of algorithms");
    check->add_option("--trials", trials, "Trials per comparison (suite default when omitted)");

    auto* report = app.add_subcommand("report", "Export plot data from a summary CSV");
    report->add_option("--summary", summary_path, "summary.csv written by run")->required();

    for (auto* sub : {run, tune, check, report}) {
        sub->add_option("--out", out_flag, "Output directory (default: $DPBENCH_OUT or ./dpbench-out)");
        sub->add_option("--workers", workers, "Worker threads");
    }
    std::optional<std::uint64_t> seed_override;
    for (auto* sub : {run, tune, check})
        sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { seed_override = s; },
                                                "Override the configured seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        /// --help exits 0; bad flags count as configuration errors
        return app.exit(e) == 0 ? exit_ok : exit_config;
    }
    command_options opts;
    opts.out_dir = output_dir(out_flag);
    opts.workers = std::max<std::size_t>(1, workers);

    try {
        if (run->parsed()) {
            auto cfg = config_for(config_path, preset);
            if (seed_override) {
                cfg.seed = *seed_override;
                cfg.has_seed = true;
            }
            opts.out_dir = output_dir(out_flag, cfg.output_dir);
            return cmd_run(cfg, opts);
        }
        if (tune->parsed()) {
            auto cfg = load_config(config_path);
            if (seed_override) {
                cfg.seed = *seed_override;
                cfg.has_seed = true;
            }
            opts.out_dir = output_dir(out_flag, cfg.output_dir);
            return cmd_tune(cfg, opts);
        }
        if (check->parsed()) {
            check_options co;
            if (seed_override) co.seed = *seed_override;
            if (trials > 0) co.exchangeability_trials = co.consistency_trials = trials;
            co.algorithms = detail::list_of(algorithms);
            for (const auto& a : co.algorithms) find_algorithm(a);
            return cmd_check(suite, co, opts);
        }
        return cmd_report(summary_path, opts);
    } catch (const parse_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return exit_io;
    } catch (const invalid_input& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failed;
    }
}
