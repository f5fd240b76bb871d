#pragma once

// Command implementations behind the dpbench executable.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dpbench/cli/config.hpp"
#include "dpbench/harness/checks.hpp"
#include "dpbench/harness/report.hpp"
#include "dpbench/harness/stats.hpp"
#include "dpbench/harness/trials.hpp"
#include "dpbench/harness/tuning.hpp"

namespace dpbench {

enum exit_code : int { exit_ok = 0, exit_config = 1, exit_failed = 2, exit_io = 3 };

struct command_options {
    std::filesystem::path out_dir = "dpbench-out";
    std::size_t workers = 1;
    std::ostream* log = &std::cerr;
};

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::error_code ec;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw io_error("cannot write " + p.string());
    return out;
}

inline param_table load_table(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw io_error("cannot open parameter table " + p.string());
    return param_table::read(in);
}

inline std::string setting_file_name(const std::string& shape, std::int64_t scale, const std::string& dom, double eps) {
    return shape + "_" + std::to_string(scale) + "_" + dom + "_" + format_double(eps) + ".csv";
}

} // namespace detail

/// Runs every (source, scale, domain, epsilon, algorithm) combination and writes
/// trials/<setting>.csv, trials.csv, summary.csv and regret.csv under the output dir.
inline int cmd_run(const bench_config& cfg, const command_options& opts) {
    validate_run_config(cfg);
    std::ostream& log = *opts.log;
    std::vector<source_dataset> sources;
    for (const auto& name : cfg.source_names) {
        sources.push_back(builtin_source(name, 1));
        sources.push_back(builtin_source(name, 2));
    }
    for (const auto& f : cfg.source_files) sources.push_back(load_histogram_csv(f));

    std::optional<param_table> mwem_table, ahp_table;
    if (cfg.mwem_table) mwem_table = detail::load_table(*cfg.mwem_table);
    if (cfg.ahp_table) ahp_table = detail::load_table(*cfg.ahp_table);

    const trial_design design{cfg.n_vectors, cfg.n_runs, cfg.seed, opts.workers};
    std::vector<trial_report> all;
    std::vector<summary_row> summary;
    // Per dimensionality: algorithm -> setting key -> mean.
    std::map<std::size_t, std::map<std::string, std::map<std::string, double>>> means;

    for (const auto& src : sources)
        for (const auto& dom : cfg.domains) {
            if (src.histogram.dom().dims() != dom.dims()) continue;
            bool divisible = true;
            for (std::size_t a = 0; a < dom.dims(); ++a) divisible = divisible && src.histogram.dom().size(a) % dom.size(a) == 0;
            if (!divisible) {
                log << "skip: source " << src.name << " (" << src.histogram.dom().to_string()
                    << ") cannot be coarsened to " << dom.to_string() << "\n";
                continue;
            }
            const workload w = cfg.workload.build(dom);
            for (auto scale : cfg.scales)
                for (double eps : cfg.epsilons) {
                    std::vector<trial_report> setting;
                    for (const auto& name : cfg.algorithms) {
                        const auto& alg = find_algorithm(name);
                        if (!alg.supports(dom)) continue;
                        run_settings rs;
                        if (auto it = cfg.params.find(name); it != cfg.params.end()) rs.params = it->second;
                        rs.side_info = cfg.side_info;
                        rs.rho_total = cfg.rho_total;
                        rs.mwem_table = mwem_table ? &*mwem_table : nullptr;
                        rs.ahp_table = ahp_table ? &*ahp_table : nullptr;
                        auto rep = run_trials(alg, src, scale, dom, eps, w, design, rs);
                        for (const auto& s : rep.samples)
                            if (s.failed)
                                log << "failure: " << name << " on " << src.name << " scale " << scale << " domain "
                                    << dom.to_string() << " eps " << eps << " (vector " << s.vector_id << ", run "
                                    << s.run_id << "): " << s.message << "\n";
                        setting.push_back(std::move(rep));
                    }
                    if (setting.empty()) continue;
                    {
                        auto out = detail::open_out(opts.out_dir / "trials" /
                                                    detail::setting_file_name(src.name, scale, dom.to_string(), eps));
                        write_trials_csv(out, setting);
                    }
                    std::map<std::string, std::vector<double>> samples;
                    for (const auto& r : setting)
                        if (r.errors().size() >= 2) samples[r.algorithm] = r.errors();
                    std::set<std::string> competitive;
                    if (samples.size() >= 2) {
                        for (const auto& a : competitive_set(samples)) competitive.insert(a);
                    } else {
                        for (const auto& [a, v] : samples) competitive.insert(a);
                    }
                    const std::string key = src.name + "|" + std::to_string(scale) + "|" + dom.to_string() + "|" +
                                            format_double(eps);
                    for (const auto& r : setting) {
                        summary_row row{r.algorithm, r.shape, r.domain, r.scale, r.epsilon, r.summary.mean,
                                        r.summary.p95, r.summary.std_error, r.summary.count, r.failures(),
                                        competitive.count(r.algorithm) > 0};
                        summary.push_back(row);
                        if (r.summary.count > 0) means[dom.dims()][r.algorithm][key] = r.summary.mean;
                    }
                    for (auto& r : setting) all.push_back(std::move(r));
                }
        }

    {
        auto out = detail::open_out(opts.out_dir / "trials.csv");
        write_trials_csv(out, all);
    }
    {
        auto out = detail::open_out(opts.out_dir / "summary.csv");
        write_summary_csv(out, summary);
    }
    {
        auto out = detail::open_out(opts.out_dir / "regret.csv");
        out << "dims,algorithm,regret\n";
        for (const auto& [dims, per_alg] : means) {
            // Settings every algorithm of this dimensionality completed.
            std::map<std::string, std::size_t> seen;
            for (const auto& [a, m] : per_alg)
                for (const auto& [k, v] : m) ++seen[k];
            std::vector<std::string> keys;
            for (const auto& [k, n] : seen)
                if (n == per_alg.size()) keys.push_back(k);
            if (keys.empty()) continue;
            std::map<std::string, std::vector<double>> table;
            for (const auto& [a, m] : per_alg)
                for (const auto& k : keys) table[a].push_back(m.at(k));
            try {
                for (const auto& [a, v] : regret(table)) out << dims << "D," << a << "," << format_double(v) << "\n";
            } catch (const invalid_input& e) {
                log << "regret skipped for " << dims << "D: " << e.what() << "\n";
            }
        }
    }
    log << "wrote " << summary.size() << " summary rows to " << (opts.out_dir / "summary.csv").string() << "\n";
    return exit_ok;
}

/// Learns a parameter table for mwem_star or ahp_star from synthetic training shapes.
inline int cmd_tune(const bench_config& cfg, const command_options& opts) {
    if (cfg.training.empty()) throw parse_error("[tune] training must list at least one synthetic shape kind");
    if (cfg.products.empty()) throw parse_error("[tune] products must not be empty");
    tuning_plan plan;
    for (const auto& t : cfg.training) {
        if (is_builtin_source(t)) throw parse_error("[tune] training refuses evaluation dataset '" + t + "'");
        for (const auto& f : cfg.source_files)
            if (f.stem().string() == t || f.string() == t)
                throw parse_error("[tune] training refuses evaluation dataset '" + t + "'");
        try {
            plan.training_kinds.push_back(parse_shape_kind(t));
        } catch (const invalid_input&) {
            throw parse_error("[tune] training entries must be powerlaw, normal or uniform, got '" + t + "'");
        }
    }
    parameterized_algorithm alg;
    if (cfg.tune_algorithm == "mwem_star") {
        plan.param_names = {"T"};
        plan.grid = mwem_rounds_grid();
        alg = mwem_star_candidate(cfg.rho_total);
    } else if (cfg.tune_algorithm == "ahp_star") {
        plan.param_names = {"rho", "eta"};
        plan.grid = ahp_grid();
        alg = ahp_star_candidate(cfg.rho_total);
    } else {
        throw parse_error("[tune] algorithm must be mwem_star or ahp_star");
    }
    if (!cfg.has_seed) throw parse_error("[run] seed is required");
    plan.products = cfg.products;
    plan.dom = cfg.tune_domain;
    plan.shapes_per_kind = cfg.shapes_per_kind;
    plan.trials = cfg.tune_trials;
    plan.epsilon = cfg.tune_epsilon;
    plan.seed = cfg.seed;
    plan.workers = opts.workers;
    plan.make_workload = [&](const domain& d) { return cfg.workload.build(d); };
    const auto table = tune_params(alg, plan);
    const auto path = opts.out_dir / cfg.tune_output;
    auto out = detail::open_out(path);
    table.write(out);
    *opts.log << "wrote " << table.size() << " entries to " << path.string() << "\n";
    return exit_ok;
}

struct check_options {
    std::uint64_t seed = 1;
    std::size_t exchangeability_trials = 200;
    std::size_t consistency_trials = 20;
    double floor = 1e-3;
    std::vector<std::string> algorithms; ///< empty means all
};

namespace detail {

/// A data vector of the given domain at `scale`, drawn from a built-in source.
inline data_vector check_data(const domain& d, std::int64_t scale, std::uint64_t seed) {
    const auto src = builtin_source("synthetic-bimodal", d.dims());
    rng_stream rng(seed, 0x636865636bULL + d.cells());
    return generate(src, d, scale, rng);
}

/// Witness datasets on 64 cells: x_i = i for MWEM, x_i = 2^(n-i) (capped to fit 64-bit
/// counts) for PHP, a single spike for Uniform, and a generic sample otherwise.
inline data_vector consistency_witness(const algorithm_info& alg, std::uint64_t seed) {
    if (!alg.one_d) return check_data(domain::two_d(8, 8), 10000, seed);
    std::vector<std::int64_t> v(64, 0);
    if (alg.name == "mwem" || alg.name == "mwem_star") {
        for (std::size_t i = 0; i < 64; ++i) v[i] = static_cast<std::int64_t>(i + 1);
    } else if (alg.name == "php") {
        for (std::size_t i = 0; i < 64; ++i) v[i] = i < 60 ? std::int64_t{1} << (60 - i) : 1;
    } else if (alg.name == "uniform") {
        v[10] = 10000;
    } else {
        return check_data(domain::one_d(64), 10000, seed);
    }
    return {domain::one_d(64), std::move(v)};
}

inline std::vector<const algorithm_info*> selected(const check_options& o) {
    std::vector<const algorithm_info*> out;
    for (const auto& a : algorithm_registry())
        if (o.algorithms.empty() || std::find(o.algorithms.begin(), o.algorithms.end(), a.name) != o.algorithms.end())
            out.push_back(&a);
    return out;
}

} // namespace detail

/// Runs a property suite; returns exit_failed when an asserted verdict fails.
inline int cmd_check(const std::string& suite, const check_options& co, const command_options& opts) {
    std::ostream& log = *opts.log;
    bool failed = false;
    if (suite == "exchangeability") {
        auto out = detail::open_out(opts.out_dir / "check_exchangeability.csv");
        out << "algorithm,domain,mean_base,mean_scaled,t,p_value,verdict,asserted\n";
        for (const auto* a : detail::selected(co)) {
            const domain d = a->one_d ? domain::one_d(256) : domain::two_d(32, 32);
            const auto x = detail::check_data(d, 10000, co.seed);
            const auto w = d.dims() == 1 ? make_prefix_workload(d) : make_random_range_workload(d, 2000, co.seed);
            const auto v = check_exchangeability(*a, x, 1.0, 10, w, co.exchangeability_trials, co.seed, 0.01, {},
                                                 opts.workers);
            const bool asserted = a->exchangeable;
            if (asserted && !v.passed) failed = true;
            out << a->name << ',' << d.to_string() << ',' << format_double(v.mean_base) << ','
                << format_double(v.mean_scaled) << ',' << format_double(v.test.t) << ',' << format_double(v.test.p_value)
                << ',' << (v.passed ? "pass" : "fail") << ',' << (asserted ? 1 : 0) << '\n';
            log << std::left << std::setw(10) << a->name << (v.passed ? "pass" : "fail") << "  p=" << v.test.p_value
                << (asserted ? "" : "  (recorded)") << "\n";
        }
    } else if (suite == "consistency") {
        auto out = detail::open_out(opts.out_dir / "check_consistency.csv");
        out << "algorithm,epsilon,mean_error,verdict,expected\n";
        for (const auto* a : detail::selected(co)) {
            const auto x = detail::consistency_witness(*a, co.seed);
            const auto w = x.dom().dims() == 1 ? make_prefix_workload(x.dom())
                                               : make_random_range_workload(x.dom(), 200, co.seed);
            const auto v = check_consistency(*a, x, w, default_epsilon_ladder(), co.consistency_trials, co.floor,
                                             co.seed, {}, opts.workers);
            if (v.passed != a->consistent) failed = true;
            for (std::size_t k = 0; k < v.ladder.size(); ++k)
                out << a->name << ',' << format_double(v.ladder[k]) << ',' << format_double(v.mean_errors[k]) << ','
                    << (v.passed ? "consistent" : "inconsistent") << ',' << (a->consistent ? "consistent" : "inconsistent")
                    << '\n';
            log << std::left << std::setw(10) << a->name << (v.passed ? "consistent  " : "inconsistent")
                << "  top=" << v.mean_errors.back() << (v.passed == a->consistent ? "" : "  MISMATCH") << "\n";
        }
    } else if (suite == "budget") {
        auto out = detail::open_out(opts.out_dir / "check_budget.csv");
        out << "algorithm,requested,recorded,stages,verdict\n";
        for (const auto* a : detail::selected(co)) {
            const domain d = a->one_d ? domain::one_d(64) : domain::two_d(16, 16);
            const auto x = detail::check_data(d, 10000, co.seed);
            const auto w = d.dims() == 1 ? make_prefix_workload(d) : make_random_range_workload(d, 100, co.seed);
            for (auto mode : {side_info_mode::exact, side_info_mode::noisy}) {
                run_settings rs;
                rs.side_info = mode;
                const auto v = check_budget(*a, x, w, 0.7, co.seed, rs);
                if (!v.passed) failed = true;
                out << a->name << ',' << format_double(v.requested) << ',' << format_double(v.recorded) << ','
                    << v.stages.size() << ',' << (v.passed ? "pass" : "fail") << '\n';
                log << std::left << std::setw(10) << a->name << (v.passed ? "pass" : "fail") << "  stages="
                    << v.stages.size() << (mode == side_info_mode::noisy ? "  (noisy side info)" : "") << "\n";
                if (!a->uses_scale) break;
            }
        }
    } else {
        throw parse_error("unknown suite '" + suite + "' (expected exchangeability, consistency or budget)");
    }
    return failed ? exit_failed : exit_ok;
}

/// Plot-ready exports from a summary CSV.
inline int cmd_report(const std::filesystem::path& summary_path, const command_options& opts) {
    std::ifstream in(summary_path);
    if (!in) throw io_error("cannot open summary " + summary_path.string());
    const auto rows = read_summary_csv(in);
    {
        auto out = detail::open_out(opts.out_dir / "error_vs_scale.csv");
        write_error_vs_scale(out, rows);
    }
    {
        auto out = detail::open_out(opts.out_dir / "dataset_dots.csv");
        write_dataset_dots(out, rows);
    }
    *opts.log << "wrote plot data for " << rows.size() << " summary rows to " << opts.out_dir.string() << "\n";
    return exit_ok;
}

} // namespace dpbench
