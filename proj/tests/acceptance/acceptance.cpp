// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance_tests [--only N]... [--known-failure N]... [--workers N]
//
// Exit status is 0 when every failing criterion was listed with --known-failure and
// every listed criterion did fail; 1 otherwise.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "dpbench/algorithms.hpp"
#include "dpbench/cli/commands.hpp"
#include "dpbench/datagen/datagen.hpp"
#include "dpbench/harness/checks.hpp"
#include "dpbench/harness/stats.hpp"
#include "dpbench/harness/trials.hpp"

using namespace dpbench;
namespace fs = std::filesystem;

namespace {

struct outcome {
    bool passed = false;
    std::string detail;
};

struct criterion {
    int id;
    std::string title;
    double budget_seconds;
    std::function<outcome(std::size_t workers)> run;
};

std::string fmt(double v, int prec = 4) {
    std::ostringstream s;
    s.precision(prec);
    s << v;
    return s.str();
}

/// Appends a failure note and returns false so call sites can chain into `ok`.
bool note(std::ostringstream& d, bool ok, const std::string& what) {
    if (!ok) d << " [" << what << "]";
    return ok;
}

outcome identity_oracle(std::size_t) {
    const std::size_t n = 256, trials = 5000;
    const double eps = 0.1;
    const auto d = domain::one_d(n);
    const auto w = make_prefix_workload(d);
    rng_stream data_rng(1, 1);
    const auto x = generate(builtin_source("synthetic-bimodal", 1), d, 100000, data_rng);
    const auto truth = answer_workload(w, x);
    const auto& alg = find_algorithm("identity");
    std::vector<double> sq(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        run_context ctx(rng_stream(11, t));
        const auto r = alg.run(x, w, eps, ctx, {});
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += (r.answers[i] - truth[i]) * (r.answers[i] - truth[i]);
        sq[t] = s;
    }
    const double oracle = 2.0 / (eps * eps) * static_cast<double>(n * (n + 1)) / 2.0;
    const auto s = summarize(sq);
    const double ratio = s.mean / oracle;
    return {std::abs(ratio - 1.0) <= 0.05, "mean/oracle=" + fmt(ratio, 5) + " se=" + fmt(s.std_error / oracle, 3) +
                                               " over " + std::to_string(trials) + " trials"};
}

outcome transform_roundtrips(std::size_t) {
    rng_stream rng(2, 2);
    double worst_haar = 0.0, worst_dft = 0.0;
    for (std::size_t n : {1u, 2u, 7u, 64u, 100u, 255u, 512u, 1000u, 1024u}) {
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<double> x(n);
            for (auto& v : x) v = rng.uniform() * 2000.0 - 1000.0;
            const auto h = haar_inverse(haar_forward(x), n);
            const auto f = reconstruct(dft_topk(x, n));
            for (std::size_t i = 0; i < n; ++i) {
                worst_haar = std::max(worst_haar, std::abs(h[i] - x[i]));
                worst_dft = std::max(worst_dft, std::abs(f[i] - x[i]));
            }
        }
    }
    const bool ok = worst_haar <= 1e-9 && worst_dft <= 1e-9;
    return {ok, "max |haar - x|=" + fmt(worst_haar, 3) + " max |dft - x|=" + fmt(worst_dft, 3)};
}

outcome tree_inference(std::size_t) {
    rng_stream rng(3, 3);
    double worst = 0.0;
    std::size_t trees = 0;
    for (std::size_t b : {2u, 4u, 16u})
        for (std::size_t n : {3u, 17u, 64u, 250u, 1000u, 1024u}) {
            auto t = build_aligned_tree(n, 1, false, b);
            for (std::size_t i = 0; i < t.size(); ++i) {
                /// about one node in ten left unmeasured, the rest with random variances
                if (rng.uniform() < 0.1 && i > 0) continue;
                t.measure(i, rng.uniform() * 1000.0, 0.1 + rng.uniform() * 10.0);
            }
            const auto v = tree_least_squares(t);
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (t[i].children.empty()) continue;
                double s = 0.0;
                for (auto c : t[i].children) s += v[c];
                worst = std::max(worst, std::abs(s - v[i]) / std::max(1.0, std::abs(v[i])));
            }
            ++trees;
        }
    noisy_tree hand;
    hand.add_root({0, 2, 0, 1});
    hand.add_child(0, {0, 1, 0, 1});
    hand.add_child(0, {1, 2, 0, 1});
    hand.measure(0, 10, 1);
    hand.measure(1, 3, 1);
    hand.measure(2, 5, 1);
    const auto v = tree_least_squares(hand);
    const bool hand_ok = std::abs(v[1] - 11.0 / 3) <= 1e-12 && std::abs(v[2] - 17.0 / 3) <= 1e-12;
    return {worst <= 1e-9 && hand_ok, std::to_string(trees) + " trees, max relative |parent - sum(children)|=" +
                                          fmt(worst, 3) + ", hand leaves=[" + fmt(v[1], 10) + ", " + fmt(v[2], 10) + "]"};
}

using intervals = std::vector<std::pair<std::size_t, std::size_t>>;

double partition_cost(std::span<const double> x, const intervals& p, double penalty) {
    double c = 0.0;
    for (const auto& [lo, hi] : p) {
        double mean = 0.0;
        for (std::size_t i = lo; i < hi; ++i) mean += x[i];
        mean /= static_cast<double>(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) c += std::abs(x[i] - mean);
        c += penalty;
    }
    return c;
}

/// Cheapest partition by enumerating every set of cut points.
double brute_force_cost(std::span<const double> x, double penalty) {
    const std::size_t n = x.size();
    double best = INFINITY;
    for (std::size_t mask = 0; mask < (std::size_t{1} << (n - 1)); ++mask) {
        intervals p;
        std::size_t lo = 0;
        for (std::size_t cut = 1; cut < n; ++cut)
            if (mask & (std::size_t{1} << (cut - 1))) {
                p.emplace_back(lo, cut);
                lo = cut;
            }
        p.emplace_back(lo, n);
        best = std::min(best, partition_cost(x, p, penalty));
    }
    return best;
}

outcome partition_oracle(std::size_t) {
    rng_stream rng(4, 4);
    std::size_t matched = 0, total = 0;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x(8);
        for (auto& v : x) v = std::floor(rng.uniform() * 50.0);
        for (double penalty : {0.5, 5.0, 40.0}) {
            const auto got = dawa_exact_partition(x, penalty);
            std::size_t covered = 0;
            for (const auto& [lo, hi] : got) covered += hi - lo;
            const bool ok = covered == 8 && std::abs(partition_cost(x, got, penalty) - brute_force_cost(x, penalty)) <= 1e-9;
            matched += ok ? 1 : 0;
            ++total;
        }
    }
    return {matched == total, std::to_string(matched) + "/" + std::to_string(total) + " optimal costs matched"};
}

outcome exchangeability(std::size_t workers) {
    std::ostringstream d;
    bool ok = true;
    std::size_t asserted = 0, passed = 0;
    for (const auto& a : algorithm_registry())
        for (const auto& dom : {domain::one_d(256), domain::two_d(32, 32)}) {
            if (!a.supports(dom)) continue;
            const auto x = detail::check_data(dom, 10000, 5);
            const auto w = dom.dims() == 1 ? make_prefix_workload(dom) : make_random_range_workload(dom, 2000, 5);
            const auto v = check_exchangeability(a, x, 1.0, 10, w, 200, 5, 0.01, {}, workers);
            if (!a.exchangeable) {
                d << " " << a.name << "/" << dom.to_string() << ":recorded(" << (v.passed ? "pass" : "fail")
                  << ",p=" << fmt(v.test.p_value, 3) << ")";
                continue;
            }
            ++asserted;
            passed += v.passed ? 1 : 0;
            ok = note(d, v.passed, a.name + "/" + dom.to_string() + " p=" + fmt(v.test.p_value, 3)) && ok;
        }
    return {ok, std::to_string(passed) + "/" + std::to_string(asserted) + " asserted pass;" + d.str()};
}

outcome consistency(std::size_t workers) {
    const double floor = 1e-3;
    std::ostringstream d;
    bool ok = true;
    const std::vector<std::string> consistent{"h",    "hb",  "privelet", "greedyh", "identity", "efpa",
                                              "ahp",  "dawa", "dpcube",  "ugrid",   "agrid"};
    const std::vector<std::string> inconsistent{"mwem", "php", "uniform"};
    run_settings mwem10;
    mwem10.params["T"] = 10;
    auto top = [&](const std::string& name) {
        const auto& a = find_algorithm(name);
        const auto x = detail::consistency_witness(a, 7);
        const auto w = x.dom().dims() == 1 ? make_prefix_workload(x.dom()) : make_random_range_workload(x.dom(), 200, 7);
        return check_consistency(a, x, w, default_epsilon_ladder(), 20, floor, 7, name == "mwem" ? mwem10 : run_settings{},
                                 workers)
            .mean_errors.back();
    };
    for (const auto& n : consistent) {
        const double e = top(n);
        ok = note(d, e <= floor, n + " top=" + fmt(e, 3)) && ok;
    }
    for (const auto& n : inconsistent) {
        const double e = top(n);
        d << " " << n << "=" << fmt(e, 3);
        ok = note(d, e >= 10 * floor, n + " below 10x floor") && ok;
    }
    return {ok, "consistent set at eps=1e4 <= 1e-3 unless noted; plateaus:" + d.str()};
}

outcome mwem_star_direction(std::size_t workers) {
    const auto d = domain::one_d(256);
    const auto w = make_prefix_workload(d);
    const double eps = 1.0;
    const std::size_t shapes = 5, runs = 10;
    const auto& star = find_algorithm("mwem_star");
    const auto& plain = find_algorithm("mwem");
    run_settings t10;
    t10.params["T"] = 10;
    std::ostringstream det;
    bool ok = true;
    for (double product : {1e4, 1e5, 1e6, 1e7}) {
        const auto scale = static_cast<std::int64_t>(product / eps);
        rng_stream shape_rng(77, static_cast<std::uint64_t>(std::log10(product)));
        std::vector<data_vector> xs;
        for (std::size_t s = 0; s < shapes; ++s)
            xs.push_back(sample_multinomial(synth_shape(shape_kind::powerlaw, d, {}, shape_rng), scale, shape_rng));
        std::vector<double> a(shapes * runs), b(shapes * runs);
        detail::parallel_for(shapes * runs, workers, [&](std::size_t i) {
            const auto& x = xs[i / runs];
            const auto truth = answer_workload(w, x);
            run_context c1(rng_stream(78, i)), c2(rng_stream(79, i));
            a[i] = scaled_error(star.run(x, w, eps, c1, {}).answers, truth, static_cast<double>(scale));
            b[i] = scaled_error(plain.run(x, w, eps, c2, t10).answers, truth, static_cast<double>(scale));
        });
        const double ma = summarize(a).mean, mb = summarize(b).mean;
        det << " " << fmt(product, 2) << ":" << fmt(mb / ma, 3);
        ok = note(det, ma <= mb, "tuned worse") && ok;
        if (product == 1e6) ok = note(det, mb / ma > 2.0, "ratio at 1e6 not above 2") && ok;
    }
    return {ok, "MWEM(T=10)/MWEM* mean-error ratio per product:" + det.str()};
}

outcome data_generator(std::size_t) {
    std::vector<std::int64_t> c(64);
    for (std::size_t i = 0; i < 64; ++i) c[i] = static_cast<std::int64_t>(5 + (i * 29) % 61);
    const source_dataset src{"acceptance", data_vector(domain::one_d(64), c)};
    rng_stream rng(8, 8);
    bool exact = true;
    for (int i = 0; i < 10000; ++i) exact = exact && generate(src, domain::one_d(64), 1000 + i, rng).scale() == 1000 + i;
    const double m = 1e5;
    const auto x = generate(src, domain::one_d(64), static_cast<std::int64_t>(m), rng);
    const auto p = shape_of(src.histogram);
    double stat = 0.0;
    for (std::size_t i = 0; i < 64; ++i) stat += std::pow(static_cast<double>(x[i]) - m * p[i], 2) / (m * p[i]);
    const double crit = boost::math::quantile(boost::math::chi_squared(63), 0.99);
    return {exact && stat < crit,
            std::string(exact ? "scale exact in 1e4 draws" : "scale mismatch") + ", chi2=" + fmt(stat) + " < " + fmt(crit)};
}

outcome statistics(std::size_t) {
    rng_stream rng(9, 9);
    std::vector<double> base, outlier;
    for (int i = 0; i < 50; ++i) {
        base.push_back(1.0 + 0.1 * rng.uniform());
        outlier.push_back(10.0 + 0.1 * rng.uniform());
    }
    const auto same = competitive_set({{"a", base}, {"b", base}, {"c", base}});
    const auto excl = competitive_set({{"a", base}, {"b", base}, {"x", outlier}});
    const auto r = regret({{"a", {1.0, 4.0}}, {"b", {2.0, 2.0}}});
    const bool ok = same.size() == 3 && excl == std::vector<std::string>{"a", "b"} &&
                    std::abs(r.at("a") - std::sqrt(2.0)) < 1e-12 && std::abs(r.at("b") - std::sqrt(2.0)) < 1e-12 &&
                    bonferroni_alpha(15) == 0.05 / 14;
    return {ok, "identical=" + std::to_string(same.size()) + "/3 competitive, outlier excluded=" +
                    (excl.size() == 2 ? "yes" : "no") + ", regret=" + fmt(r.at("a"), 4) + "/" + fmt(r.at("b"), 4) +
                    ", alpha(15)=" + fmt(bonferroni_alpha(15), 6)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

outcome determinism(std::size_t workers) {
    const auto root = fs::temp_directory_path() / "dpbench-acceptance-determinism";
    fs::remove_all(root);
    std::ostringstream log;
    const auto cfg = preset_config("desk-1d");
    const int ra = cmd_run(cfg, {root / "a", 1, &log});
    const int rb = cmd_run(cfg, {root / "b", std::max<std::size_t>(2, workers), &log});
    std::size_t files = 0, same = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
        if (!e.is_regular_file()) continue;
        ++files;
        const auto other = root / "b" / fs::relative(e.path(), root / "a");
        same += fs::exists(other) && slurp(e.path()) == slurp(other) ? 1 : 0;
    }
    fs::remove_all(root);
    return {ra == 0 && rb == 0 && files > 3 && same == files,
            std::to_string(same) + "/" + std::to_string(files) + " CSVs byte-identical across two runs"};
}

outcome budget(std::size_t) {
    std::ostringstream d;
    bool ok = true;
    std::size_t runs = 0;
    for (const auto& a : algorithm_registry())
        for (const auto& dom : {domain::one_d(128), domain::two_d(16, 16)}) {
            if (!a.supports(dom)) continue;
            const auto x = detail::check_data(dom, 10000, 10);
            const auto w = dom.dims() == 1 ? make_prefix_workload(dom) : make_random_range_workload(dom, 100, 10);
            for (double eps : {0.05, 1.0, 7.3})
                for (auto mode : {side_info_mode::exact, side_info_mode::noisy}) {
                    run_settings s;
                    s.side_info = mode;
                    const auto v = check_budget(a, x, w, eps, 10, s);
                    ++runs;
                    ok = note(d, v.passed, a.name + "/" + dom.to_string() + " eps=" + fmt(eps) + " recorded " +
                                               fmt(v.recorded, 17)) &&
                         ok;
                }
        }
    return {ok, std::to_string(runs) + " instrumented runs balanced" + d.str()};
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> only, known;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if ((a == "--only" || a == "--known-failure" || a == "--workers") && i + 1 < argc) {
            const int v = std::stoi(argv[++i]);
            if (a == "--only") only.insert(v);
            else if (a == "--known-failure") known.insert(v);
            else workers = static_cast<std::size_t>(std::max(1, v));
        } else {
            std::cerr << "usage: acceptance_tests [--only N]... [--known-failure N]... [--workers N]\n";
            return 2;
        }
    }

    const std::vector<criterion> all{
        {1, "identity analytic oracle", 60, identity_oracle},
        {2, "transform roundtrips", 1, transform_roundtrips},
        {3, "tree inference", 1, tree_inference},
        {4, "partition oracle", 10, partition_oracle},
        {5, "exchangeability suite", 1800, exchangeability},
        {6, "consistency suite", 1200, consistency},
        {7, "MWEM* improvement direction", 1800, mwem_star_direction},
        {8, "data generator", 60, data_generator},
        {9, "statistics", 1, statistics},
        {10, "determinism", 300, determinism},
        {11, "budget ledger", 60, budget},
    };

    std::set<int> failed;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        outcome o;
        try {
            o = c.run(workers);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool pass = o.passed && in_time;
        if (!pass) failed.insert(c.id);
        std::printf("%s  %2d  %-28s  %7.2fs  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                    o.detail.c_str(), in_time ? "" : "  [over time budget]");
        std::fflush(stdout);
    }

    std::set<int> unexpected, recovered;
    for (int id : failed)
        if (!known.count(id)) unexpected.insert(id);
    for (int id : known)
        if ((only.empty() || only.count(id)) && !failed.count(id)) recovered.insert(id);
    std::printf("%zu failed", failed.size());
    if (!known.empty()) std::printf(" (%zu listed as known)", failed.size() - unexpected.size());
    std::printf("\n");
    for (int id : recovered) std::printf("criterion %d was listed as a known failure but passed\n", id);
    return unexpected.empty() && recovered.empty() ? 0 : 1;
}
