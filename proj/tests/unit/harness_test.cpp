#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dpbench/datagen/datagen.hpp"
#include "dpbench/harness/checks.hpp"
#include "dpbench/harness/stats.hpp"
#include "dpbench/harness/trials.hpp"
#include "dpbench/harness/tuning.hpp"

using namespace dpbench;

namespace {

source_dataset ramp_source(std::size_t n) {
    std::vector<std::int64_t> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = static_cast<std::int64_t>(i + 1);
    return {"ramp", data_vector(domain::one_d(n), std::move(c))};
}

} // namespace

TEST(scaled_error, hand_example) {
    const data_vector x(domain::one_d(2), {3, 1});
    const std::vector<double> y{4, 0};
    EXPECT_NEAR(scaled_error(y, make_identity_workload(x.dom()), x), std::sqrt(2.0) / 8.0, 1e-15);
    EXPECT_NEAR(std::sqrt(2.0) / 8.0, 0.17678, 1e-5);
}

TEST(scaled_error, exact_answers_and_bad_scale) {
    const std::vector<double> t{1, 2, 3};
    EXPECT_EQ(scaled_error(t, t, 6.0), 0.0);
    EXPECT_THROW(scaled_error(t, t, 0.0), invalid_input);
    EXPECT_THROW(scaled_error(std::vector<double>{1, 2}, t, 6.0), invalid_input);
}

TEST(scaled_error, scale_behaviour) {
    const std::vector<double> t{10, 20, 30}, y{11, 18, 30};
    const double base = scaled_error(y, t, 60.0);
    EXPECT_DOUBLE_EQ(scaled_error(y, t, 120.0), base / 2.0);
    std::vector<double> t3, y3;
    for (double v : t) t3.push_back(3 * v);
    for (double v : y) y3.push_back(3 * v);
    EXPECT_DOUBLE_EQ(scaled_error(y3, t3, 180.0), base);
}

TEST(summarize, nearest_rank_p95) {
    std::vector<double> v;
    for (int i = 1; i <= 20; ++i) v.push_back(i);
    const auto s = summarize(v);
    EXPECT_EQ(s.p95, 19.0);
    EXPECT_DOUBLE_EQ(s.mean, 10.5);
    EXPECT_GE(s.p95, s.min);
    EXPECT_EQ(nearest_rank({5.0}, 0.95), 5.0);
}

TEST(run_trials, design_and_determinism) {
    const auto src = ramp_source(64);
    const auto d = domain::one_d(64);
    const auto w = make_prefix_workload(d);
    const trial_design design{5, 10, 42, 1};
    const auto a = run_trials(find_algorithm("dawa"), src, 1000, d, 0.5, w, design);
    EXPECT_EQ(a.samples.size(), 50u);
    EXPECT_EQ(a.failures(), 0u);
    auto parallel = design;
    parallel.workers = 3;
    const auto b = run_trials(find_algorithm("dawa"), src, 1000, d, 0.5, w, parallel);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_EQ(a.samples[i].error, b.samples[i].error);
    EXPECT_GE(a.summary.mean, a.summary.min);
    EXPECT_LE(a.summary.mean, a.summary.max);
}

TEST(run_trials, failures_are_recorded) {
    algorithm_info broken = find_algorithm("identity");
    broken.run = [](const data_vector&, const workload&, double, run_context&, const run_settings&) -> mechanism_result {
        throw invalid_input("boom");
    };
    const auto d = domain::one_d(8);
    const auto rep = run_trials(broken, ramp_source(8), 100, d, 1.0, make_identity_workload(d), {2, 3, 1, 1});
    EXPECT_EQ(rep.failures(), 6u);
    EXPECT_EQ(rep.samples[0].message, "boom");
}

/// Identity adds Laplace(1/eps) per cell, so prefix i carries variance 2(i+1)/eps^2.
TEST(run_trials, identity_matches_laplace_oracle) {
    const std::size_t n = 256;
    const double eps = 0.1, scale = 1e5;
    const auto d = domain::one_d(n);
    const auto w = make_prefix_workload(d);
    const auto rep = run_trials(find_algorithm("identity"), ramp_source(n), static_cast<std::int64_t>(scale), d, eps, w,
                                {5, 1000, 3, 1});
    double expected_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) expected_sq += 2.0 * static_cast<double>(i + 1) / (eps * eps);
    const double oracle = std::sqrt(expected_sq) / (scale * static_cast<double>(n));
    double ms = 0.0;
    for (double e : rep.errors()) ms += e * e;
    ms /= static_cast<double>(rep.errors().size());
    EXPECT_NEAR(std::sqrt(ms) / oracle, 1.0, 0.05);
}

TEST(competitive_set, identical_samples_all_competitive) {
    const std::vector<double> s{1.0, 1.2, 0.9, 1.1, 1.05};
    const auto set = competitive_set({{"a", s}, {"b", s}, {"c", s}});
    EXPECT_EQ(set.size(), 3u);
}

TEST(competitive_set, clearly_worse_is_excluded) {
    rng_stream rng(1, 1);
    std::vector<double> good, bad;
    for (int i = 0; i < 50; ++i) {
        good.push_back(1.0 + 0.01 * rng.uniform());
        bad.push_back(10.0 + 0.01 * rng.uniform());
    }
    const auto set = competitive_set({{"good", good}, {"bad", bad}});
    EXPECT_EQ(set, std::vector<std::string>{"good"});
}

TEST(competitive_set, zero_variance_compares_exactly) {
    const auto set = competitive_set({{"a", {1.0, 1.0}}, {"b", {1.0, 1.0}}, {"c", {2.0, 2.0}}});
    EXPECT_EQ(set, (std::vector<std::string>{"a", "b"}));
}

TEST(competitive_set, bonferroni_level) {
    EXPECT_DOUBLE_EQ(bonferroni_alpha(15), 0.05 / 14);
    EXPECT_THROW(bonferroni_alpha(1), invalid_input);
}

TEST(welch_t_test, matches_hand_computation) {
    const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8, 10};
    const auto r = welch_t_test(a, b);
    /// va = (5/3)/4, vb = 10/5
    const double va = 5.0 / 12.0, vb = 2.0;
    EXPECT_NEAR(r.t, (2.5 - 6.0) / std::sqrt(va + vb), 1e-12);
    EXPECT_NEAR(r.df, (va + vb) * (va + vb) / (va * va / 3 + vb * vb / 4), 1e-12);
    /// t ~ -2.25 on ~5.5 degrees of freedom sits between the 5% and 10% two-sided points
    EXPECT_GT(r.p_value, 0.05);
    EXPECT_LT(r.p_value, 0.10);
}

TEST(regret, examples) {
    EXPECT_DOUBLE_EQ(regret({{"only", {3.0, 0.5}}}).at("only"), 1.0);
    const auto r = regret({{"a", {1.0, 4.0}}, {"b", {2.0, 2.0}}});
    EXPECT_NEAR(r.at("a"), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(r.at("b"), std::sqrt(2.0), 1e-12);
    EXPECT_THROW(regret({{"a", {0.0, 1.0}}, {"b", {1.0, 1.0}}}), invalid_input);
    EXPECT_THROW(regret({{"a", {1.0}}, {"b", {1.0, 1.0}}}), invalid_input);
}

TEST(regret, oracle_composite_is_one) {
    const std::map<std::string, std::vector<double>> m{{"a", {1.0, 5.0, 2.0}}, {"b", {3.0, 1.0, 2.5}}};
    std::vector<double> best{1.0, 1.0, 2.0};
    auto with_best = m;
    with_best["best"] = best;
    const auto r = regret(with_best);
    EXPECT_DOUBLE_EQ(r.at("best"), 1.0);
    for (const auto& [name, v] : r) EXPECT_GE(v, 1.0);
}

TEST(bias_variance, exact_samples_are_zero) {
    const std::vector<double> t{5, 6, 7};
    const auto bv = bias_variance({t, t, t}, t, 18.0);
    EXPECT_EQ(bv.bias, 0.0);
    EXPECT_EQ(bv.variance, 0.0);
    EXPECT_THROW(bias_variance({t}, t, 18.0), invalid_input);
}

TEST(bias_variance, unbiased_vs_uniform_on_a_spike) {
    const std::size_t n = 32;
    std::vector<std::int64_t> c(n, 0);
    c[0] = 1000;
    const data_vector x(domain::one_d(n), c);
    const auto w = make_identity_workload(x.dom());
    const auto truth = answer_workload(w, x);
    std::vector<std::vector<double>> id_runs, uni_runs;
    for (std::size_t t = 0; t < 400; ++t) {
        run_context a(rng_stream(5, t)), b(rng_stream(6, t));
        id_runs.push_back(find_algorithm("identity").run(x, w, 1.0, a, {}).answers);
        uni_runs.push_back(find_algorithm("uniform").run(x, w, 1.0, b, {}).answers);
    }
    const auto id = bias_variance(id_runs, truth, 1000.0);
    /// mean of 400 runs has per-cell sd sqrt(2/400); bias norm stays near sqrt(n * 2/400)
    EXPECT_LT(id.bias, 3.0 * std::sqrt(n * 2.0 / 400.0) / (1000.0 * n));
    EXPECT_NEAR(id.variance, 2.0, 0.3);
    /// uniform spreads the spike: residual 1000(1 - 1/n) at the spike and 1000/n elsewhere
    const double spread = 1000.0 / n;
    const double closed = std::sqrt(std::pow(1000.0 - spread, 2) + (n - 1) * spread * spread) / (1000.0 * n);
    const auto uni = bias_variance(uni_runs, truth, 1000.0);
    EXPECT_NEAR(uni.bias, closed, 0.01 * closed);
}

TEST(check_exchangeability, identity_and_dawa_pass) {
    const auto d = domain::one_d(64);
    std::vector<std::int64_t> c(64);
    for (std::size_t i = 0; i < 64; ++i) c[i] = static_cast<std::int64_t>((i % 8) * 5 + (i > 40 ? 50 : 0));
    const data_vector x(d, c);
    const auto w = make_prefix_workload(d);
    for (const char* name : {"identity", "dawa"}) {
        const auto v = check_exchangeability(find_algorithm(name), x, 0.5, 10, w, 200, 11);
        EXPECT_TRUE(v.passed) << name << " p=" << v.test.p_value;
    }
    EXPECT_THROW(check_exchangeability(find_algorithm("identity"), x, 0.5, 0, w, 200, 11), invalid_input);
}

TEST(check_consistency, table_witnesses) {
    const auto d = domain::one_d(64);
    const auto w = make_prefix_workload(d);
    std::vector<std::int64_t> ramp(64), geo(16);
    for (std::size_t i = 0; i < 64; ++i) ramp[i] = static_cast<std::int64_t>(i + 1);
    for (std::size_t i = 0; i < 16; ++i) geo[i] = std::int64_t{1} << (16 - i);
    const data_vector xr(d, ramp);
    const auto ladder = default_epsilon_ladder();

    EXPECT_TRUE(check_consistency(find_algorithm("h"), xr, w, ladder, 20, 1e-3, 1).passed);
    run_settings mwem10;
    mwem10.params["T"] = 10;
    const auto m = check_consistency(find_algorithm("mwem"), xr, w, ladder, 10, 1e-3, 2, mwem10);
    EXPECT_FALSE(m.passed);
    EXPECT_TRUE(m.plateau);

    const data_vector xg(domain::one_d(16), geo);
    const auto p = check_consistency(find_algorithm("php"), xg, make_prefix_workload(xg.dom()), ladder, 10, 1e-3, 3);
    EXPECT_TRUE(p.plateau);
    EXPECT_FALSE(p.passed);
}

TEST(check_budget, every_algorithm_balances) {
    const auto d1 = domain::one_d(64);
    const auto d2 = domain::two_d(16, 16);
    std::vector<std::int64_t> c1(64), c2(256);
    for (std::size_t i = 0; i < c1.size(); ++i) c1[i] = static_cast<std::int64_t>(i % 7);
    for (std::size_t i = 0; i < c2.size(); ++i) c2[i] = static_cast<std::int64_t>(i % 5);
    const data_vector x1(d1, c1), x2(d2, c2);
    const auto w1 = make_prefix_workload(d1);
    const auto w2 = make_random_range_workload(d2, 50, 1);
    for (const auto& name : algorithm_names()) {
        const auto& alg = find_algorithm(name);
        for (const auto mode : {side_info_mode::exact, side_info_mode::noisy}) {
            run_settings s;
            s.side_info = mode;
            if (alg.one_d) {
                EXPECT_TRUE(check_budget(alg, x1, w1, 0.3, 1, s).passed) << name;
            }
            if (alg.two_d) {
                EXPECT_TRUE(check_budget(alg, x2, w2, 0.3, 1, s).passed) << name;
            }
        }
    }
}

TEST(estimate_scale_side, budget_and_mean) {
    const data_vector x(domain::one_d(4), {10, 20, 30, 40});
    const double eps = 0.2, rho = 0.05;
    std::vector<double> got;
    for (std::size_t t = 0; t < 10000; ++t) {
        budget_ledger ledger;
        run_context ctx(rng_stream(9, t), &ledger);
        const auto s = estimate_scale_side(x, eps, rho, ctx);
        EXPECT_DOUBLE_EQ(s.remaining_epsilon, 0.95 * eps);
        EXPECT_GE(s.scale, 1.0);
        got.push_back(s.scale);
    }
    /// E[max(1, m + L)] for L ~ Laplace(b): m + b/2 e^{-(m-1)/b} - ... computed by quadrature
    const double m = 100.0, b = 1.0 / (rho * eps);
    double oracle = 0.0;
    const int steps = 400000;
    const double lo = -40 * b, hi = 40 * b, h = (hi - lo) / steps;
    for (int i = 0; i < steps; ++i) {
        const double l = lo + (i + 0.5) * h;
        oracle += std::max(1.0, m + l) * std::exp(-std::abs(l) / b) / (2 * b) * h;
    }
    const auto s = summarize(got);
    EXPECT_NEAR(s.mean, oracle, 3 * s.std_error);
    budget_ledger ledger;
    run_context ctx(rng_stream(1, 1), &ledger);
    EXPECT_THROW(estimate_scale_side(x, eps, 1.0, ctx), invalid_input);
}

TEST(tune_params, single_point_grid) {
    tuning_plan plan;
    plan.param_names = {"T"};
    plan.grid = {{7.0}};
    plan.training_kinds = {shape_kind::powerlaw};
    plan.shapes_per_kind = 1;
    plan.products = {1e2, 1e4};
    plan.dom = domain::one_d(32);
    plan.trials = 1;
    const auto t = tune_params(mwem_star_candidate(), plan);
    EXPECT_EQ(t.size(), 2u);
    EXPECT_EQ(t.lookup(1e3, 32), std::vector<double>{7.0});
    EXPECT_EQ(t.lookup(1e9, 4096), std::vector<double>{7.0});
    plan.grid.clear();
    EXPECT_THROW(tune_params(mwem_star_candidate(), plan), invalid_input);
}

TEST(tune_params, picks_the_lower_error_point) {
    /// theta[0] is the multiplier of the noise added to the exact answers
    const parameterized_algorithm alg = [](const std::vector<double>& theta, const data_vector& x, const workload& w,
                                           double e, run_context& c) {
        auto r = identity_run(x, w, e, c);
        const auto truth = answer_workload(w, x);
        for (std::size_t i = 0; i < r.answers.size(); ++i)
            r.answers[i] = truth[i] + theta[0] * (r.answers[i] - truth[i]);
        return r;
    };
    tuning_plan plan;
    plan.param_names = {"k"};
    plan.grid = {{3.0}, {0.5}, {2.0}};
    plan.training_kinds = {shape_kind::uniform, shape_kind::normal};
    plan.products = {1e3};
    plan.dom = domain::one_d(16);
    const auto t = tune_params(alg, plan);
    EXPECT_EQ(t.lookup(1e3, 16), std::vector<double>{0.5});
}

TEST(param_table, lookup_and_round_trip) {
    param_table t({"rho", "eta"});
    t.set(param_table::bucket_of(1e2), 256, {0.5, 1.0});
    t.set(param_table::bucket_of(1e6), 256, {0.3, 0.35});
    t.set(param_table::bucket_of(1e6), 4096, {0.9, 2.0});
    EXPECT_EQ(param_table::bucket_of(3e5), 5);
    EXPECT_EQ(param_table::bucket_of(4e5), 6);
    EXPECT_EQ(t.lookup(2e2, 256), (std::vector<double>{0.5, 1.0}));
    EXPECT_EQ(t.lookup(1e7, 300), (std::vector<double>{0.3, 0.35}));
    EXPECT_EQ(t.lookup(1e1, 3000), (std::vector<double>{0.9, 2.0}));
    std::stringstream io;
    t.write(io);
    EXPECT_EQ(param_table::read(io), t);
    std::istringstream bad("bucket,cells,T\n2,256\n");
    EXPECT_THROW(param_table::read(bad), parse_error);
    EXPECT_THROW(param_table().lookup(1.0, 1), invalid_input);
}
