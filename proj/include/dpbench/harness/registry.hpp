#pragma once

// Named algorithms with their side-information handling and parameter overrides.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dpbench/algorithms.hpp"
#include "dpbench/harness/param_table.hpp"

namespace dpbench {

/// How algorithms that want the scale as side information receive it.
enum class side_info_mode {
    exact, ///< the true scale is handed over for free
    noisy, ///< a share rho_total of epsilon buys a noisy scale first
};

struct run_settings {
    std::map<std::string, double> params;
    side_info_mode side_info = side_info_mode::exact;
    double rho_total = 0.05;
    const param_table* mwem_table = nullptr; ///< overrides the built-in table for mwem_star
    const param_table* ahp_table = nullptr;  ///< overrides the built-in table for ahp_star

    double param(const std::string& key, double fallback) const {
        const auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    }
};

using algorithm_fn =
    std::function<mechanism_result(const data_vector&, const workload&, double, run_context&, const run_settings&)>;

struct algorithm_info {
    std::string name;
    bool one_d = true;
    bool two_d = true;
    bool uses_scale = false;   ///< takes the scale as side information
    bool exchangeable = true;  ///< expected scale-epsilon exchangeability
    bool consistent = true;    ///< expected consistency
    std::vector<std::string> param_names;
    algorithm_fn run;

    bool supports(const domain& d) const { return d.dims() == 1 ? one_d : two_d; }
};

struct scale_estimate {
    double scale = 0.0;
    double remaining_epsilon = 0.0;
};

/// Noisy scale max(1, |x| + Laplace(1 / (rho_total * epsilon))) and the budget left over.
inline scale_estimate estimate_scale_side(const data_vector& x, double epsilon, double rho_total, run_context& ctx) {
    detail::require(rho_total > 0.0 && rho_total < 1.0, "estimate_scale_side: rho_total must lie in (0, 1)");
    detail::require(epsilon > 0.0, "estimate_scale_side: epsilon must be positive");
    const double spend = rho_total * epsilon;
    const double noisy = static_cast<double>(x.scale()) + ctx.rng().laplace(1.0 / spend);
    ctx.spend("scale estimate", spend);
    return {std::max(1.0, noisy), epsilon - spend};
}

/// Built-in tables for the tuned variants, learned on synthetic shapes with the
/// configs under configs/ (tune-mwem-*.cfg, tune-ahp-*.cfg).
namespace detail {

struct table_row {
    int bucket;
    std::size_t cells;
    std::vector<double> theta;
};

inline param_table table_from(std::vector<std::string> names, const std::vector<table_row>& rows) {
    param_table p(std::move(names));
    for (const auto& r : rows) p.set(r.bucket, r.cells, r.theta);
    return p;
}

} // namespace detail

inline const param_table& default_mwem_table() {
    static const param_table t = detail::table_from(
        {"T"}, {
            {1, 256, {15}}, {2, 256, {20}}, {3, 256, {200}},
            {4, 256, {200}}, {5, 256, {200}}, {6, 256, {200}},
            {7, 256, {200}}, {8, 256, {200}}, {9, 256, {200}},
            {1, 1024, {15}}, {2, 1024, {30}}, {3, 1024, {150}},
            {4, 1024, {200}}, {5, 1024, {200}}, {6, 1024, {200}},
            {7, 1024, {200}}, {8, 1024, {200}}, {9, 1024, {200}},
            {1, 4096, {1}}, {2, 4096, {2}}, {3, 4096, {15}},
            {4, 4096, {200}}, {5, 4096, {200}}, {6, 4096, {200}},
            {7, 4096, {200}}, {8, 4096, {200}}, {9, 4096, {200}},
        });
    return t;
}

inline const param_table& default_ahp_table() {
    static const param_table t = detail::table_from(
        {"rho", "eta"}, {
            {1, 256, {0.1, 5}}, {2, 256, {0.7, 1}}, {3, 256, {0.3, 0}},
            {4, 256, {0.3, 0}}, {5, 256, {0.1, 0}}, {6, 256, {0.1, 0}},
            {7, 256, {0.1, 0}}, {8, 256, {0.1, 0}}, {9, 256, {0.1, 0}},
            {1, 1024, {0.1, 5}}, {2, 1024, {0.1, 0}}, {3, 1024, {0.3, 0}},
            {4, 1024, {0.5, 0}}, {5, 1024, {0.3, 0}}, {6, 1024, {0.3, 0}},
            {7, 1024, {0.1, 0}}, {8, 1024, {0.1, 0}}, {9, 1024, {0.1, 0}},
            {1, 4096, {0.1, 5}}, {2, 4096, {0.1, 5}}, {3, 4096, {0.3, 0}},
            {4, 4096, {0.5, 0}}, {5, 4096, {0.3, 0}}, {6, 4096, {0.5, 0}},
            {7, 4096, {0.3, 0}}, {8, 4096, {0.1, 0}}, {9, 4096, {0.3, 0}},
        });
    return t;
}

namespace detail {

/// Scale to hand a side-information algorithm, and the epsilon left for the algorithm itself.
inline scale_estimate side_scale(const data_vector& x, double epsilon, run_context& ctx, const run_settings& s) {
    if (s.side_info == side_info_mode::exact) return {std::max(1.0, static_cast<double>(x.scale())), epsilon};
    return estimate_scale_side(x, epsilon, s.rho_total, ctx);
}

inline std::size_t as_count(double v, const char* what) {
    require(std::isfinite(v) && v >= 1.0, std::string(what) + " must be at least 1");
    return static_cast<std::size_t>(std::llround(v));
}

/// Re-labels the answers of a run that used only part of the budget at the top level.
inline mechanism_result with_total(mechanism_result r, double total) {
    r.epsilon_spent = total;
    return r;
}

inline std::vector<algorithm_info> make_registry() {
    std::vector<algorithm_info> r;
    auto add = [&](algorithm_info a) { r.push_back(std::move(a)); };

    add({"identity", true, true, false, true, true, {},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings&) {
             return identity_run(x, w, e, c);
         }});
    add({"privelet", true, true, false, true, true, {},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings&) {
             return privelet_run(x, w, e, c);
         }});
    add({"h", true, true, false, true, true, {"b"},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings& s) {
             return h_run(x, w, e, c, as_count(s.param("b", 2), "b"));
         }});
    add({"hb", true, true, false, true, true, {},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings&) {
             return hb_run(x, w, e, c);
         }});
    add({"greedyh", true, true, false, true, true, {"b"},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings& s) {
             return greedyh_run(x, w, e, c, as_count(s.param("b", 2), "b"));
         }});
    add({"uniform", true, true, false, true, false, {},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings&) {
             return uniform_run(x, w, e, c);
         }});
    add({"mwem", true, true, true, true, false, {"T", "average", "passes"},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings& s) {
             const double start = c.spent();
             const auto side = side_scale(x, e, c, s);
             mwem_options o;
             o.rounds = as_count(s.param("T", 10), "T");
             o.assumed_scale = side.scale;
             o.average_iterates = s.param("average", 1.0) != 0.0;
             o.update_passes = static_cast<std::size_t>(std::max(0.0, s.param("passes", 0.0)));
             auto res = mwem_run(x, w, side.remaining_epsilon, c, o);
             return with_total(std::move(res), c.spent() - start);
         }});
    add({"mwem_star", true, true, false, true, false, {},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings& s) {
             const double start = c.spent();
             const auto side = estimate_scale_side(x, e, s.rho_total, c);
             const auto& table = s.mwem_table != nullptr ? *s.mwem_table : default_mwem_table();
             mwem_options o;
             o.rounds = as_count(table.lookup(e * side.scale, x.size())[0], "T");
             o.assumed_scale = side.scale;
             auto res = mwem_run(x, w, side.remaining_epsilon, c, o);
             return with_total(std::move(res), c.spent() - start);
         }});
    add({"ahp", true, true, false, true, true, {"rho", "eta"},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings& s) {
             return ahp_run(x, w, e, c, {s.param("rho", 0.5), s.param("eta", 1.0)});
         }});
    add({"ahp_star", true, true, false, true, true, {},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings& s) {
             const double start = c.spent();
             const auto side = estimate_scale_side(x, e, s.rho_total, c);
             const auto& table = s.ahp_table != nullptr ? *s.ahp_table : default_ahp_table();
             const auto& theta = table.lookup(e * side.scale, x.size());
             auto res = ahp_run(x, w, side.remaining_epsilon, c, {theta[0], theta[1]});
             return with_total(std::move(res), c.spent() - start);
         }});
    add({"dpcube", true, true, false, true, true, {"rho", "n_p"},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings& s) {
             return dpcube_run(x, w, e, c, {s.param("rho", 0.5), s.param("n_p", 10.0)});
         }});
    add({"dawa", true, true, false, true, true, {"rho", "b"},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings& s) {
             dawa_options o;
             o.rho = s.param("rho", 0.25);
             o.branching = as_count(s.param("b", 2), "b");
             return dawa_run(x, w, e, c, o);
         }});
    add({"quadtree", false, true, false, true, false, {"height"},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings& s) {
             return quadtree_run(x, w, e, c, as_count(s.param("height", 10), "height"));
         }});
    add({"ugrid", false, true, true, true, true, {"c"},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings& s) {
             const double start = c.spent();
             const auto side = side_scale(x, e, c, s);
             auto res = ugrid_run(x, w, side.remaining_epsilon, c, {s.param("c", 10.0), side.scale});
             return with_total(std::move(res), c.spent() - start);
         }});
    add({"agrid", false, true, true, true, true, {"c", "c2", "rho"},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings& s) {
             const double start = c.spent();
             const auto side = side_scale(x, e, c, s);
             agrid_options o{s.param("c", 10.0), s.param("c2", 5.0), s.param("rho", 0.5), side.scale};
             auto res = agrid_run(x, w, side.remaining_epsilon, c, o);
             return with_total(std::move(res), c.spent() - start);
         }});
    add({"php", true, false, false, true, false, {"rho"},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings& s) {
             return php_run(x, w, e, c, s.param("rho", 0.5));
         }});
    add({"efpa", true, false, false, true, true, {},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings&) {
             return efpa_run(x, w, e, c);
         }});
    add({"sf", true, false, true, false, true, {"k", "F", "hierarchy"},
         [](const data_vector& x, const workload& w, double e, run_context& c, const run_settings& s) {
             const double start = c.spent();
             const auto side = side_scale(x, e, c, s);
             sf_options o;
             o.k = static_cast<std::size_t>(std::max(0.0, s.param("k", 0.0)));
             o.f = s.param("F", side.scale);
             o.hierarchy_per_bucket = s.param("hierarchy", 1.0) != 0.0;
             auto res = sf_run(x, w, side.remaining_epsilon, c, o);
             return with_total(std::move(res), c.spent() - start);
         }});
    return r;
}

} // namespace detail

inline const std::vector<algorithm_info>& algorithm_registry() {
    static const std::vector<algorithm_info> r = detail::make_registry();
    return r;
}

inline const algorithm_info& find_algorithm(const std::string& name) {
    for (const auto& a : algorithm_registry())
        if (a.name == name) return a;
    throw invalid_input("unknown algorithm '" + name + "'");
}

inline std::vector<std::string> algorithm_names() {
    std::vector<std::string> out;
    for (const auto& a : algorithm_registry()) out.push_back(a.name);
    return out;
}

} // namespace dpbench
