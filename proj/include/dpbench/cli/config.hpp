#pragma once

// Benchmark configuration: sectioned key = value text.
//
//   # comment
//   [run]
//   seed = 42
//   [grid]
//   scales = 1000, 10000
//   domains = 256, 32x32
//   epsilons = 0.1
//   [params.mwem]
//   T = 20

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dpbench/datagen/datagen.hpp"
#include "dpbench/harness/registry.hpp"

namespace dpbench {

/// Raw sections: section -> key -> (value, line).
struct config_text {
    std::map<std::string, std::map<std::string, std::pair<std::string, std::size_t>>> sections;

    bool has(const std::string& section, const std::string& key) const {
        const auto s = sections.find(section);
        return s != sections.end() && s->second.count(key) > 0;
    }
};

inline config_text parse_config_text(std::istream& in) {
    config_text c;
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) throw parse_error("malformed section header '" + t + "'", lineno);
            section = detail::trim(t.substr(1, t.size() - 2));
            c.sections[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw parse_error("expected 'key = value', got '" + t + "'", lineno);
        if (section.empty()) throw parse_error("key outside of any [section]", lineno);
        const std::string key = detail::trim(t.substr(0, eq));
        if (key.empty()) throw parse_error("empty key", lineno);
        auto& sec = c.sections[section];
        if (sec.count(key)) throw parse_error("duplicate key '" + key + "' in [" + section + "]", lineno);
        sec[key] = {detail::trim(t.substr(eq + 1)), lineno};
    }
    return c;
}

enum class workload_kind { prefix, identity, random };

struct workload_spec {
    workload_kind kind = workload_kind::prefix;
    std::size_t count = 2000;
    std::uint64_t seed = 1;

    /// Prefix on 1D, random ranges on 2D unless set explicitly.
    bool explicit_kind = false;

    workload build(const domain& d) const {
        workload_kind k = kind;
        if (!explicit_kind) k = d.dims() == 1 ? workload_kind::prefix : workload_kind::random;
        switch (k) {
        case workload_kind::prefix: return make_prefix_workload(d);
        case workload_kind::identity: return make_identity_workload(d);
        default: return make_random_range_workload(d, count, seed);
        }
    }
};

struct bench_config {
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::size_t n_vectors = 5;
    std::size_t n_runs = 10;
    side_info_mode side_info = side_info_mode::exact;
    double rho_total = 0.05;
    workload_spec workload;
    std::vector<std::int64_t> scales;
    std::vector<domain> domains;
    std::vector<double> epsilons;
    std::vector<std::string> source_names;
    std::vector<std::filesystem::path> source_files;
    std::vector<std::string> algorithms;
    std::map<std::string, std::map<std::string, double>> params;
    std::optional<std::filesystem::path> mwem_table, ahp_table;
    std::optional<std::filesystem::path> output_dir;

    // [tune]
    std::string tune_algorithm;
    std::vector<std::string> training;
    std::vector<double> products;
    domain tune_domain = domain::one_d(256);
    std::size_t shapes_per_kind = 2;
    std::size_t tune_trials = 5;
    double tune_epsilon = 1.0;
    std::string tune_output = "params.csv";
};

namespace detail {

inline std::vector<std::string> list_of(const std::string& v) {
    std::vector<std::string> out;
    for (auto& s : split(v, ','))
        if (!s.empty()) out.push_back(s);
    return out;
}

inline double number_of(const std::string& v, std::size_t line) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::logic_error&) {
        throw parse_error("expected a number, got '" + v + "'", line);
    }
}

inline std::uint64_t unsigned_of(const std::string& v, std::size_t line) {
    const double d = number_of(v, line);
    if (d < 0 || d != std::floor(d) || d > 1.8e19) throw parse_error("expected a non-negative integer, got '" + v + "'", line);
    if (v.find_first_not_of("0123456789") == std::string::npos) return std::stoull(v);
    return static_cast<std::uint64_t>(d);
}

inline domain domain_of(const std::string& v, std::size_t line) {
    const auto x = v.find('x');
    if (x == std::string::npos) return domain::one_d(static_cast<std::size_t>(unsigned_of(v, line)));
    return domain::two_d(static_cast<std::size_t>(unsigned_of(trim(v.substr(0, x)), line)),
                         static_cast<std::size_t>(unsigned_of(trim(v.substr(x + 1)), line)));
}

} // namespace detail

/// Validates a parsed config. Relative file paths resolve against `base_dir`.
inline bench_config build_config(const config_text& text, const std::filesystem::path& base_dir = {}) {
    bench_config c;
    static const std::map<std::string, std::vector<std::string>> known = {
        {"run", {"seed", "n_vectors", "n_runs", "side_info", "rho_total", "workload", "workload_seed", "mwem_table",
                 "ahp_table", "output"}},
        {"grid", {"scales", "domains", "epsilons"}},
        {"sources", {"names", "files"}},
        {"algorithms", {"list"}},
        {"tune", {"algorithm", "training", "products", "domain", "shapes_per_kind", "trials", "epsilon", "output"}},
    };
    for (const auto& [name, keys] : text.sections) {
        if (name.rfind("params.", 0) == 0) {
            const std::string alg = name.substr(7);
            const auto& info = find_algorithm(alg);
            for (const auto& [k, v] : keys) {
                bool ok = false;
                for (const auto& p : info.param_names) ok = ok || p == k;
                if (!ok)
                    throw parse_error("algorithm '" + alg + "' has no parameter '" + k + "'", v.second);
                c.params[alg][k] = detail::number_of(v.first, v.second);
            }
            continue;
        }
        const auto it = known.find(name);
        if (it == known.end()) {
            const std::size_t line = keys.empty() ? 0 : keys.begin()->second.second;
            throw parse_error("unknown section [" + name + "]", line);
        }
        for (const auto& [k, v] : keys) {
            bool ok = false;
            for (const auto& kk : it->second) ok = ok || kk == k;
            if (!ok) throw parse_error("unknown key '" + k + "' in [" + name + "]", v.second);
        }
    }
    auto get = [&](const std::string& s, const std::string& k) -> const std::pair<std::string, std::size_t>* {
        if (!text.has(s, k)) return nullptr;
        return &text.sections.at(s).at(k);
    };
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };

    if (auto v = get("run", "seed")) {
        c.seed = detail::unsigned_of(v->first, v->second);
        c.has_seed = true;
    }
    if (auto v = get("run", "n_vectors")) c.n_vectors = detail::unsigned_of(v->first, v->second);
    if (auto v = get("run", "n_runs")) c.n_runs = detail::unsigned_of(v->first, v->second);
    if (auto v = get("run", "side_info")) {
        if (v->first == "exact")
            c.side_info = side_info_mode::exact;
        else if (v->first == "noisy")
            c.side_info = side_info_mode::noisy;
        else
            throw parse_error("side_info must be 'exact' or 'noisy'", v->second);
    }
    if (auto v = get("run", "rho_total")) {
        c.rho_total = detail::number_of(v->first, v->second);
        if (!(c.rho_total > 0.0 && c.rho_total < 1.0)) throw parse_error("rho_total must lie in (0, 1)", v->second);
    }
    if (auto v = get("run", "workload")) {
        c.workload.explicit_kind = true;
        if (v->first == "prefix")
            c.workload.kind = workload_kind::prefix;
        else if (v->first == "identity")
            c.workload.kind = workload_kind::identity;
        else if (v->first.rfind("random", 0) == 0) {
            c.workload.kind = workload_kind::random;
            const auto colon = v->first.find(':');
            if (colon != std::string::npos) c.workload.count = detail::unsigned_of(v->first.substr(colon + 1), v->second);
        } else {
            throw parse_error("workload must be prefix, identity or random[:count]", v->second);
        }
    }
    if (auto v = get("run", "workload_seed")) c.workload.seed = detail::unsigned_of(v->first, v->second);
    if (auto v = get("run", "mwem_table")) c.mwem_table = resolve(v->first);
    if (auto v = get("run", "ahp_table")) c.ahp_table = resolve(v->first);
    if (auto v = get("run", "output")) c.output_dir = resolve(v->first);

    if (auto v = get("grid", "scales"))
        for (const auto& s : detail::list_of(v->first)) {
            const double d = detail::number_of(s, v->second);
            if (d < 1 || d != std::floor(d)) throw parse_error("scales must be positive integers", v->second);
            c.scales.push_back(static_cast<std::int64_t>(d));
        }
    if (auto v = get("grid", "domains"))
        for (const auto& s : detail::list_of(v->first)) c.domains.push_back(detail::domain_of(s, v->second));
    if (auto v = get("grid", "epsilons"))
        for (const auto& s : detail::list_of(v->first)) {
            const double e = detail::number_of(s, v->second);
            if (!(e > 0.0)) throw parse_error("epsilons must be positive", v->second);
            c.epsilons.push_back(e);
        }
    if (auto v = get("sources", "names"))
        for (const auto& s : detail::list_of(v->first)) {
            if (!is_builtin_source(s)) throw parse_error("unknown built-in source '" + s + "'", v->second);
            c.source_names.push_back(s);
        }
    if (auto v = get("sources", "files"))
        for (const auto& s : detail::list_of(v->first)) c.source_files.push_back(resolve(s));
    if (auto v = get("algorithms", "list"))
        for (const auto& s : detail::list_of(v->first)) {
            try {
                find_algorithm(s);
            } catch (const invalid_input&) {
                throw parse_error("unknown algorithm '" + s + "'", v->second);
            }
            c.algorithms.push_back(s);
        }

    if (auto v = get("tune", "algorithm")) c.tune_algorithm = v->first;
    if (auto v = get("tune", "training")) c.training = detail::list_of(v->first);
    if (auto v = get("tune", "products"))
        for (const auto& s : detail::list_of(v->first)) c.products.push_back(detail::number_of(s, v->second));
    if (auto v = get("tune", "domain")) c.tune_domain = detail::domain_of(v->first, v->second);
    if (auto v = get("tune", "shapes_per_kind")) c.shapes_per_kind = detail::unsigned_of(v->first, v->second);
    if (auto v = get("tune", "trials")) c.tune_trials = detail::unsigned_of(v->first, v->second);
    if (auto v = get("tune", "epsilon")) c.tune_epsilon = detail::number_of(v->first, v->second);
    if (auto v = get("tune", "output")) c.tune_output = v->first;
    return c;
}

/// Checks a config is complete enough to run a benchmark grid.
inline void validate_run_config(const bench_config& c) {
    if (!c.has_seed) throw parse_error("[run] seed is required");
    if (c.scales.empty()) throw parse_error("[grid] scales must not be empty");
    if (c.domains.empty()) throw parse_error("[grid] domains must not be empty");
    if (c.epsilons.empty()) throw parse_error("[grid] epsilons must not be empty");
    if (c.source_names.empty() && c.source_files.empty()) throw parse_error("[sources] must name at least one source");
    if (c.algorithms.empty()) throw parse_error("[algorithms] list must not be empty");
    if (c.n_vectors < 1 || c.n_runs < 1) throw parse_error("[run] n_vectors and n_runs must be positive");
}

inline bench_config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config " + path.string());
    return build_config(parse_config_text(in), path.parent_path());
}

inline bench_config config_from_string(const std::string& text) {
    std::istringstream in(text);
    return build_config(parse_config_text(in));
}

/// Named configurations.
inline bench_config preset_config(const std::string& name) {
    std::string text;
    if (name == "desk-1d") {
        text = "[run]\nseed = 1\n[grid]\nscales = 10000, 100000, 1000000\ndomains = 256, 1024\nepsilons = 0.1\n"
               "[sources]\nnames = synthetic-powerlaw, synthetic-bimodal\n[algorithms]\nlist = identity, hb, dawa\n";
    } else if (name == "desk-2d") {
        text = "[run]\nseed = 1\n[grid]\nscales = 10000, 100000, 1000000\ndomains = 32x32, 64x64\nepsilons = 0.1\n"
               "[sources]\nnames = synthetic-powerlaw, synthetic-bimodal\n[algorithms]\nlist = identity, hb, agrid\n";
    } else if (name == "full-1d") {
        text = "[run]\nseed = 1\n[grid]\nscales = 1000, 10000, 100000, 1000000, 10000000, 100000000\n"
               "domains = 256, 512, 1024, 2048, 4096\nepsilons = 0.1\n"
               "[sources]\nnames = synthetic-powerlaw, synthetic-normal, synthetic-bimodal, synthetic-uniform, "
               "synthetic-sparse\n"
               "[algorithms]\nlist = identity, privelet, h, hb, greedyh, uniform, mwem, mwem_star, ahp, ahp_star, "
               "dpcube, dawa, php, efpa, sf\n";
    } else if (name == "full-2d") {
        text = "[run]\nseed = 1\n[grid]\nscales = 1000, 10000, 100000, 1000000, 10000000, 100000000\n"
               "domains = 32x32, 64x64, 128x128, 256x256\nepsilons = 0.1\n"
               "[sources]\nnames = synthetic-powerlaw, synthetic-normal, synthetic-bimodal, synthetic-uniform, "
               "synthetic-sparse\n"
               "[algorithms]\nlist = identity, privelet, hb, greedyh, uniform, mwem, mwem_star, ahp, ahp_star, "
               "dpcube, dawa, quadtree, ugrid, agrid\n";
    } else {
        throw parse_error("unknown preset '" + name + "' (expected desk-1d, desk-2d, full-1d or full-2d)");
    }
    return config_from_string(text);
}

} // namespace dpbench
