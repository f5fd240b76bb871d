#pragma once

// CSV serialization of trial reports and summaries, plus the plot-data exports.

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>
#include <string>
#include <vector>

#include "dpbench/errors.hpp"
#include "dpbench/harness/trials.hpp"

namespace dpbench {

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double to_double(const std::string& s, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw parse_error("expected a number, got '" + s + "'", line);
    return v;
}

inline std::int64_t to_int(const std::string& s, std::size_t line) {
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size()) throw parse_error("expected an integer, got '" + s + "'", line);
    return v;
}

/// Reads a CSV with a header; returns rows as column-name maps. Missing columns throw.
inline std::vector<std::map<std::string, std::string>> read_csv(std::istream& in,
                                                                 const std::vector<std::string>& required) {
    std::string line;
    if (!std::getline(in, line)) throw parse_error("missing CSV header", 1);
    const auto header = split_csv(line);
    for (const auto& col : required) {
        bool found = false;
        for (const auto& h : header) found = found || h == col;
        if (!found) throw parse_error("missing column '" + col + "'", 1);
    }
    std::vector<std::map<std::string, std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != header.size()) throw parse_error("wrong number of fields", lineno);
        std::map<std::string, std::string> row;
        for (std::size_t i = 0; i < f.size(); ++i) row[header[i]] = f[i];
        row["__line"] = std::to_string(lineno);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace detail

inline const std::vector<std::string>& trial_columns() {
    static const std::vector<std::string> c{"algorithm", "shape", "scale", "domain", "epsilon", "trial", "error"};
    return c;
}

/// One row per successful sample.
inline void write_trials_csv(std::ostream& out, const std::vector<trial_report>& reports) {
    out << "algorithm,shape,scale,domain,epsilon,trial,error\n";
    for (const auto& r : reports)
        for (const auto& s : r.samples) {
            if (s.failed) continue;
            out << r.algorithm << ',' << r.shape << ',' << r.scale << ',' << r.domain << ',' << format_double(r.epsilon)
                << ',' << s.trial(r.n_runs) << ',' << format_double(s.error) << '\n';
        }
}

struct trial_row {
    std::string algorithm, shape, domain;
    std::int64_t scale = 0;
    double epsilon = 0.0;
    std::size_t trial = 0;
    double error = 0.0;

    friend bool operator==(const trial_row&, const trial_row&) = default;
};

inline std::vector<trial_row> read_trials_csv(std::istream& in) {
    std::vector<trial_row> out;
    for (const auto& row : detail::read_csv(in, trial_columns())) {
        const std::size_t line = std::stoul(row.at("__line"));
        out.push_back({row.at("algorithm"), row.at("shape"), row.at("domain"), detail::to_int(row.at("scale"), line),
                       detail::to_double(row.at("epsilon"), line),
                       static_cast<std::size_t>(detail::to_int(row.at("trial"), line)),
                       detail::to_double(row.at("error"), line)});
    }
    return out;
}

struct summary_row {
    std::string algorithm, shape, domain;
    std::int64_t scale = 0;
    double epsilon = 0.0;
    double mean = 0.0, p95 = 0.0, std_error = 0.0;
    std::size_t samples = 0, failures = 0;
    bool competitive = false;

    friend bool operator==(const summary_row&, const summary_row&) = default;
};

inline const std::vector<std::string>& summary_columns() {
    static const std::vector<std::string> c{"algorithm", "shape", "scale",  "domain", "epsilon",  "mean",
                                            "p95",       "stderr", "samples", "failures", "competitive"};
    return c;
}

inline void write_summary_csv(std::ostream& out, const std::vector<summary_row>& rows) {
    out << "algorithm,shape,scale,domain,epsilon,mean,p95,stderr,samples,failures,competitive\n";
    for (const auto& r : rows)
        out << r.algorithm << ',' << r.shape << ',' << r.scale << ',' << r.domain << ',' << format_double(r.epsilon) << ','
            << format_double(r.mean) << ',' << format_double(r.p95) << ',' << format_double(r.std_error) << ','
            << r.samples << ',' << r.failures << ',' << (r.competitive ? 1 : 0) << '\n';
}

inline std::vector<summary_row> read_summary_csv(std::istream& in) {
    std::vector<summary_row> out;
    for (const auto& row : detail::read_csv(in, summary_columns())) {
        const std::size_t line = std::stoul(row.at("__line"));
        summary_row r;
        r.algorithm = row.at("algorithm");
        r.shape = row.at("shape");
        r.domain = row.at("domain");
        r.scale = detail::to_int(row.at("scale"), line);
        r.epsilon = detail::to_double(row.at("epsilon"), line);
        r.mean = detail::to_double(row.at("mean"), line);
        r.p95 = detail::to_double(row.at("p95"), line);
        r.std_error = detail::to_double(row.at("stderr"), line);
        r.samples = static_cast<std::size_t>(detail::to_int(row.at("samples"), line));
        r.failures = static_cast<std::size_t>(detail::to_int(row.at("failures"), line));
        r.competitive = detail::to_int(row.at("competitive"), line) != 0;
        out.push_back(std::move(r));
    }
    return out;
}

inline void write_regret_csv(std::ostream& out, const std::map<std::string, double>& regrets) {
    out << "algorithm,regret\n";
    for (const auto& [name, v] : regrets) out << name << ',' << format_double(v) << '\n';
}

/// Error against scale per (algorithm, domain, epsilon), averaged over shapes.
inline void write_error_vs_scale(std::ostream& out, const std::vector<summary_row>& rows) {
    out << "algorithm,domain,epsilon,scale,mean_error,shapes\n";
    std::map<std::tuple<std::string, std::string, double, std::int64_t>, std::pair<double, std::size_t>> acc;
    for (const auto& r : rows) {
        auto& a = acc[{r.algorithm, r.domain, r.epsilon, r.scale}];
        a.first += r.mean;
        a.second += 1;
    }
    for (const auto& [k, v] : acc)
        out << std::get<0>(k) << ',' << std::get<1>(k) << ',' << format_double(std::get<2>(k)) << ',' << std::get<3>(k)
            << ',' << format_double(v.first / static_cast<double>(v.second)) << ',' << v.second << '\n';
}

/// One dot per (algorithm, setting, shape) next to the mean over shapes of that setting.
inline void write_dataset_dots(std::ostream& out, const std::vector<summary_row>& rows) {
    out << "algorithm,domain,epsilon,scale,shape,mean_error,cross_dataset_mean\n";
    std::map<std::tuple<std::string, std::string, double, std::int64_t>, std::pair<double, std::size_t>> acc;
    for (const auto& r : rows) {
        auto& a = acc[{r.algorithm, r.domain, r.epsilon, r.scale}];
        a.first += r.mean;
        a.second += 1;
    }
    for (const auto& r : rows) {
        const auto& a = acc.at({r.algorithm, r.domain, r.epsilon, r.scale});
        out << r.algorithm << ',' << r.domain << ',' << format_double(r.epsilon) << ',' << r.scale << ',' << r.shape << ','
            << format_double(r.mean) << ',' << format_double(a.first / static_cast<double>(a.second)) << '\n';
    }
}

} // namespace dpbench
