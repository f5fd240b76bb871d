#pragma once

// Data generation: multinomial sampling from a source shape, synthetic shapes for
// training, and histogram CSV ingestion.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dpbench/core.hpp"

namespace dpbench {

/// A named histogram at its native domain.
struct source_dataset {
    std::string name;
    data_vector histogram;

    std::int64_t native_scale() const noexcept { return histogram.scale(); }
};

/// Multinomial(m, p) by sequential binomials; the result sums to m exactly.
inline data_vector sample_multinomial(const shape& p, std::int64_t m, rng_stream& rng) {
    detail::require(m >= 1, "generate: scale must be at least 1");
    std::vector<std::int64_t> out(p.size(), 0);
    std::int64_t left = m;
    double mass = 1.0;
    for (std::size_t i = 0; i < p.size() && left > 0; ++i) {
        if (i + 1 == p.size()) {
            out[i] = left;
            break;
        }
        const double q = mass > 0.0 ? std::clamp(p[i] / mass, 0.0, 1.0) : 1.0;
        out[i] = rng.binomial(left, q);
        left -= out[i];
        mass -= p[i];
    }
    return {p.dom(), std::move(out)};
}

/// Draws a histogram of scale m on `target` from the shape of `source` coarsened to `target`.
inline data_vector generate(const source_dataset& source, const domain& target, std::int64_t m, rng_stream& rng) {
    const shape p = shape_of(coarsen_to(source.histogram, target));
    return sample_multinomial(p, m, rng);
}

enum class shape_kind { powerlaw, normal, uniform };

inline shape_kind parse_shape_kind(std::string_view s) {
    if (s == "powerlaw") return shape_kind::powerlaw;
    if (s == "normal") return shape_kind::normal;
    if (s == "uniform") return shape_kind::uniform;
    throw invalid_input("unknown shape kind '" + std::string(s) + "'");
}

inline std::string to_string(shape_kind k) {
    switch (k) {
    case shape_kind::powerlaw: return "powerlaw";
    case shape_kind::normal: return "normal";
    default: return "uniform";
    }
}

/// Parameters left unset are drawn from the rng.
struct synth_params {
    std::optional<double> exponent; ///< powerlaw: p_i proportional to (i + 1)^-exponent
    std::optional<double> mean;     ///< normal: mode position (cell index)
    std::optional<double> stddev;   ///< normal: width in cells
};

namespace detail {

inline std::vector<double> synth_axis(shape_kind kind, std::size_t n, const synth_params& params, rng_stream& rng) {
    require(n >= 1, "synth_shape: domain must be non-empty");
    std::vector<double> p(n, 1.0);
    const double nd = static_cast<double>(n);
    if (kind == shape_kind::powerlaw) {
        const double a = params.exponent ? *params.exponent : 0.5 + 1.5 * rng.uniform();
        require(std::isfinite(a) && a >= 0.0, "synth_shape: powerlaw exponent must be non-negative");
        for (std::size_t i = 0; i < n; ++i) p[i] = std::pow(static_cast<double>(i + 1), -a);
    } else if (kind == shape_kind::normal) {
        const double mu = params.mean ? *params.mean : nd * rng.uniform();
        const double sigma = params.stddev ? *params.stddev : nd * (1.0 / 32.0 + rng.uniform() * (1.0 / 4.0 - 1.0 / 32.0));
        require(std::isfinite(mu), "synth_shape: normal mean must be finite");
        require(std::isfinite(sigma) && sigma > 0.0, "synth_shape: normal stddev must be positive");
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (static_cast<double>(i) - mu) / sigma;
            p[i] = std::exp(-0.5 * z * z);
        }
    }
    double total = 0.0;
    for (double v : p) total += v;
    if (!(total > 0.0)) {
        // Mode far outside the domain underflows every cell; fall back to the nearest edge.
        std::fill(p.begin(), p.end(), 0.0);
        p[params.mean && *params.mean >= nd ? n - 1 : 0] = 1.0;
        total = 1.0;
    }
    for (auto& v : p) v /= total;
    return p;
}

} // namespace detail

/// Synthetic shape; 2D shapes are the outer product of two independently drawn axes.
inline shape synth_shape(shape_kind kind, const domain& d, const synth_params& params, rng_stream& rng) {
    if (d.dims() == 1) return {d, detail::synth_axis(kind, d.cells(), params, rng)};
    const auto a = detail::synth_axis(kind, d.rows(), params, rng);
    const auto b = detail::synth_axis(kind, d.cols(), params, rng);
    std::vector<double> p(d.cells());
    double total = 0.0;
    for (std::size_t r = 0; r < d.rows(); ++r)
        for (std::size_t c = 0; c < d.cols(); ++c) total += p[r * d.cols() + c] = a[r] * b[c];
    for (auto& v : p) v /= total;
    return {d, std::move(p)};
}

inline shape synth_shape(shape_kind kind, std::size_t n, const synth_params& params, rng_stream& rng) {
    return synth_shape(kind, domain::one_d(n), params, rng);
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::int64_t parse_int(std::string_view text, std::size_t line, const char* what) {
    const std::string t = trim(text);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw parse_error(std::string("expected an integer ") + what + ", got '" + t + "'", line);
    return v;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

} // namespace detail

/// Parses the histogram format: a header `n=<int>` or `rows=<int>,cols=<int>`, then
/// comma-separated non-negative counts in row-major order (any line breaks).
inline source_dataset parse_histogram_csv(std::istream& in, std::string name) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<domain> dom;
    while (std::getline(in, line)) {
        ++lineno;
        if (!detail::trim(line).empty()) break;
    }
    const std::string header = detail::trim(line);
    if (header.empty()) throw parse_error("missing header line", lineno == 0 ? 1 : lineno);
    const auto fields = detail::split(header, ',');
    auto value_of = [&](const std::string& field, const char* key) -> std::int64_t {
        const auto eq = field.find('=');
        if (eq == std::string::npos || detail::trim(field.substr(0, eq)) != key)
            throw parse_error(std::string("header must be 'n=<int>' or 'rows=<int>,cols=<int>'"), lineno);
        const auto v = detail::parse_int(field.substr(eq + 1), lineno, key);
        if (v < 1) throw parse_error(std::string(key) + " must be positive", lineno);
        return v;
    };
    if (fields.size() == 1)
        dom = domain::one_d(static_cast<std::size_t>(value_of(fields[0], "n")));
    else if (fields.size() == 2)
        dom = domain::two_d(static_cast<std::size_t>(value_of(fields[0], "rows")),
                            static_cast<std::size_t>(value_of(fields[1], "cols")));
    else
        throw parse_error("header must be 'n=<int>' or 'rows=<int>,cols=<int>'", lineno);

    std::vector<std::int64_t> counts;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        for (const auto& cell : detail::split(t, ',')) {
            if (cell.empty()) continue;
            const auto v = detail::parse_int(cell, lineno, "count");
            if (v < 0) throw parse_error("negative count " + cell, lineno);
            counts.push_back(v);
        }
    }
    if (counts.size() != dom->cells())
        throw parse_error("expected " + std::to_string(dom->cells()) + " counts for domain " + dom->to_string() +
                              ", found " + std::to_string(counts.size()),
                          lineno);
    return {std::move(name), data_vector(*dom, std::move(counts))};
}

inline source_dataset load_histogram_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open histogram file " + path.string());
    return parse_histogram_csv(in, path.stem().string());
}

inline void write_histogram_csv(std::ostream& out, const data_vector& x) {
    if (x.dom().dims() == 1)
        out << "n=" << x.size() << "\n";
    else
        out << "rows=" << x.dom().rows() << ",cols=" << x.dom().cols() << "\n";
    const std::size_t width = x.dom().cols() > 1 ? x.dom().cols() : x.size();
    for (std::size_t i = 0; i < x.size(); ++i) out << x[i] << ((i + 1) % width == 0 ? "\n" : ",");
}

/// Built-in sources: deterministic synthetic histograms at a native domain of 4096 cells
/// (1D) or 256 x 256 (2D) and native scale 10^6. Every benchmark domain size divides them.
inline std::vector<std::string> builtin_source_names() {
    return {"synthetic-powerlaw", "synthetic-normal", "synthetic-bimodal", "synthetic-uniform", "synthetic-sparse"};
}

inline source_dataset builtin_source(const std::string& name, std::size_t dims) {
    detail::require(dims == 1 || dims == 2, "builtin_source: dims must be 1 or 2");
    const domain d = dims == 1 ? domain::one_d(4096) : domain::two_d(256, 256);
    const std::int64_t native = 1'000'000;
    std::uint64_t tag = 0;
    for (char ch : name) tag = tag * 131 + static_cast<unsigned char>(ch);
    rng_stream rng(0x736f75726365ULL, tag * 2 + dims);
    std::vector<double> p;
    if (name == "synthetic-powerlaw") {
        const auto s = synth_shape(shape_kind::powerlaw, d, {1.2, {}, {}}, rng);
        p.assign(s.probs().begin(), s.probs().end());
    } else if (name == "synthetic-normal") {
        const auto s = synth_shape(shape_kind::normal, d, {{}, d.rows() * 0.4, d.rows() / 12.0}, rng);
        p.assign(s.probs().begin(), s.probs().end());
    } else if (name == "synthetic-bimodal") {
        const auto a = synth_shape(shape_kind::normal, d, {{}, d.rows() * 0.25, d.rows() / 40.0}, rng);
        const auto b = synth_shape(shape_kind::normal, d, {{}, d.rows() * 0.7, d.rows() / 10.0}, rng);
        p.resize(d.cells());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = 0.6 * a[i] + 0.4 * b[i];
    } else if (name == "synthetic-uniform") {
        p.assign(d.cells(), 1.0 / static_cast<double>(d.cells()));
    } else if (name == "synthetic-sparse") {
        // A handful of heavy cells over a thin uniform floor.
        p.assign(d.cells(), 0.05 / static_cast<double>(d.cells()));
        for (int k = 0; k < 24; ++k) p[rng.uniform_index(d.cells())] += 0.95 / 24.0;
    } else {
        throw invalid_input("unknown built-in source '" + name + "'");
    }
    double total = 0.0;
    for (double v : p) total += v;
    for (auto& v : p) v /= total;
    return {name, sample_multinomial(shape(d, std::move(p)), native, rng)};
}

inline bool is_builtin_source(const std::string& name) {
    for (const auto& n : builtin_source_names())
        if (n == name) return true;
    return false;
}

} // namespace dpbench
