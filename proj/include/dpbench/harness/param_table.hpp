#pragma once

// Learned parameters keyed by the decade of epsilon * scale and the domain size.

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dpbench/errors.hpp"

namespace dpbench {

class param_table {
public:
    param_table() = default;
    explicit param_table(std::vector<std::string> names) : names_(std::move(names)) {}

    /// Decade bucket of an epsilon * scale product.
    static int bucket_of(double product) {
        detail::require(product > 0.0, "param_table: epsilon * scale must be positive");
        return static_cast<int>(std::lround(std::log10(product)));
    }

    const std::vector<std::string>& names() const noexcept { return names_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }

    void set(int bucket, std::size_t cells, std::vector<double> theta) {
        detail::require(theta.size() == names_.size(), "param_table: parameter count mismatch");
        entries_[{bucket, cells}] = std::move(theta);
    }

    /// Nearest stored key: closest domain size (in log scale) first, then closest bucket;
    /// ties go to the smaller key.
    const std::vector<double>& lookup(double product, std::size_t cells) const {
        detail::require(!entries_.empty(), "param_table: table is empty");
        const int bucket = bucket_of(product);
        const double lc = std::log(static_cast<double>(cells));
        const std::vector<double>* best = nullptr;
        double best_d = std::numeric_limits<double>::infinity();
        int best_b = std::numeric_limits<int>::max();
        for (const auto& [key, theta] : entries_) {
            const double d = std::abs(std::log(static_cast<double>(key.second)) - lc);
            const int b = std::abs(key.first - bucket);
            if (d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && b < best_b)) {
                best = &theta;
                best_d = d;
                best_b = b;
            }
        }
        return *best;
    }

    const std::map<std::pair<int, std::size_t>, std::vector<double>>& entries() const noexcept { return entries_; }

    /// CSV: header `bucket,cells,<names...>`, one row per key.
    void write(std::ostream& out) const {
        out << "bucket,cells";
        for (const auto& n : names_) out << "," << n;
        out << "\n";
        for (const auto& [key, theta] : entries_) {
            out << key.first << "," << key.second;
            for (double v : theta) {
                /// shortest text that reads back to the same double
                std::ostringstream s;
                for (int prec = 1; prec <= 17; ++prec) {
                    s.str("");
                    s.precision(prec);
                    s << v;
                    if (std::stod(s.str()) == v) break;
                }
                out << "," << s.str();
            }
            out << "\n";
        }
    }

    static param_table read(std::istream& in) {
        std::string line;
        if (!std::getline(in, line)) throw parse_error("parameter table: missing header", 1);
        auto cells = split_line(line);
        if (cells.size() < 2 || cells[0] != "bucket" || cells[1] != "cells")
            throw parse_error("parameter table: header must start with 'bucket,cells'", 1);
        param_table t(std::vector<std::string>(cells.begin() + 2, cells.end()));
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line == "\r") continue;
            const auto f = split_line(line);
            if (f.size() != cells.size()) throw parse_error("parameter table: wrong field count", lineno);
            try {
                std::vector<double> theta;
                for (std::size_t i = 2; i < f.size(); ++i) theta.push_back(std::stod(f[i]));
                t.set(std::stoi(f[0]), static_cast<std::size_t>(std::stoull(f[1])), std::move(theta));
            } catch (const std::logic_error&) {
                throw parse_error("parameter table: malformed number", lineno);
            }
        }
        return t;
    }

    friend bool operator==(const param_table&, const param_table&) = default;

private:
    static std::vector<std::string> split_line(const std::string& line) {
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

    std::vector<std::string> names_;
    std::map<std::pair<int, std::size_t>, std::vector<double>> entries_;
};

} // namespace dpbench
