#pragma once

#include <stdexcept>
#include <string>

namespace dpbench {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad sizes, mismatched domains, ...).
class invalid_input : public error {
public:
    using error::error;
};

/// The histogram has zero scale, so no shape can be extracted from it.
class undefined_shape : public error {
public:
    using error::error;
};

/// Requested budget fractions add up to more than the whole budget.
class composition_violation : public error {
public:
    using error::error;
};

/// Malformed input file or config text.
class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t line = 0)
        : error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A file could not be opened, read or written.
class io_error : public error {
public:
    using error::error;
};

namespace detail {

inline void require(bool cond, const char* msg) {
    if (!cond) throw invalid_input(msg);
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw invalid_input(msg);
}

} // namespace detail
} // namespace dpbench
