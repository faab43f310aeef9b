#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace whydb {

enum class ErrorKind {
    parse,
    duplicate_fact,
    duplicate_tid,
    arity_clash,
    unknown_tid,
    unsafe_variable,
    invalid_constraint,
    open_query,
    irreparable,
    precondition,
    size_guard,
    name_collision,
    invalid_option,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this type; the CLI maps
// the kind to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Usage-level failures (bad input text) as opposed to domain failures.
    bool is_input_error() const noexcept;

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace whydb
