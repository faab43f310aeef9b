#include "whydb/error.hpp"

namespace whydb {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::duplicate_fact: return "duplicate fact";
    case ErrorKind::duplicate_tid: return "duplicate tid";
    case ErrorKind::arity_clash: return "arity clash";
    case ErrorKind::unknown_tid: return "unknown tid";
    case ErrorKind::unsafe_variable: return "unsafe variable";
    case ErrorKind::invalid_constraint: return "invalid constraint";
    case ErrorKind::open_query: return "open query";
    case ErrorKind::irreparable: return "irreparable";
    case ErrorKind::precondition: return "precondition failure";
    case ErrorKind::size_guard: return "size guard exceeded";
    case ErrorKind::name_collision: return "name collision";
    case ErrorKind::invalid_option: return "invalid option";
    }
    return "error";
}

bool Error::is_input_error() const noexcept {
    switch (kind_) {
    case ErrorKind::irreparable:
    case ErrorKind::precondition:
    case ErrorKind::size_guard:
    case ErrorKind::name_collision:
        return false;
    default:
        return true;
    }
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : Error(ErrorKind::parse, std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

} // namespace whydb
