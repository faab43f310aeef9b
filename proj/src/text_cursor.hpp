#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "whydb/error.hpp"

namespace whydb::detail {

// Character cursor with line/column tracking and `%` comment skipping,
// shared by the fact, query and constraint readers.
class TextCursor {
public:
    explicit TextCursor(std::string_view text) : text_(text) {}

    bool at_end() const noexcept { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const noexcept {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

    char get() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_space() {
        while (!at_end()) {
            char c = peek();
            if (c == '%') {
                while (!at_end() && peek() != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                break;
            }
        }
    }

    // Skips whitespace, then consumes `s` if it is next.
    bool accept(std::string_view s) {
        skip_space();
        if (text_.substr(pos_, s.size()) != s) return false;
        for (std::size_t i = 0; i < s.size(); ++i) get();
        return true;
    }

    void expect(std::string_view s) {
        if (!accept(s)) fail("expected '" + std::string(s) + "'" + found());
    }

    std::string found() const {
        if (at_end()) return ", found end of input";
        return ", found '" + std::string(1, peek()) + "'";
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, column_, what); }

    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

    // [a-zA-Z][a-zA-Z0-9_]*
    std::string identifier(const char* what) {
        skip_space();
        if (!ident_start(peek())) fail(std::string("expected ") + what + found());
        std::string out;
        while (!at_end() && ident_char(peek())) out += get();
        return out;
    }

    std::size_t positive_integer(const char* what) {
        skip_space();
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail(std::string("expected ") + what + found());
        std::size_t line = line_, col = column_;
        std::size_t value = 0;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
            value = value * 10 + static_cast<std::size_t>(get() - '0');
            if (value > 0xffffffffu) throw ParseError(line, col, std::string(what) + " out of range");
        }
        if (value == 0) throw ParseError(line, col, std::string(what) + " must be positive");
        return value;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

} // namespace whydb::detail
