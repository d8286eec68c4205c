// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/sql_lexer.hpp"

#include "t2s/text.hpp"

#include <array>
#include <sstream>

namespace t2s::sql {

namespace {

std::string describe(std::size_t offset, const std::vector<std::string>& expected,
                     const std::string& detail) {
    std::ostringstream os;
    os << "syntax error at offset " << offset << ": " << detail;
    if (!expected.empty()) {
        os << " (expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
        os << ")";
    }
    return os.str();
}

constexpr std::array kKeywords = {
    "ALL",   "AND",    "AS",     "ASC",       "BETWEEN", "BY",     "CROSS",  "DESC",
    "DISTINCT", "EXCEPT", "EXISTS", "FROM",   "GROUP",   "HAVING", "IN",     "INNER",
    "INTERSECT", "IS",  "JOIN",   "LEFT",      "LIKE",    "LIMIT",  "NOT",    "NULL",
    "ON",    "OR",     "ORDER",  "OUTER",     "SELECT",  "UNION",  "WHERE",  "WITH",
};

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected,
                         const std::string& detail)
    : Error(ErrorKind::parse, describe(offset, expected, detail)),
      offset_(offset),
      expected_(std::move(expected)) {}

bool is_keyword(std::string_view word) {
    for (const char* k : kKeywords)
        if (text::iequals(word, k)) return true;
    return false;
}

std::vector<Token> lex(std::string_view sql) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = sql.size();
    auto push = [&](TokenKind kind, std::string value, std::size_t start, char quote = 0) {
        out.push_back({kind, std::move(value), start, i - start, quote});
    };
    while (i < n) {
        const char c = sql[i];
        if (text::is_space(c)) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (c == '-' && i + 1 < n && sql[i + 1] == '-') {  // line comment
            while (i < n && sql[i] != '\n') ++i;
            continue;
        }
        if (text::is_alpha(c) || c == '_') {
            while (i < n && text::is_ident_char(sql[i])) ++i;
            std::string word(sql.substr(start, i - start));
            if (is_keyword(word))
                push(TokenKind::keyword, text::upper(word), start);
            else
                push(TokenKind::identifier, std::move(word), start);
            continue;
        }
        if (text::is_digit(c) || (c == '.' && i + 1 < n && text::is_digit(sql[i + 1]))) {
            while (i < n && text::is_digit(sql[i])) ++i;
            if (i < n && sql[i] == '.') {
                ++i;
                while (i < n && text::is_digit(sql[i])) ++i;
            }
            if (i < n && (sql[i] == 'e' || sql[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < n && (sql[j] == '+' || sql[j] == '-')) ++j;
                if (j < n && text::is_digit(sql[j])) {
                    i = j;
                    while (i < n && text::is_digit(sql[i])) ++i;
                }
            }
            push(TokenKind::number, std::string(sql.substr(start, i - start)), start);
            continue;
        }
        if (c == '\'' || c == '"') {
            std::string value;
            ++i;
            bool closed = false;
            while (i < n) {
                if (sql[i] == c) {
                    if (i + 1 < n && sql[i + 1] == c) {  // doubled quote escape
                        value += c;
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                value += sql[i++];
            }
            if (!closed) throw SyntaxError(start, {}, "unterminated string literal");
            push(TokenKind::string, std::move(value), start, c);
            continue;
        }
        if (c == '`' || c == '[') {
            const char close = c == '`' ? '`' : ']';
            ++i;
            const std::size_t body = i;
            while (i < n && sql[i] != close) ++i;
            if (i >= n) throw SyntaxError(start, {}, "unterminated quoted identifier");
            std::string value(sql.substr(body, i - body));
            ++i;
            push(TokenKind::quoted_identifier, std::move(value), start, c);
            continue;
        }
        switch (c) {
            case '(': ++i; push(TokenKind::lparen, "(", start); continue;
            case ')': ++i; push(TokenKind::rparen, ")", start); continue;
            case ',': ++i; push(TokenKind::comma, ",", start); continue;
            case '.': ++i; push(TokenKind::dot, ".", start); continue;
            case ';': ++i; push(TokenKind::semicolon, ";", start); continue;
            case '?': ++i; push(TokenKind::op, "?", start); continue;
            case '+': case '-': case '*': case '/': case '%': case '=':
                ++i;
                if (c == '=' && i < n && sql[i] == '=') ++i;  // tolerate ==
                push(TokenKind::op, std::string(1, c), start);
                continue;
            case '!':
                if (i + 1 < n && sql[i + 1] == '=') {
                    i += 2;
                    push(TokenKind::op, "!=", start);
                    continue;
                }
                break;
            case '<':
                ++i;
                if (i < n && (sql[i] == '=' || sql[i] == '>')) {
                    const bool ne = sql[i] == '>';
                    ++i;
                    push(TokenKind::op, ne ? "!=" : "<=", start);
                } else {
                    push(TokenKind::op, "<", start);
                }
                continue;
            case '>':
                ++i;
                if (i < n && sql[i] == '=') {
                    ++i;
                    push(TokenKind::op, ">=", start);
                } else {
                    push(TokenKind::op, ">", start);
                }
                continue;
            default: break;
        }
        throw SyntaxError(start, {}, std::string("unexpected character '") + c + "'");
    }
    out.push_back({TokenKind::end, "", n, 0, 0});
    return out;
}

}  // namespace t2s::sql
