// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "t2s/error.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace t2s::sql {

enum class TokenKind {
    identifier,         // bare name (not a reserved keyword)
    quoted_identifier,  // `name` or [name]
    keyword,            // value is upper-cased
    number,
    string,             // '...' or "..." (SPIDER uses both for literals)
    op,                 // = != <> < > <= >= + - * / % and the ? placeholder
    lparen,
    rparen,
    comma,
    dot,
    semicolon,
    end,
};

struct Token {
    TokenKind kind = TokenKind::end;
    std::string value;        // keyword upper-cased, string unescaped, else raw
    std::size_t offset = 0;   // byte offset into the source
    std::size_t length = 0;   // byte length in the source
    char quote = 0;           // quote character for strings / quoted identifiers
};

/// Syntax error with the byte offset of the offending token and the set of
/// tokens that would have been accepted there.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& detail);

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

bool is_keyword(std::string_view word);

/// Tokenises `sql`; the result always ends with a TokenKind::end token.
std::vector<Token> lex(std::string_view sql);

}  // namespace t2s::sql
