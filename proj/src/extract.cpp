// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/extract.hpp"

#include "t2s/sql_ast.hpp"
#include "t2s/text.hpp"

#include <optional>
#include <vector>

namespace t2s {

std::string remove_backslashes(std::string_view raw, std::size_t* removed) {
    std::string out;
    out.reserve(raw.size());
    std::size_t count = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '\\') {
            out += raw[i];
            continue;
        }
        ++count;
        if (i + 1 < raw.size()) {
            const char next = raw[i + 1];
            if (next == 'n' || next == 't' || next == 'r') {
                out += next == 'n' ? '\n' : next == 't' ? '\t' : '\r';
                ++i;
            }
        }
    }
    if (removed) *removed = count;
    return out;
}

namespace {

bool word_at(std::string_view s, std::size_t i, std::string_view word) {
    if (i + word.size() > s.size() || !text::iequals(s.substr(i, word.size()), word)) return false;
    if (i > 0 && text::is_ident_char(s[i - 1])) return false;
    const std::size_t e = i + word.size();
    return e == s.size() || !text::is_ident_char(s[e]);
}

bool at_line_start(std::string_view s, std::size_t i) {
    while (i > 0 && (s[i - 1] == ' ' || s[i - 1] == '\t')) --i;
    return i == 0 || s[i - 1] == '\n' || s[i - 1] == '\r';
}

/// Offset just past the last prompt-echo marker, or 0.
std::size_t after_last_marker(std::string_view s) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '#') {
            std::size_t j = i + 1;
            while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
            if (!text::starts_with_ci(s.substr(j), "response")) continue;
            j += 8;
            if (j < s.size() && text::is_ident_char(s[j])) continue;
            while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
            if (j < s.size() && s[j] == ':') ++j;
            best = j;
        } else if (word_at(s, i, "SQL") && at_line_start(s, i) && i + 3 < s.size() && s[i + 3] == ':') {
            best = i + 4;
        }
    }
    return best;
}

/// A position where a statement may begin: the search-region start, a line
/// start, or right after ';', ':', a quote or a fence (ignoring blanks).
bool start_context(std::string_view s, std::size_t i, std::size_t region) {
    std::size_t j = i;
    while (j > region && (s[j - 1] == ' ' || s[j - 1] == '\t')) --j;
    if (j == region) return true;
    const char c = s[j - 1];
    return c == '\n' || c == '\r' || c == ';' || c == ':' || c == '\'' || c == '"' || c == '`';
}

/// Returns the offset of the statement keyword or "(" when one starts at i.
bool statement_start(std::string_view s, std::size_t i) {
    if (word_at(s, i, "SELECT") || word_at(s, i, "WITH")) return true;
    if (s[i] != '(') return false;
    std::size_t j = i + 1;
    while (j < s.size() && (s[j] == '(' || text::is_space(s[j]))) ++j;
    return word_at(s, j, "SELECT");
}

bool preceded_by_set_word(std::string_view s, std::size_t i) {
    std::size_t j = i;
    while (j > 0 && text::is_space(s[j - 1])) --j;
    std::size_t k = j;
    while (k > 0 && text::is_ident_char(s[k - 1])) --k;
    const std::string w = text::upper(s.substr(k, j - k));
    return w == "UNION" || w == "INTERSECT" || w == "EXCEPT" || w == "ALL";
}

bool is_label_line(std::string_view s, std::size_t line_begin) {
    std::size_t j = line_begin;
    while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
    if (j < s.size() && s[j] == '#') return true;
    if (j + 3 <= s.size() && s.substr(j, 3) == "```") return true;
    std::size_t k = j;
    while (k < s.size() && text::is_alpha(s[k])) ++k;
    return k > j && k < s.size() && s[k] == ':' && (k + 1 == s.size() || s[k + 1] != ':');
}

struct Span {
    std::size_t begin;
    std::size_t end;  // exclusive
};

/// Statement end: first ';' outside quotes (inclusive), else a blank line,
/// fence or label line, else the end. A dangling quote at the end is dropped.
Span statement_span(std::string_view s, std::size_t begin) {
    char quote = 0;
    std::size_t quote_open = 0;
    std::size_t i = begin;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (quote) {
            if (c == quote) quote = 0;
            continue;
        }
        if (c == '\'' || c == '"' || c == '`') {
            quote = c;
            quote_open = i;
            continue;
        }
        if (c == ';') return {begin, i + 1};
        if (c == '\n' && i + 1 <= s.size()) {
            std::size_t j = i + 1;
            while (j < s.size() && (s[j] == ' ' || s[j] == '\t' || s[j] == '\r')) ++j;
            if (j >= s.size() || s[j] == '\n') break;  // blank line or trailing blanks
            if (is_label_line(s, i + 1)) break;
        }
        if (c == '`' && s.substr(i, 3) == "```") break;
    }
    std::size_t end = i;
    std::size_t trimmed = end;
    while (trimmed > begin && text::is_space(s[trimmed - 1])) --trimmed;
    if (quote && quote_open == trimmed - 1) end = quote_open;
    return {begin, end};
}

bool parses(std::string_view sql) {
    try {
        sql::parse_sql(sql);
        return true;
    } catch (const Error&) {
        return false;
    }
}

/// Paren depth of position `to`, counted from `from` outside quotes.
int depth_between(std::string_view s, std::size_t from, std::size_t to) {
    int depth = 0;
    char quote = 0;
    for (std::size_t i = from; i < to; ++i) {
        const char c = s[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '\'' || c == '"' || c == '`') {
            quote = c;
        } else if (c == '(') {
            ++depth;
        } else if (c == ')') {
            depth = std::max(0, depth - 1);
        }
    }
    return depth;
}

/// Scans [region, end) for statements. Parsing statements are preferred;
/// after a failed candidate only top-level starts inside it are retried so a
/// subquery never stands in for its broken outer query.
std::optional<Span> last_statement(std::string_view s, std::size_t region) {
    std::optional<Span> parsed;
    std::optional<Span> fallback;
    constexpr std::size_t kNone = std::string_view::npos;
    std::size_t failed_at = kNone;  // start of the enclosing failed candidate
    std::size_t fallback_end = region;
    for (std::size_t i = region; i < s.size(); ++i) {
        if (!statement_start(s, i) || !start_context(s, i, region)) continue;
        if (preceded_by_set_word(s, i)) continue;
        if (failed_at != kNone && depth_between(s, failed_at, i) > 0) continue;
        const Span span = statement_span(s, i);
        if (i >= fallback_end) {
            fallback = span;
            fallback_end = span.end;
        }
        if (parses(s.substr(span.begin, span.end - span.begin))) {
            parsed = span;
            failed_at = kNone;
            i = span.end - 1;
        } else if (failed_at == kNone || i >= statement_span(s, failed_at).end) {
            failed_at = i;
        }
    }
    return parsed ? parsed : fallback;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!text::is_space(s[i])) {
            out += s[i++];
            continue;
        }
        std::size_t j = i;
        bool newline = false;
        while (j < s.size() && text::is_space(s[j])) {
            newline = newline || s[j] == '\n' || s[j] == '\r';
            ++j;
        }
        if (newline) out += ' ';
        else out.append(s.substr(i, j - i));
        i = j;
    }
    return std::string(text::trim(out));
}

}  // namespace

ExtractionResult extract_sql(std::string_view raw) {
    ExtractionResult r;
    const std::string clean = remove_backslashes(raw, &r.backslashes_removed);
    std::optional<Span> span = last_statement(clean, after_last_marker(clean));
    if (!span) span = last_statement(clean, 0);
    if (!span) throw ExtractionError("no SQL statement found in model output", std::string(raw));
    r.sql = collapse_whitespace(std::string_view(clean).substr(span->begin, span->end - span->begin));
    if (r.sql.empty()) throw ExtractionError("no SQL statement found in model output", std::string(raw));
    r.discarded_prefix_len = span->begin;
    r.discarded_suffix_len = clean.size() - span->end;
    return r;
}

}  // namespace t2s
