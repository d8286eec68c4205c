// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/corpus.hpp"

#include "t2s/error.hpp"
#include "t2s/sql_lexer.hpp"
#include "t2s/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace t2s {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// preprocess

namespace {

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == '\n') {
            lines.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return lines;
}

bool blank(std::string_view line) { return text::trim(line).empty(); }

// Code fences become nothing; "## Title" becomes "Title".
std::string strip_block_markdown(std::string_view s) {
    std::string out;
    bool first = true;
    for (auto& line : split_lines(s)) {
        std::string_view t = text::trim(line);
        if (t.starts_with("```") || t.starts_with("~~~")) continue;
        std::string kept = line;
        if (!t.empty() && t[0] == '#') {
            std::size_t h = 0;
            while (h < t.size() && t[h] == '#') ++h;
            if (h <= 6 && h < t.size() && (t[h] == ' ' || t[h] == '\t'))
                kept = std::string(text::trim(t.substr(h)));
        }
        if (!first) out += '\n';
        out += kept;
        first = false;
    }
    return out;
}

// <tag ...>, </tag>, <br/>: a tag must open with a letter or '/' + letter.
std::string strip_html(std::string_view s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '<') {
            std::size_t j = i + 1;
            if (j < s.size() && s[j] == '/') ++j;
            if (j < s.size() && text::is_alpha(s[j])) {
                std::size_t k = j;
                while (k < s.size() && s[k] != '>' && s[k] != '<' && s[k] != '\n') ++k;
                if (k < s.size() && s[k] == '>') {
                    i = k + 1;
                    continue;
                }
            }
        }
        out += s[i++];
    }
    return out;
}

// " @user" (or a leading "@user") is dropped together with its separator.
bool word_char(char c) { return text::is_ident_char(c) || static_cast<unsigned char>(c) >= 0x80; }

// "@name" preceded by a word character is an e-mail address, not a tag.
std::string strip_user_tags(std::string_view s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        const bool at_boundary = i == 0 || (!word_char(s[i - 1]) && s[i - 1] != '@' && s[i - 1] != '.');
        if (s[i] == '@' && at_boundary && i + 1 < s.size() && text::is_ident_char(s[i + 1])) {
            std::size_t j = i + 1;
            while (j < s.size() && text::is_ident_char(s[j])) ++j;
            while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
            i = j;
            continue;
        }
        out += s[i++];
    }
    return out;
}

// **x**, __x__, *x*, _x_ keep their content. Single markers must sit at a
// word boundary so identifiers like city_name and COUNT(*) survive.
std::string strip_emphasis(std::string_view s) {
    std::string out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '*' || c == '_') {
            const bool dbl = i + 1 < s.size() && s[i + 1] == c;
            const std::size_t w = dbl ? 2 : 1;
            const bool open_ok = (i == 0 || !word_char(s[i - 1])) && i + w < s.size() &&
                                 !text::is_space(s[i + w]) && s[i + w] != c;
            if (open_ok) {
                const std::string marker(w, c);
                std::size_t close = s.find(marker, i + w);
                while (close != std::string::npos) {
                    const bool close_ok = !text::is_space(s[close - 1]) &&
                                          (close + w >= s.size() || !word_char(s[close + w])) &&
                                          (close + w >= s.size() || s[close + w] != c);
                    if (close_ok) break;
                    close = s.find(marker, close + 1);
                }
                if (close != std::string::npos && s.substr(i + w, close - i - w).find('\n') == std::string::npos) {
                    out.append(s.substr(i + w, close - i - w));
                    i = close + w;
                    continue;
                }
            }
        }
        out += s[i++];
    }
    return out;
}

std::string collapse_blank_lines(std::string_view s) {
    std::string out;
    bool prev_blank = false;
    bool first = true;
    for (auto& line : split_lines(s)) {
        std::string_view l = line;
        while (!l.empty() && (l.back() == ' ' || l.back() == '\t' || l.back() == '\r')) l.remove_suffix(1);
        const bool b = blank(l);
        if (b && prev_blank) continue;
        if (b) {
            prev_blank = true;
            continue;
        }
        if (!first) out += '\n';
        out.append(l);
        first = false;
        prev_blank = false;
    }
    return out;
}

std::string preprocess_once(std::string_view raw) {
    std::string s = strip_block_markdown(raw);
    s = strip_html(s);
    s = strip_user_tags(s);
    s = strip_emphasis(s);
    s = collapse_blank_lines(s);
    return std::string(text::trim(s));
}

}  // namespace

std::string preprocess(std::string_view raw) {
    std::string cur = preprocess_once(raw);
    for (int guard = 0; guard < 64; ++guard) {
        std::string next = preprocess_once(cur);
        if (next == cur) break;
        cur = std::move(next);
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Dictionary text

namespace {

std::string quote_list(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += "'" + items[i] + "'";
    }
    return out + "]";
}

std::string greedy_wrap(const std::vector<std::string>& pieces, std::size_t width,
                        const std::string& indent) {
    std::string out;
    std::size_t line_len = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const std::string& p = pieces[i];
        if (i == 0) {
            out = p;
            line_len = p.size();
            continue;
        }
        if (width > 0 && line_len + 1 + p.size() > width) {
            out += "\n" + indent + p;
            line_len = indent.size() + p.size();
        } else {
            out += " " + p;
            line_len += 1 + p.size();
        }
    }
    return out;
}

}  // namespace

std::string schema_dict_text(const DatabaseSchema& schema, const DictStyle& style) {
    // Pieces joined by single spaces; a break replaces that space.
    std::vector<std::string> field_pieces;
    std::vector<std::string> table_pieces;
    const std::string db = "{'database': '" + schema.name() + "',";
    field_pieces.push_back(db);
    std::string table_acc = db + " 'metadata': [";
    const auto& tables = schema.tables();
    for (std::size_t i = 0; i < tables.size(); ++i) {
        std::vector<std::string> cols;
        for (const auto& c : tables[i].columns) cols.push_back(c.name);
        const std::string name_part = "{'name': '" + tables[i].name + "',";
        const std::string cols_part = "'columns': " + quote_list(cols) + "}" +
                                      (i + 1 == tables.size() ? "]" : ",");
        if (i == 0)
            field_pieces.push_back("'metadata': [" + name_part);
        else
            field_pieces.push_back(name_part);
        field_pieces.push_back(cols_part);
        table_acc += name_part + " " + cols_part;
        table_pieces.push_back(table_acc);
        table_acc.clear();
    }
    switch (style.wrap) {
        case DictWrap::none: return greedy_wrap(field_pieces, 0, "");
        case DictWrap::field: return greedy_wrap(field_pieces, style.width, style.continuation_indent);
        case DictWrap::table: return greedy_wrap(table_pieces, style.width, style.continuation_indent);
    }
    return greedy_wrap(field_pieces, 0, "");
}

// ---------------------------------------------------------------------------
// Training strings

TrainingLayout TrainingLayout::quoted_fieldwise() {
    TrainingLayout l;
    l.labels = LabelStyle::spaced;
    l.instruction_quote = InstructionQuote::single;
    l.schema = {DictWrap::field, 40, " "};
    l.response = ResponseStyle::quoted_wrapped;
    l.response_width = 116;
    return l;
}

TrainingLayout TrainingLayout::compact_clauses() {
    TrainingLayout l;
    l.labels = LabelStyle::compact;
    l.instruction_quote = InstructionQuote::double_quote;
    l.schema = {DictWrap::table, 109, ""};
    l.response = ResponseStyle::clause_per_line;
    return l;
}

namespace {

std::string quote_instruction(const std::string& q, InstructionQuote style) {
    switch (style) {
        case InstructionQuote::none: return q;
        case InstructionQuote::double_quote: return "\"" + q + "\"";
        case InstructionQuote::single:
            if (q.size() >= 2 && q.ends_with(" ?"))
                return "'" + q.substr(0, q.size() - 2) + "' ?";
            return "'" + q + "'";
    }
    return q;
}

std::string word_wrap(std::string_view s, std::size_t width) {
    if (width == 0) return std::string(s);
    std::vector<std::string> words;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ' ') {
            words.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return greedy_wrap(words, width, "");
}

// Break before top-level clause keywords; JOIN modifiers move with their JOIN.
std::string clause_lines(const std::string& sql) {
    std::vector<sql::Token> toks;
    try {
        toks = sql::lex(sql);
    } catch (const sql::SyntaxError&) {
        return sql;
    }
    std::vector<std::size_t> breaks;
    int depth = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto& t = toks[i];
        if (t.kind == sql::TokenKind::lparen) ++depth;
        if (t.kind == sql::TokenKind::rparen) --depth;
        if (depth != 0 || t.kind != sql::TokenKind::keyword || i == 0) continue;
        const std::string& k = t.value;
        const bool modifier = k == "LEFT" || k == "INNER" || k == "CROSS";
        const bool clause = k == "FROM" || k == "WHERE" || k == "GROUP" || k == "HAVING" ||
                            k == "ORDER" || k == "LIMIT" || k == "UNION" || k == "INTERSECT" ||
                            k == "EXCEPT" || modifier;
        const bool bare_join = k == "JOIN" && !(toks[i - 1].kind == sql::TokenKind::keyword &&
                                                (toks[i - 1].value == "LEFT" || toks[i - 1].value == "INNER" ||
                                                 toks[i - 1].value == "CROSS" || toks[i - 1].value == "OUTER"));
        if (clause || bare_join) breaks.push_back(t.offset);
    }
    std::string out;
    std::size_t pos = 0;
    for (std::size_t b : breaks) {
        out.append(sql, pos, b - pos);
        while (!out.empty() && text::is_space(out.back())) out.pop_back();
        out += '\n';
        pos = b;
    }
    out.append(sql, pos, std::string::npos);
    return out;
}

std::string format_response(const std::string& sql, const TrainingLayout& layout) {
    switch (layout.response) {
        case ResponseStyle::verbatim: return sql;
        case ResponseStyle::quoted_wrapped: return word_wrap("'" + sql + "'", layout.response_width);
        case ResponseStyle::clause_per_line: return clause_lines(sql);
    }
    return sql;
}

std::string label(LabelStyle style, const char* name) {
    return std::string(style == LabelStyle::spaced ? "# " : "#") + name + ":";
}

}  // namespace

TrainingString format_training_point(const ExamplePoint& point, const DatabaseSchema& schema,
                                     const TrainingLayout& layout) {
    if (point.schema_id != schema.name())
        throw Error(ErrorKind::data, "point '" + point.id + "' references schema '" + point.schema_id +
                                         "' but was given '" + schema.name() + "'");
    std::string out;
    out += label(layout.labels, "Instruction") + "\n";
    out += quote_instruction(point.instruction, layout.instruction_quote) + "\n\n";
    out += label(layout.labels, "Schema") + "\n";
    out += schema_dict_text(schema, layout.schema) + "\n\n";
    out += label(layout.labels, "Response") + "\n";
    out += format_response(point.gold_sql, layout);
    return {std::move(out)};
}

TrainingBlocks parse_training_string(std::string_view s) {
    struct Found {
        std::size_t pos;
        std::size_t len;
    };
    auto find_label = [&](const char* name) -> Found {
        std::vector<Found> hits;
        for (const std::string& lbl : {std::string("# ") + name + ":", std::string("#") + name + ":"}) {
            std::size_t p = s.find(lbl);
            while (p != std::string_view::npos) {
                if (p == 0 || s[p - 1] == '\n') hits.push_back({p, lbl.size()});
                p = s.find(lbl, p + 1);
            }
        }
        if (hits.size() != 1)
            throw Error(ErrorKind::parse, std::string("training string: expected exactly one '") + name +
                                              "' label, found " + std::to_string(hits.size()));
        return hits[0];
    };
    const Found ins = find_label("Instruction");
    const Found sch = find_label("Schema");
    const Found rsp = find_label("Response");
    if (!(ins.pos < sch.pos && sch.pos < rsp.pos))
        throw Error(ErrorKind::parse, "training string: labels out of order");
    auto body = [&](const Found& f, std::size_t end) {
        return std::string(text::trim(s.substr(f.pos + f.len, end - f.pos - f.len)));
    };
    return {body(ins, sch.pos), body(sch, rsp.pos), body(rsp, s.size())};
}

// ---------------------------------------------------------------------------
// Corpus I/O

namespace {

std::optional<std::string> string_field(const json& rec, const char* key) {
    if (!rec.contains(key) || !rec[key].is_string()) return std::nullopt;
    return rec[key].get<std::string>();
}

ExamplePoint decode_record(const json& rec, std::size_t index, const SchemaCatalog& catalog) {
    const std::string where = "record " + std::to_string(index);
    if (!rec.is_object()) throw Error(ErrorKind::data, where + ": not a JSON object");
    ExamplePoint p;
    for (const char* key : {"question", "db_id", "query"})
        if (!string_field(rec, key))
            throw Error(ErrorKind::data, where + ": missing field '" + key + "'");
    p.instruction = *string_field(rec, "question");
    p.schema_id = *string_field(rec, "db_id");
    p.gold_sql = *string_field(rec, "query");
    if (rec.contains("id")) {
        p.id = rec["id"].is_string() ? rec["id"].get<std::string>() : rec["id"].dump();
    } else {
        p.id = std::to_string(index);
    }
    if (text::trim(p.instruction).empty()) throw Error(ErrorKind::data, where + ": empty question");
    if (text::trim(p.gold_sql).empty()) throw Error(ErrorKind::data, where + ": empty query");
    if (!catalog.contains(p.schema_id))
        throw Error(ErrorKind::data, where + ": unknown schema id '" + p.schema_id + "'");
    return p;
}

template <typename OnError>
std::vector<ExamplePoint> load_impl(std::string_view source, const SchemaCatalog& catalog, OnError on_error) {
    std::vector<ExamplePoint> out;
    const auto first = source.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return out;
    if (source[first] == '[') {
        json arr;
        try {
            arr = json::parse(source);
        } catch (const json::parse_error& e) {
            throw Error(ErrorKind::parse, std::string("dataset: ") + e.what());
        }
        for (std::size_t i = 0; i < arr.size(); ++i) {
            try {
                out.push_back(decode_record(arr[i], i, catalog));
            } catch (const Error& e) {
                on_error(e);
            }
        }
        return out;
    }
    std::size_t index = 0;
    for (auto& line : split_lines(source)) {
        if (blank(line)) continue;
        const std::size_t i = index++;
        try {
            json rec;
            try {
                rec = json::parse(line);
            } catch (const json::parse_error& e) {
                throw Error(ErrorKind::parse, "record " + std::to_string(i) + ": " + e.what());
            }
            out.push_back(decode_record(rec, i, catalog));
        } catch (const Error& e) {
            on_error(e);
        }
    }
    return out;
}

}  // namespace

std::vector<ExamplePoint> load_corpus(std::string_view source, const SchemaCatalog& catalog) {
    return load_impl(source, catalog, [](const Error& e) { throw e; });
}

std::vector<ExamplePoint> load_corpus_lenient(std::string_view source, const SchemaCatalog& catalog,
                                              std::vector<std::string>& problems) {
    return load_impl(source, catalog, [&](const Error& e) { problems.emplace_back(e.what()); });
}

std::string serialize_corpus(std::span<const ExamplePoint> points) {
    std::string out;
    for (const auto& p : points) {
        ordered_json rec;
        rec["id"] = p.id;
        rec["db_id"] = p.schema_id;
        rec["question"] = p.instruction;
        rec["query"] = p.gold_sql;
        out += rec.dump() + "\n";
    }
    return out;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

CorpusSplit split_corpus(std::span<const ExamplePoint> points, std::uint64_t seed, double fraction) {
    if (points.size() < 2)
        throw Error(ErrorKind::data, "cannot split fewer than 2 points");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw Error(ErrorKind::config, "split fraction must lie in (0, 1)");
    const std::size_t n = points.size();
    auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    const auto perm = seeded_permutation(n, seed);
    std::vector<bool> in_train(n, false);
    for (std::size_t i = 0; i < n_train; ++i) in_train[perm[i]] = true;
    CorpusSplit split;
    for (std::size_t i = 0; i < n; ++i)
        (in_train[i] ? split.train : split.held_out).push_back(points[i]);
    return split;
}

}  // namespace t2s
