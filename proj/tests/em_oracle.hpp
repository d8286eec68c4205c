// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Exact-set-match reference: a second, much dumber implementation that lives
// only in the tests. It has its own tokenizer and clause splitter, and it
// compares unordered segments by searching for a matching permutation
// instead of sorting anything. Also home to the labelled query pairs.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace t2s::testing {

namespace oracle {

struct Tok {
    enum K { word, num, str, punct } k;
    std::string v;
};

inline std::vector<Tok> tokenize(const std::string& s) {
    std::vector<Tok> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '\'' || c == '"') {
            std::string text;
            ++i;
            while (i < s.size()) {
                if (s[i] == c && i + 1 < s.size() && s[i + 1] == c) {
                    text += c;
                    i += 2;
                } else if (s[i] == c) {
                    ++i;
                    break;
                } else {
                    text += s[i++];
                }
            }
            out.push_back({Tok::str, text});
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            char* end = nullptr;
            const double v = std::strtod(s.c_str() + i, &end);
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out.push_back({Tok::num, buf});
            i = static_cast<std::size_t>(end - s.c_str());
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string w;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
                w += static_cast<char>(std::tolower(static_cast<unsigned char>(s[i++])));
            out.push_back({Tok::word, w});
        } else {
            std::string p(1, c);
            if (i + 1 < s.size()) {
                const std::string two = s.substr(i, 2);
                if (two == "<=" || two == ">=" || two == "!=" || two == "<>") p = two;
            }
            if (p == "<>") p = "!=";
            i += p == "!=" && s[i] == '<' ? 2 : p.size();
            if (p != ";") out.push_back({Tok::punct, p});
        }
    }
    return out;
}

using Toks = std::vector<Tok>;

inline bool is(const Tok& t, const char* v) { return (t.k == Tok::word || t.k == Tok::punct) && t.v == v; }

// The query form, with every string already normalised.
struct Form {
    bool distinct = false;
    std::vector<std::string> select;
    std::vector<std::string> from_items;
    std::vector<std::string> on;
    std::optional<std::string> where_op;
    std::vector<std::string> where;
    std::vector<std::string> group;
    std::vector<std::string> having;
    std::vector<std::string> order;
    std::string limit;
};

inline std::string repr(const Form& f);

inline Form build(const Toks& t, int depth);

// Splits a token range at depth-0 occurrences of any of `words`.
inline std::vector<Toks> split(const Toks& t, const std::vector<std::string>& words) {
    std::vector<Toks> out(1);
    int d = 0;
    for (const auto& x : t) {
        if (is(x, "(")) ++d;
        if (is(x, ")")) --d;
        bool cut = false;
        if (d == 0)
            for (const auto& w : words) cut = cut || is(x, w.c_str());
        if (cut) out.emplace_back();
        else out.back().push_back(x);
    }
    return out;
}

struct Scope {
    std::map<std::string, std::string> label;  // alias or table -> position label
    std::size_t sources = 0;
    int depth = 0;
};

inline std::string expr(const Toks& t, const Scope& sc) {
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const Tok& x = t[i];
        std::string piece;
        if (is(x, "(") && i + 1 < t.size() && is(t[i + 1], "select")) {
            int d = 0;
            std::size_t j = i;
            for (; j < t.size(); ++j) {
                if (is(t[j], "(")) ++d;
                if (is(t[j], ")") && --d == 0) break;
            }
            piece = "(" + repr(build(Toks(t.begin() + static_cast<long>(i) + 1, t.begin() + static_cast<long>(j)),
                                     sc.depth + 1)) + ")";
            std::replace(piece.begin(), piece.end(), '\t', '~');  // keep tabs for this level's atoms
            i = j;
        } else if (x.k == Tok::str) {
            piece = "'" + x.v + "'";
        } else if (x.k == Tok::num) {
            piece = "#" + x.v;
        } else if (x.k == Tok::word && i + 2 < t.size() && is(t[i + 1], ".")) {
            const auto it = sc.label.find(x.v);
            piece = (it == sc.label.end() ? "?" + x.v : it->second) + "." + t[i + 2].v;
            i += 2;
        } else if (x.k == Tok::word && !(i + 1 < t.size() && is(t[i + 1], "(")) && x.v != "distinct" &&
                   sc.sources == 1) {
            piece = sc.label.begin()->second + "." + x.v;
        } else {
            piece = x.v;
        }
        out += (out.empty() ? "" : " ") + piece;
    }
    return out;
}

inline const std::map<std::string, std::string> kMirror = {{"=", "="}, {"!=", "!="}, {"<", ">"},
                                                    {">", "<"}, {"<=", ">="}, {">=", "<="}};

// An atom is "lhs<TAB>op<TAB>rhs" when it is a comparison, else plain text.
inline std::string atom(const Toks& t, const Scope& sc) {
    int d = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (is(t[i], "(")) ++d;
        if (is(t[i], ")")) --d;
        if (d == 0 && t[i].k == Tok::punct && kMirror.count(t[i].v))
            return expr(Toks(t.begin(), t.begin() + static_cast<long>(i)), sc) + "\t" + t[i].v + "\t" +
                   expr(Toks(t.begin() + static_cast<long>(i) + 1, t.end()), sc);
    }
    return expr(t, sc);
}

inline bool atom_equal(const std::string& a, const std::string& b) {
    if (a == b) return true;
    const auto p1 = a.find('\t'), p2 = a.rfind('\t');
    if (p1 == std::string::npos) return false;
    const std::string lhs = a.substr(0, p1), op = a.substr(p1 + 1, p2 - p1 - 1), rhs = a.substr(p2 + 1);
    return rhs + "\t" + kMirror.at(op) + "\t" + lhs == b;
}

// Backtracking search for a bijection under `eq`.
inline bool permutation_match(const std::vector<std::string>& a, const std::vector<std::string>& b,
                       const std::function<bool(const std::string&, const std::string&)>& eq) {
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    std::function<bool(std::size_t)> go = [&](std::size_t i) {
        if (i == a.size()) return true;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j] || !eq(a[i], b[j])) continue;
            used[j] = true;
            if (go(i + 1)) return true;
            used[j] = false;
        }
        return false;
    };
    return go(0);
}

// Set semantics: every element has a partner on the other side.
inline bool set_match(const std::vector<std::string>& a, const std::vector<std::string>& b,
               const std::function<bool(const std::string&, const std::string&)>& eq) {
    for (const auto& x : a) {
        bool found = false;
        for (const auto& y : b) found = found || eq(x, y);
        if (!found) return false;
    }
    for (const auto& y : b) {
        bool found = false;
        for (const auto& x : a) found = found || eq(x, y);
        if (!found) return false;
    }
    return true;
}

inline Form build(const Toks& all, int depth) {
    // cut into clauses at depth 0
    std::map<std::string, Toks> clause;
    std::string cur;
    int d = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const Tok& x = all[i];
        if (d == 0 && x.k == Tok::word) {
            std::string kw;
            if (x.v == "select" || x.v == "from" || x.v == "where" || x.v == "having" || x.v == "limit") kw = x.v;
            if ((x.v == "group" || x.v == "order") && i + 1 < all.size() && is(all[i + 1], "by")) {
                kw = x.v;
                ++i;
            }
            if (!kw.empty()) {
                cur = kw;
                clause[cur];
                continue;
            }
        }
        if (is(x, "(")) ++d;
        if (is(x, ")")) --d;
        clause[cur].push_back(x);
    }

    Form f;
    Scope sc;
    sc.depth = depth;
    // FROM: sources in order, each "table [as] [alias]", joins introduce kinds and ON
    std::vector<std::pair<std::string, Toks>> ons;
    {
        const Toks& t = clause["from"];
        std::size_t i = 0;
        std::string kind = "inner";
        while (i < t.size()) {
            const std::string table = t[i++].v;
            std::string alias = table;
            if (i < t.size() && is(t[i], "as")) ++i;
            if (i < t.size() && t[i].k == Tok::word && !is(t[i], "join") && !is(t[i], "left") &&
                !is(t[i], "inner") && !is(t[i], "on") && !is(t[i], "cross"))
                alias = t[i++].v;
            const std::string label = "d" + std::to_string(depth) + "s" + std::to_string(++sc.sources);
            sc.label[alias] = label;
            sc.label[table] = sc.label.count(table) ? sc.label[table] : label;
            f.from_items.push_back(kind + " " + table + " " + label);
            Toks on_toks;
            if (i < t.size() && is(t[i], "on")) {
                ++i;
                while (i < t.size() && !is(t[i], ",") && !is(t[i], "join") && !is(t[i], "left") &&
                       !is(t[i], "inner") && !is(t[i], "cross"))
                    on_toks.push_back(t[i++]);
                ons.push_back({label, on_toks});
            }
            kind = "inner";
            while (i < t.size() && (is(t[i], ",") || is(t[i], "join") || is(t[i], "inner") || is(t[i], "left") ||
                                    is(t[i], "cross") || is(t[i], "outer"))) {
                if (is(t[i], "left")) kind = "left";
                ++i;
            }
        }
    }
    for (const auto& [label, t] : ons)
        for (const auto& part : split(t, {"and"})) f.on.push_back(atom(part, sc));

    Toks sel = clause["select"];
    if (!sel.empty() && is(sel[0], "distinct")) {
        f.distinct = true;
        sel.erase(sel.begin());
    }
    for (auto item : split(sel, {","})) {
        if (item.size() >= 2 && is(item[item.size() - 2], "as")) item.resize(item.size() - 2);
        f.select.push_back(expr(item, sc));
    }
    if (clause.count("where")) {
        auto ors = split(clause["where"], {"or"});
        if (ors.size() > 1) {
            f.where_op = "or";
            for (const auto& p : ors) f.where.push_back(atom(p, sc));
        } else {
            f.where_op = "and";
            for (const auto& p : split(clause["where"], {"and"})) f.where.push_back(atom(p, sc));
        }
    }
    if (clause.count("group"))
        for (const auto& p : split(clause["group"], {","})) f.group.push_back(expr(p, sc));
    if (clause.count("having"))
        for (const auto& p : split(clause["having"], {"and"})) f.having.push_back(atom(p, sc));
    if (clause.count("order"))
        for (auto p : split(clause["order"], {","})) {
            std::string dir = "asc";
            if (!p.empty() && (is(p.back(), "asc") || is(p.back(), "desc"))) {
                dir = p.back().v;
                p.pop_back();
            }
            f.order.push_back(expr(p, sc) + " " + dir);
        }
    if (clause.count("limit")) f.limit = expr(clause["limit"], sc);
    return f;
}

inline bool same(const Form& a, const Form& b) {
    const auto exact = [](const std::string& x, const std::string& y) { return x == y; };
    return a.distinct == b.distinct && permutation_match(a.select, b.select, exact) &&
           permutation_match(a.from_items, b.from_items, exact) && set_match(a.on, b.on, atom_equal) &&
           a.where_op == b.where_op && permutation_match(a.where, b.where, atom_equal) &&
           set_match(a.group, b.group, exact) && permutation_match(a.having, b.having, atom_equal) &&
           a.order == b.order && a.limit == b.limit;
}

// Nested queries are compared through a fixed rendering, so this one sorts.
inline std::string repr(const Form& f) {
    auto sorted = [](std::vector<std::string> v) {
        for (auto& s : v) {
            const auto p1 = s.find('\t');
            if (p1 == std::string::npos) continue;
            const auto p2 = s.rfind('\t');
            const std::string mirrored = s.substr(p2 + 1) + "\t" + kMirror.at(s.substr(p1 + 1, p2 - p1 - 1)) +
                                         "\t" + s.substr(0, p1);
            s = std::min(s, mirrored);
        }
        std::sort(v.begin(), v.end());
        std::string out;
        for (const auto& s : v) out += s + ";";
        return out;
    };
    return std::string(f.distinct ? "D" : "") + "S[" + sorted(f.select) + "]F[" + sorted(f.from_items) + "|" +
           sorted(f.on) + "]W" + f.where_op.value_or("") + "[" + sorted(f.where) + "]G[" + sorted(f.group) + "]H[" +
           sorted(f.having) + "]O[" + sorted(f.order) + "]L[" + f.limit + "]";
}

inline bool em(const std::string& pred, const std::string& gold) {
    return same(build(tokenize(pred), 0), build(tokenize(gold), 0));
}

}  // namespace oracle

struct Pair {
    std::string pred;
    std::string gold;
    bool expected;
};

inline const std::string kWyoming =
    "SELECT city_name FROM city WHERE population = ( SELECT MAX ( population ) FROM city WHERE state_name = "
    "\"wyoming\" ) AND state_name = \"wyoming\";";
inline const std::string kScholar =
    "SELECT DISTINCT t1.authorid, t3.paperid FROM paperkeyphrase AS t2 JOIN keyphrase AS t5 ON t2.keyphraseid = "
    "t5.keyphraseid JOIN paper AS t3 ON t3.paperid = t2.paperid JOIN writes AS t4 ON t4.paperid = t3.paperid JOIN "
    "author AS t1 ON t4.authorid = t1.authorid WHERE t1.authorname = \"brian curless\" AND t5.keyphrasename = "
    "\"convolution\";";
inline const std::string kEntrepreneur =
    "SELECT p.date_of_birth FROM people p JOIN entrepreneur e ON p.people_id = e.people_id WHERE e.company != "
    "'Tillman Ernser';";
inline const std::string kSinger = "SELECT country FROM singer WHERE age > 20 GROUP BY country;";
inline const std::string kTop3 = "SELECT name, age FROM singer ORDER BY age DESC LIMIT 3";
inline const std::string kBusy = "SELECT country, COUNT(*) FROM singer GROUP BY country HAVING COUNT(*) > 1";

inline const std::vector<Pair>& pairs() {
    static const std::vector<Pair> p = {
        {kWyoming, kWyoming, true},
        {"SELECT city_name FROM city WHERE state_name='wyoming' ORDER BY population DESC LIMIT 1", kWyoming, false},
        {"select city_name from city where population = (select max(population) from city where state_name = "
         "'wyoming') and state_name = 'wyoming'",
         kWyoming, true},
        {"SELECT city_name FROM city WHERE state_name = 'wyoming' AND population = ( SELECT MAX ( population ) FROM "
         "city WHERE state_name = 'wyoming' )",
         kWyoming, true},
        {"SELECT city_name FROM city WHERE population = ( SELECT MIN ( population ) FROM city WHERE state_name = "
         "'wyoming' ) AND state_name = 'wyoming'",
         kWyoming, false},
        {kScholar, kScholar, true},
        {"SELECT DISTINCT a.authorid, c.paperid FROM paperkeyphrase AS b JOIN keyphrase AS e ON b.keyphraseid = "
         "e.keyphraseid JOIN paper AS c ON c.paperid = b.paperid JOIN writes AS d ON d.paperid = c.paperid JOIN "
         "author AS a ON d.authorid = a.authorid WHERE a.authorname = 'brian curless' AND e.keyphrasename = "
         "'convolution'",
         kScholar, true},
        {"SELECT DISTINCT t1.authorid, t3.paperid FROM paperkeyphrase AS t2 JOIN keyphrase AS t5 ON t2.keyphraseid = "
         "t5.keyphraseid JOIN paper AS t3 ON t3.paperid = t2.paperid JOIN writes AS t4 ON t4.paperid = t3.paperid "
         "JOIN author AS t1 ON t4.authorid = t1.authorid WHERE t5.keyphrasename = \"convolution\" AND t1.authorname "
         "= \"brian curless\"",
         kScholar, true},
        {"SELECT t1.authorid, t3.paperid FROM paperkeyphrase AS t2 JOIN keyphrase AS t5 ON t2.keyphraseid = "
         "t5.keyphraseid JOIN paper AS t3 ON t3.paperid = t2.paperid JOIN writes AS t4 ON t4.paperid = t3.paperid "
         "JOIN author AS t1 ON t4.authorid = t1.authorid WHERE t1.authorname = \"brian curless\" AND "
         "t5.keyphrasename = \"convolution\"",
         kScholar, false},
        {kEntrepreneur, kEntrepreneur, true},
        {"SELECT pe.date_of_birth FROM people AS pe JOIN entrepreneur AS en ON pe.people_id = en.people_id WHERE "
         "en.company != 'Tillman Ernser'",
         kEntrepreneur, true},
        {"SELECT p.date_of_birth FROM people p JOIN entrepreneur e ON p.people_id = e.people_id WHERE e.company <> "
         "'Tillman Ernser'",
         kEntrepreneur, true},
        {"SELECT p.date_of_birth FROM people p JOIN entrepreneur e ON e.people_id = p.people_id WHERE e.company != "
         "'Tillman Ernser'",
         kEntrepreneur, true},
        {"SELECT p.date_of_birth FROM people p JOIN entrepreneur e ON p.people_id = e.people_id WHERE e.company != "
         "'Tillman'",
         kEntrepreneur, false},
        {"SELECT p.date_of_birth FROM people p JOIN entrepreneur e ON p.people_id = e.people_id WHERE e.company = "
         "'Tillman Ernser'",
         kEntrepreneur, false},
        {kSinger, kSinger, true},
        {"SELECT country FROM singer WHERE 20 < age GROUP BY country", kSinger, true},
        {"SELECT country FROM singer WHERE age >= 20 GROUP BY country", kSinger, false},
        {"SELECT country FROM singer WHERE age > 20", kSinger, false},
        {"SELECT country FROM singer WHERE age > 20 GROUP BY country", kSinger, true},
        {"SELECT T1.country FROM singer AS T1 WHERE T1.age > 20 GROUP BY T1.country", kSinger, true},
        {"SELECT name FROM Employees WHERE department = 'Sales'", "SELECT name FROM Employees WHERE department = 'Sales';",
         true},
        {"SELECT name FROM Employees WHERE salary <= 40000", "SELECT name FROM Employees WHERE salary < 40000;", false},
        {"SELECT name FROM employees WHERE salary > 5e4", "SELECT name FROM Employees WHERE salary > 50000;", true},
        {"select sum ( salary ) from employees where department = 'Sales'",
         "SELECT SUM(salary) FROM Employees WHERE department = 'Sales';", true},
        {"SELECT SUM(salary) FROM Employee WHERE dept = 'Sales';",
         "SELECT SUM(salary) FROM Employees WHERE department = 'Sales';", false},
        {"SELECT AVG(salary) FROM Employees WHERE department = 'hr'",
         "SELECT AVG(salary) FROM Employees WHERE department = 'HR';", false},
        {"SELECT AVG(salary) FROM Employees WHERE department = 'HR'",
         "SELECT SUM(salary) FROM Employees WHERE department = 'HR';", false},
        {kTop3, kTop3, true},
        {"SELECT name, age FROM singer ORDER BY age DESC LIMIT 4", kTop3, false},
        {"SELECT name, age FROM singer ORDER BY age LIMIT 3", kTop3, false},
        {"SELECT age, name FROM singer ORDER BY age DESC LIMIT 3", kTop3, true},
        {"SELECT name, age FROM singer ORDER BY age DESC", kTop3, false},
        {kBusy, kBusy, true},
        {"SELECT country, count(*) FROM singer GROUP BY country HAVING 1 < count(*)", kBusy, true},
        {"SELECT country, COUNT(*) FROM singer GROUP BY country HAVING COUNT(*) > 2", kBusy, false},
        {"SELECT name FROM singer WHERE age > 20 AND country = 'France'",
         "SELECT name FROM singer WHERE country = 'France' AND age > 20", true},
        {"SELECT name FROM singer WHERE age > 20 OR country = 'France'",
         "SELECT name FROM singer WHERE country = 'France' AND age > 20", false},
        {"SELECT name FROM singer WHERE age > 20 OR country = 'France'",
         "SELECT name FROM singer WHERE country = 'France' OR 20 < age", true},
        {"SELECT DISTINCT name FROM singer", "SELECT name FROM singer", false},
        {"SELECT a.name FROM singer a JOIN singer b ON a.age = b.age WHERE b.country = 'France'",
         "SELECT y.name FROM singer y JOIN singer x ON x.age = y.age WHERE x.country = 'France'", true},
        // join order is significant for self joins
        {"SELECT b.name FROM singer a JOIN singer b ON a.age = b.age WHERE a.country = 'France'",
         "SELECT y.name FROM singer y JOIN singer x ON x.age = y.age WHERE x.country = 'France'", false},
        {"SELECT p.date_of_birth FROM people p LEFT JOIN entrepreneur e ON p.people_id = e.people_id WHERE "
         "e.company != 'Tillman Ernser'",
         kEntrepreneur, false},
    };
    return p;
}

}  // namespace t2s::testing
