// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/validate.hpp"

#include "t2s/text.hpp"

#include <algorithm>
#include <set>

namespace t2s {

const char* to_string(IssueKind k) noexcept {
    switch (k) {
        case IssueKind::unknown_table: return "unknown_table";
        case IssueKind::unknown_column: return "unknown_column";
        case IssueKind::case_mismatch: return "case_mismatch";
        case IssueKind::ambiguous_column: return "ambiguous_column";
        case IssueKind::alias_error: return "alias_error";
    }
    return "unknown_column";
}

bool ValidationReport::repairable() const noexcept {
    if (!syntax_ok || issues.empty()) return false;
    return std::all_of(issues.begin(), issues.end(), [](const Issue& i) { return i.suggestion.has_value(); });
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            const std::size_t cost = text::to_lower(a[i - 1]) == text::to_lower(b[j - 1]) ? 0 : 1;
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
            diag = up;
        }
    }
    return row[b.size()];
}

namespace {

bool is_subsequence(std::string_view needle, std::string_view hay) {
    std::size_t j = 0;
    for (char c : hay)
        if (j < needle.size() && text::to_lower(c) == text::to_lower(needle[j])) ++j;
    return j == needle.size();
}

std::optional<std::string> unique_of(const std::vector<std::string>& v) {
    if (v.size() == 1) return v.front();
    return std::nullopt;
}

}  // namespace

std::optional<std::string> near_match(std::string_view name, const std::vector<std::string>& candidates) {
    std::vector<std::string> pool;
    for (const auto& c : candidates) {
        if (c.empty()) continue;
        if (std::none_of(pool.begin(), pool.end(), [&](const std::string& p) { return text::iequals(p, c); }))
            pool.push_back(c);
    }
    if (name.empty() || pool.empty()) return std::nullopt;

    const std::size_t limit = std::max<std::size_t>(1, name.size() / 3);
    std::size_t best = limit + 1;
    std::vector<std::string> closest;
    for (const auto& c : pool) {
        const std::size_t d = edit_distance(name, c);
        if (d > limit) continue;
        if (d < best) {
            best = d;
            closest.clear();
        }
        if (d == best) closest.push_back(c);
    }
    if (!closest.empty()) return unique_of(closest);

    std::vector<std::string> prefixed;
    for (const auto& c : pool)
        if (text::starts_with_ci(c, name) || text::starts_with_ci(name, c)) prefixed.push_back(c);
    if (!prefixed.empty()) return unique_of(prefixed);

    std::vector<std::string> subseq;
    for (const auto& c : pool)
        if (text::to_lower(c[0]) == text::to_lower(name[0]) && is_subsequence(name, c)) subseq.push_back(c);
    return unique_of(subseq);
}

namespace {

using namespace sql;

struct VSource {
    std::string name;              // alias, or table name as written
    std::string written_table;     // as written in the query
    const Table* table = nullptr;  // resolved (possibly via suggestion)
    bool opaque = false;           // unknown table without a suggestion
    bool derived = false;
    bool derived_star = false;
    std::vector<std::string> derived_columns;
};

struct VScope {
    std::vector<VSource> sources;
    std::vector<std::string> select_aliases;
    const VScope* parent = nullptr;
};

class Validator {
public:
    Validator(const DatabaseSchema& s, std::vector<Issue>& issues) : schema_(s), issues_(issues) {}

    void query(const Query& q, const VScope* parent) {
        VScope scope;
        scope.parent = parent;
        for (const auto& f : q.from) scope.sources.push_back(source(f.ref, parent));
        for (const auto& item : q.select)
            if (!item.alias.empty()) scope.select_aliases.push_back(item.alias);

        for (const auto& f : q.from)
            if (f.on) expr(*f.on, scope, true);
        for (const auto& item : q.select) expr(item.expr, scope, false);
        if (q.where) expr(*q.where, scope, true);
        for (const auto& g : q.group_by) expr(g, scope, true);
        if (q.having) expr(*q.having, scope, true);
        for (const auto& o : q.order_by) expr(o.expr, scope, true);
        if (q.set_op) query(*q.set_op->rhs, parent);
    }

private:
    const DatabaseSchema& schema_;
    std::vector<Issue>& issues_;

    void report(Issue issue) {
        if (std::find(issues_.begin(), issues_.end(), issue) == issues_.end()) issues_.push_back(std::move(issue));
    }

    std::vector<std::string> table_names() const {
        std::vector<std::string> out;
        for (const auto& t : schema_.tables()) out.push_back(t.name);
        return out;
    }

    static std::vector<std::string> column_names(const Table& t) {
        std::vector<std::string> out;
        for (const auto& c : t.columns) out.push_back(c.name);
        return out;
    }

    VSource source(const TableRef& ref, const VScope* parent) {
        VSource src;
        if (ref.subquery) {
            src.derived = true;
            query(**ref.subquery, parent);
            for (const auto& item : (*ref.subquery)->select) {
                if (!item.alias.empty()) src.derived_columns.push_back(item.alias);
                else if (const auto* c = item.expr.as<ColumnExpr>()) src.derived_columns.push_back(c->name);
                else if (item.expr.as<StarExpr>()) src.derived_star = true;
            }
            src.name = ref.alias;
            return src;
        }
        src.written_table = ref.table;
        src.name = ref.alias.empty() ? ref.table : ref.alias;
        const TableResolution r = resolve_table(schema_, ref.table);
        switch (r.match) {
            case Match::exact:
                src.table = schema_.find_table(r.canonical);
                break;
            case Match::case_fold:
                report({IssueKind::case_mismatch, ref.table, r.canonical, "table"});
                src.table = schema_.find_table(r.canonical);
                break;
            default: {
                auto suggestion = near_match(ref.table, table_names());
                report({IssueKind::unknown_table, ref.table, suggestion, "table"});
                if (suggestion) src.table = schema_.find_table(*suggestion);
                else src.opaque = true;
                break;
            }
        }
        return src;
    }

    static const VSource* find_qualifier(const VScope& scope, std::string_view q) {
        for (const VScope* s = &scope; s; s = s->parent) {
            for (const auto& src : s->sources)
                if (text::iequals(src.name, q)) return &src;
            for (const auto& src : s->sources)
                if (src.table && text::iequals(src.table->name, q)) return &src;
        }
        return nullptr;
    }

    std::vector<std::string> visible_names(const VScope& scope) const {
        std::vector<std::string> out;
        for (const VScope* s = &scope; s; s = s->parent)
            for (const auto& src : s->sources) out.push_back(src.name);
        return out;
    }

    void column_in(const VSource& src, const std::string& name) {
        if (src.opaque) return;
        if (src.derived) {
            if (src.derived_star) return;
            for (const auto& c : src.derived_columns)
                if (text::iequals(c, name)) return;
            report({IssueKind::unknown_column, name, near_match(name, src.derived_columns), "column of " + src.name});
            return;
        }
        const ColumnResolution r = resolve_column(schema_, src.table->name, name);
        if (r.match == Match::case_fold) {
            report({IssueKind::case_mismatch, name, r.column, "column of " + src.table->name});
        } else if (r.match != Match::exact) {
            report({IssueKind::unknown_column, name, near_match(name, column_names(*src.table)),
                    "column of " + src.table->name});
        }
    }

    void unqualified(const std::string& name, const VScope& scope, bool aliases_allowed) {
        for (const VScope* s = &scope; s; s = s->parent) {
            std::vector<std::string> exact;
            std::vector<std::pair<std::string, std::string>> folded;  // owner, canonical
            bool opaque = false;
            for (const auto& src : s->sources) {
                if (src.opaque) {
                    opaque = true;
                    continue;
                }
                if (src.derived) {
                    if (src.derived_star) opaque = true;
                    for (const auto& c : src.derived_columns) {
                        if (c == name) exact.push_back(src.name);
                        else if (text::iequals(c, name)) folded.emplace_back(src.name, c);
                    }
                    continue;
                }
                for (const auto& c : src.table->columns) {
                    if (c.name == name) exact.push_back(src.table->name);
                    else if (text::iequals(c.name, name)) folded.emplace_back(src.table->name, c.name);
                }
            }
            if (exact.size() == 1) return;
            if (exact.size() > 1) {
                report({IssueKind::ambiguous_column, name, std::nullopt, "owned by " + text::join(exact, ", ")});
                return;
            }
            if (folded.size() == 1) {
                report({IssueKind::case_mismatch, name, folded.front().second, "column of " + folded.front().first});
                return;
            }
            if (folded.size() > 1) {
                std::vector<std::string> owners;
                for (const auto& f : folded) owners.push_back(f.first);
                report({IssueKind::ambiguous_column, name, std::nullopt, "owned by " + text::join(owners, ", ")});
                return;
            }
            if (aliases_allowed)
                for (const auto& a : s->select_aliases)
                    if (text::iequals(a, name)) return;
            if (opaque) return;
        }
        std::vector<std::string> candidates;
        for (const auto& src : scope.sources) {
            if (src.table)
                for (const auto& c : src.table->columns) candidates.push_back(c.name);
            for (const auto& c : src.derived_columns) candidates.push_back(c);
        }
        report({IssueKind::unknown_column, name, near_match(name, candidates), "column"});
    }

    void column(const ColumnExpr& c, const VScope& scope, bool aliases_allowed) {
        if (c.qualifier.empty()) {
            unqualified(c.name, scope, aliases_allowed);
            return;
        }
        const VSource* src = find_qualifier(scope, c.qualifier);
        if (!src) {
            report({IssueKind::alias_error, c.qualifier, near_match(c.qualifier, visible_names(scope)),
                    "qualifier of " + c.name});
            return;
        }
        column_in(*src, c.name);
    }

    void expr(const Expr& e, const VScope& scope, bool aliases_allowed) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ColumnExpr>) {
                    column(n, scope, aliases_allowed);
                } else if constexpr (std::is_same_v<T, StarExpr>) {
                    if (!n.qualifier.empty() && !find_qualifier(scope, n.qualifier))
                        report({IssueKind::alias_error, n.qualifier, near_match(n.qualifier, visible_names(scope)),
                                "qualifier of *"});
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    expr(*n.operand, scope, aliases_allowed);
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    expr(*n.lhs, scope, aliases_allowed);
                    expr(*n.rhs, scope, aliases_allowed);
                } else if constexpr (std::is_same_v<T, LogicalExpr>) {
                    for (const auto& o : n.operands) expr(o, scope, aliases_allowed);
                } else if constexpr (std::is_same_v<T, InListExpr>) {
                    expr(*n.operand, scope, aliases_allowed);
                    for (const auto& i : n.items) expr(i, scope, aliases_allowed);
                } else if constexpr (std::is_same_v<T, InQueryExpr>) {
                    expr(*n.operand, scope, aliases_allowed);
                    query(*n.query, &scope);
                } else if constexpr (std::is_same_v<T, BetweenExpr>) {
                    expr(*n.operand, scope, aliases_allowed);
                    expr(*n.low, scope, aliases_allowed);
                    expr(*n.high, scope, aliases_allowed);
                } else if constexpr (std::is_same_v<T, IsNullExpr>) {
                    expr(*n.operand, scope, aliases_allowed);
                } else if constexpr (std::is_same_v<T, ExistsExpr>) {
                    query(*n.query, &scope);
                } else if constexpr (std::is_same_v<T, FunctionExpr>) {
                    for (const auto& a : n.args) expr(a, scope, aliases_allowed);
                } else if constexpr (std::is_same_v<T, SubqueryExpr>) {
                    query(*n.query, &scope);
                }
            },
            e.node);
    }
};

}  // namespace

std::vector<std::string> schema_names(const DatabaseSchema& schema) {
    std::vector<std::string> out;
    auto add = [&](const std::string& n) {
        if (std::none_of(out.begin(), out.end(), [&](const std::string& o) { return text::iequals(o, n); }))
            out.push_back(n);
    };
    for (const auto& t : schema.tables()) {
        add(t.name);
        for (const auto& c : t.columns) add(c.name);
    }
    return out;
}

ValidationReport validate(const sql::Query& query, const DatabaseSchema& schema) {
    ValidationReport r;
    r.syntax_ok = true;
    r.schema_names = schema_names(schema);
    Validator(schema, r.issues).query(query, nullptr);
    r.aligned = r.issues.empty();
    return r;
}

ValidationReport validate_sql(std::string_view sql, const DatabaseSchema& schema) {
    try {
        return validate(sql::parse_sql(sql), schema);
    } catch (const sql::SyntaxError& e) {
        ValidationReport r;
        r.syntax_error = e.what();
        r.schema_names = schema_names(schema);
        return r;
    }
}

RepairPlan suggest_repairs(const ValidationReport& report) {
    RepairPlan plan;
    std::set<std::string> seen;
    for (const auto& issue : report.issues) {
        if (!issue.suggestion || *issue.suggestion == issue.offending) continue;
        if (!seen.insert(issue.offending).second) continue;
        plan.substitutions.push_back({issue.offending, *issue.suggestion});
    }
    plan.directive = "Use the exact table and field names from the schema: " + text::join(report.schema_names, ", ");
    return plan;
}

std::string apply_repairs(std::string_view sql, const std::vector<Substitution>& subs) {
    std::string out;
    std::size_t i = 0;
    while (i < sql.size()) {
        const char c = sql[i];
        if (c == '\'' || c == '"') {
            std::size_t j = i + 1;
            while (j < sql.size()) {
                if (sql[j] == c) {
                    if (j + 1 < sql.size() && sql[j + 1] == c) {
                        j += 2;
                        continue;
                    }
                    break;
                }
                ++j;
            }
            j = std::min(j + 1, sql.size());
            out.append(sql.substr(i, j - i));
            i = j;
            continue;
        }
        if (text::is_alpha(c) || c == '_') {
            std::size_t j = i;
            while (j < sql.size() && text::is_ident_char(sql[j])) ++j;
            const std::string_view word = sql.substr(i, j - i);
            auto it = std::find_if(subs.begin(), subs.end(), [&](const Substitution& s) { return s.from == word; });
            out += it != subs.end() ? std::string_view(it->to) : word;
            i = j;
            continue;
        }
        out += c;
        ++i;
    }
    return out;
}

}  // namespace t2s
