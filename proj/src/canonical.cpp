// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/canonical.hpp"

#include "t2s/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

namespace t2s::sql {

std::string normalize_number(std::string_view text) {
    const std::string s(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) return s;
    if (v == 0.0) return "0";
    char buf[64];
    if (v == std::floor(v) && std::fabs(v) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    for (int p = 1; p <= 17; ++p) {
        std::snprintf(buf, sizeof buf, "%.*g", p, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace {

struct Source {
    std::string name;   // lower-cased alias, or table name when unaliased
    std::string table;  // lower-cased table name; empty for derived tables
    std::string alias;  // canonical alias
    const Table* schema_table = nullptr;
    std::vector<std::string> derived_columns;  // lower-cased output names
    bool derived = false;
};

struct Scope {
    std::vector<Source> sources;
    const Scope* parent = nullptr;
};

bool is_literal(const Expr& e) { return e.as<LiteralExpr>() || e.as<PlaceholderExpr>(); }

std::string mirror(const std::string& op) {
    if (op == "<") return ">";
    if (op == ">") return "<";
    if (op == "<=") return ">=";
    if (op == ">=") return "<=";
    return op;
}

bool is_comparison(const std::string& op) {
    return op == "=" || op == "!=" || op == "<" || op == ">" || op == "<=" || op == ">=";
}

class Canonicalizer {
public:
    explicit Canonicalizer(const CanonicalOptions& o) : opt_(o) {}

    Query query(const Query& in, int depth, const Scope* parent, bool derived) {
        Query q = in;
        Scope scope;
        scope.parent = parent;
        for (std::size_t i = 0; i < q.from.size(); ++i) {
            TableRef& ref = q.from[i].ref;
            Source src;
            src.alias = depth == 0 ? "t" + std::to_string(i + 1)
                                   : "s" + std::to_string(depth) + "_t" + std::to_string(i + 1);
            if (ref.subquery) {
                src.derived = true;
                *ref.subquery = query(**ref.subquery, depth + 1, parent, true);
                for (const auto& item : (*ref.subquery)->select) src.derived_columns.push_back(output_name(item));
            } else {
                ref.table = text::lower(ref.table);
                src.table = ref.table;
                if (opt_.schema) {
                    for (const auto& t : opt_.schema->tables())
                        if (text::iequals(t.name, ref.table)) src.schema_table = &t;
                }
            }
            src.name = text::lower(ref.alias.empty() ? ref.table : ref.alias);
            ref.alias = src.alias;
            scope.sources.push_back(std::move(src));
        }

        std::map<std::string, Expr> aliases;
        for (auto& item : q.select) {
            if (!item.alias.empty()) aliases.emplace(text::lower(item.alias), item.expr);
            item.expr = expr(item.expr, scope, depth);
            item.alias = derived ? text::lower(item.alias) : std::string();
        }
        for (auto& f : q.from)
            if (f.on) f.on = expr(*f.on, scope, depth);
        if (q.where) q.where = expr(*q.where, scope, depth);
        for (auto& g : q.group_by) g = expr(g, scope, depth);
        sort_by_text(q.group_by);
        if (q.having) q.having = expr(substitute(*q.having, aliases), scope, depth);
        for (auto& o : q.order_by) o.expr = expr(substitute(o.expr, aliases), scope, depth);
        if (q.limit) q.limit = normalize_number(*q.limit);
        if (q.set_op) *q.set_op->rhs = query(*q.set_op->rhs, depth, parent, false);
        return q;
    }

private:
    const CanonicalOptions& opt_;

    static std::string output_name(const SelectItem& item) {
        if (!item.alias.empty()) return text::lower(item.alias);
        if (const auto* c = item.expr.as<ColumnExpr>()) return text::lower(c->name);
        return {};
    }

    static void sort_by_text(std::vector<Expr>& v) {
        std::stable_sort(v.begin(), v.end(), [](const Expr& a, const Expr& b) { return to_sql(a) < to_sql(b); });
    }

    /// Replaces bare references to select aliases.
    static Expr substitute(const Expr& e, const std::map<std::string, Expr>& aliases) {
        if (aliases.empty()) return e;
        if (const auto* c = e.as<ColumnExpr>(); c && c->qualifier.empty()) {
            auto it = aliases.find(text::lower(c->name));
            if (it != aliases.end()) return it->second;
            return e;
        }
        Expr out = e;
        std::visit(
            [&](auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, UnaryExpr>) *n.operand = substitute(*n.operand, aliases);
                else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    *n.lhs = substitute(*n.lhs, aliases);
                    *n.rhs = substitute(*n.rhs, aliases);
                } else if constexpr (std::is_same_v<T, LogicalExpr>) {
                    for (auto& o : n.operands) o = substitute(o, aliases);
                } else if constexpr (std::is_same_v<T, FunctionExpr>) {
                    for (auto& a : n.args) a = substitute(a, aliases);
                } else if constexpr (std::is_same_v<T, BetweenExpr>) {
                    *n.operand = substitute(*n.operand, aliases);
                    *n.low = substitute(*n.low, aliases);
                    *n.high = substitute(*n.high, aliases);
                } else if constexpr (std::is_same_v<T, IsNullExpr> || std::is_same_v<T, InQueryExpr>) {
                    *n.operand = substitute(*n.operand, aliases);
                } else if constexpr (std::is_same_v<T, InListExpr>) {
                    *n.operand = substitute(*n.operand, aliases);
                    for (auto& i : n.items) i = substitute(i, aliases);
                }
            },
            out.node);
        return out;
    }

    static const Source* find_named(const Scope& scope, const std::string& q) {
        for (const Scope* s = &scope; s; s = s->parent) {
            for (const auto& src : s->sources)
                if (src.name == q) return &src;
            for (const auto& src : s->sources)
                if (!src.table.empty() && src.table == q) return &src;
        }
        return nullptr;
    }

    static bool owns(const Source& src, const std::string& col) {
        if (src.derived)
            return std::find(src.derived_columns.begin(), src.derived_columns.end(), col) != src.derived_columns.end();
        if (!src.schema_table) return false;
        for (const auto& c : src.schema_table->columns)
            if (text::iequals(c.name, col)) return true;
        return false;
    }

    std::string owner_alias(const Scope& scope, const std::string& col) const {
        if (opt_.schema) {
            for (const Scope* s = &scope; s; s = s->parent) {
                const Source* found = nullptr;
                int count = 0;
                for (const auto& src : s->sources)
                    if (owns(src, col)) {
                        found = &src;
                        ++count;
                    }
                if (count == 1) return found->alias;
                if (count > 1) return {};
            }
        }
        if (scope.sources.size() == 1) return scope.sources.front().alias;
        return {};
    }

    Expr expr(const Expr& e, const Scope& scope, int depth) {
        return std::visit([&](const auto& n) { return node(n, scope, depth); }, e.node);
    }

    Expr node(const ColumnExpr& c, const Scope& scope, int) {
        ColumnExpr out{text::lower(c.qualifier), text::lower(c.name)};
        if (!out.qualifier.empty()) {
            if (const Source* src = find_named(scope, out.qualifier)) out.qualifier = src->alias;
        } else {
            out.qualifier = owner_alias(scope, out.name);
        }
        return Expr{std::move(out)};
    }
    Expr node(const StarExpr& s, const Scope& scope, int) {
        StarExpr out{text::lower(s.qualifier)};
        if (!out.qualifier.empty())
            if (const Source* src = find_named(scope, out.qualifier)) out.qualifier = src->alias;
        return Expr{std::move(out)};
    }
    Expr node(const LiteralExpr& l, const Scope&, int) {
        if (opt_.ignore_literals && l.kind != LiteralExpr::Kind::null) return Expr{PlaceholderExpr{}};
        LiteralExpr out = l;
        if (out.kind == LiteralExpr::Kind::number) out.text = normalize_number(out.text);
        return Expr{std::move(out)};
    }
    Expr node(const PlaceholderExpr& p, const Scope&, int) { return Expr{p}; }
    Expr node(const UnaryExpr& u, const Scope& scope, int depth) {
        Expr inner = expr(*u.operand, scope, depth);
        if (u.op == "+") return inner;
        if (u.op == "-") {
            if (auto* lit = inner.as<LiteralExpr>(); lit && lit->kind == LiteralExpr::Kind::number) {
                lit->text = normalize_number(lit->text.front() == '-' ? lit->text.substr(1) : "-" + lit->text);
                return inner;
            }
        }
        return Expr{UnaryExpr{u.op, Box<Expr>(std::move(inner))}};
    }
    Expr node(const BinaryExpr& b, const Scope& scope, int depth) {
        BinaryExpr out{b.op, Box<Expr>(expr(*b.lhs, scope, depth)), Box<Expr>(expr(*b.rhs, scope, depth)), b.negated};
        if (is_comparison(out.op)) {
            const bool lhs_lit = is_literal(*out.lhs);
            const bool rhs_lit = is_literal(*out.rhs);
            bool swap = false;
            if (lhs_lit != rhs_lit) swap = lhs_lit;
            else swap = to_sql(*out.rhs) < to_sql(*out.lhs);
            if (swap) {
                std::swap(out.lhs, out.rhs);
                out.op = mirror(out.op);
            }
        }
        return Expr{std::move(out)};
    }
    Expr node(const LogicalExpr& l, const Scope& scope, int depth) {
        std::vector<Expr> flat;
        for (const auto& o : l.operands) {
            Expr c = expr(o, scope, depth);
            if (const auto* inner = c.as<LogicalExpr>(); inner && inner->op == l.op) {
                for (const auto& x : inner->operands) flat.push_back(x);
            } else {
                flat.push_back(std::move(c));
            }
        }
        if (flat.size() == 1) return flat.front();
        sort_by_text(flat);
        return Expr{LogicalExpr{l.op, std::move(flat)}};
    }
    Expr node(const InListExpr& in, const Scope& scope, int depth) {
        InListExpr out{Box<Expr>(expr(*in.operand, scope, depth)), {}, in.negated};
        for (const auto& i : in.items) out.items.push_back(expr(i, scope, depth));
        sort_by_text(out.items);
        return Expr{std::move(out)};
    }
    Expr node(const InQueryExpr& in, const Scope& scope, int depth) {
        return Expr{InQueryExpr{Box<Expr>(expr(*in.operand, scope, depth)),
                                Box<Query>(query(*in.query, depth + 1, &scope, false)), in.negated}};
    }
    Expr node(const BetweenExpr& b, const Scope& scope, int depth) {
        return Expr{BetweenExpr{Box<Expr>(expr(*b.operand, scope, depth)), Box<Expr>(expr(*b.low, scope, depth)),
                                Box<Expr>(expr(*b.high, scope, depth)), b.negated}};
    }
    Expr node(const IsNullExpr& n, const Scope& scope, int depth) {
        return Expr{IsNullExpr{Box<Expr>(expr(*n.operand, scope, depth)), n.negated}};
    }
    Expr node(const ExistsExpr& e, const Scope& scope, int depth) {
        return Expr{ExistsExpr{Box<Query>(query(*e.query, depth + 1, &scope, false)), e.negated}};
    }
    Expr node(const FunctionExpr& f, const Scope& scope, int depth) {
        FunctionExpr out{text::upper(f.name), f.distinct, {}};
        for (const auto& a : f.args) out.args.push_back(expr(a, scope, depth));
        return Expr{std::move(out)};
    }
    Expr node(const SubqueryExpr& s, const Scope& scope, int depth) {
        return Expr{SubqueryExpr{Box<Query>(query(*s.query, depth + 1, &scope, false))}};
    }
};

}  // namespace

Query canonicalize(const Query& q, const CanonicalOptions& options) {
    return Canonicalizer(options).query(q, 0, nullptr, false);
}

std::string canonical_string(const Query& q, const CanonicalOptions& options) {
    return to_sql(canonicalize(q, options));
}

}  // namespace t2s::sql
