// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/sql_ast.hpp"

#include "t2s/text.hpp"

#include <sstream>

namespace t2s::sql {

namespace {

enum Prec { kOr = 1, kAnd = 2, kNot = 3, kPredicate = 4, kAdditive = 5, kMultiplicative = 6, kUnary = 7, kPrimary = 8 };

std::string ident(const std::string& name) {
    bool bare = !name.empty() && (text::is_alpha(name[0]) || name[0] == '_') && !is_keyword(name);
    for (char c : name) bare = bare && text::is_ident_char(c);
    return bare ? name : "`" + name + "`";
}

std::string quote_string(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += '\'';
        out += c;
    }
    return out + "'";
}

int precedence(const Expr& e) {
    return std::visit(
        [](const auto& n) -> int {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, LogicalExpr>) return n.op == "OR" ? kOr : kAnd;
            else if constexpr (std::is_same_v<T, UnaryExpr>) return n.op == "NOT" ? kNot : kUnary;
            else if constexpr (std::is_same_v<T, BinaryExpr>) {
                if (n.op == "+" || n.op == "-") return kAdditive;
                if (n.op == "*" || n.op == "/" || n.op == "%") return kMultiplicative;
                return kPredicate;
            } else if constexpr (std::is_same_v<T, InListExpr> || std::is_same_v<T, InQueryExpr> ||
                                 std::is_same_v<T, BetweenExpr> || std::is_same_v<T, IsNullExpr>)
                return kPredicate;
            else return kPrimary;
        },
        e.node);
}

class Printer {
public:
    std::string query(const Query& q) {
        std::string out = "SELECT ";
        if (q.distinct) out += "DISTINCT ";
        for (std::size_t i = 0; i < q.select.size(); ++i) {
            if (i) out += ", ";
            out += expr(q.select[i].expr, kOr);
            if (!q.select[i].alias.empty()) out += " AS " + ident(q.select[i].alias);
        }
        if (!q.from.empty()) {
            out += " FROM ";
            for (const auto& item : q.from) {
                switch (item.join) {
                    case JoinKind::base: break;
                    case JoinKind::comma: out += ", "; break;
                    case JoinKind::inner: out += " JOIN "; break;
                    case JoinKind::left: out += " LEFT JOIN "; break;
                    case JoinKind::cross: out += " CROSS JOIN "; break;
                }
                out += table_ref(item.ref);
                if (item.on) out += " ON " + expr(*item.on, kOr);
            }
        }
        if (q.where) out += " WHERE " + expr(*q.where, kOr);
        if (!q.group_by.empty()) {
            out += " GROUP BY ";
            for (std::size_t i = 0; i < q.group_by.size(); ++i) out += (i ? ", " : "") + expr(q.group_by[i], kOr);
        }
        if (q.having) out += " HAVING " + expr(*q.having, kOr);
        if (!q.order_by.empty()) {
            out += " ORDER BY ";
            for (std::size_t i = 0; i < q.order_by.size(); ++i) {
                out += (i ? ", " : "") + expr(q.order_by[i].expr, kOr);
                if (q.order_by[i].desc) out += " DESC";
            }
        }
        if (q.limit) out += " LIMIT " + *q.limit;
        if (q.set_op) {
            out += std::string(" ") + to_string(q.set_op->kind);
            if (q.set_op->all) out += " ALL";
            out += " " + query(*q.set_op->rhs);
        }
        return out;
    }

    std::string table_ref(const TableRef& r) {
        std::string out = r.subquery ? "(" + query(**r.subquery) + ")" : ident(r.table);
        if (!r.alias.empty()) out += " AS " + ident(r.alias);
        return out;
    }

    std::string expr(const Expr& e, int min_prec) {
        std::string s = bare(e);
        return precedence(e) < min_prec ? "(" + s + ")" : s;
    }

    std::string bare(const Expr& e) {
        return std::visit([this](const auto& n) { return node(n); }, e.node);
    }

    std::string node(const ColumnExpr& c) {
        return c.qualifier.empty() ? ident(c.name) : ident(c.qualifier) + "." + ident(c.name);
    }
    std::string node(const StarExpr& s) { return s.qualifier.empty() ? "*" : ident(s.qualifier) + ".*"; }
    std::string node(const LiteralExpr& l) {
        switch (l.kind) {
            case LiteralExpr::Kind::number: return l.text;
            case LiteralExpr::Kind::string: return quote_string(l.text);
            case LiteralExpr::Kind::null: return "NULL";
        }
        return "NULL";
    }
    std::string node(const PlaceholderExpr&) { return "?"; }
    std::string node(const UnaryExpr& u) {
        if (u.op == "NOT") return "NOT " + expr(*u.operand, kNot);
        std::string inner = expr(*u.operand, kUnary);
        return u.op + (inner.front() == '-' || inner.front() == '+' ? " " : "") + inner;
    }
    std::string node(const BinaryExpr& b) {
        const int p = precedence(Expr{b});
        if (p == kPredicate) {
            std::string op = b.op;
            if (b.negated) op = "NOT " + op;
            return expr(*b.lhs, kAdditive) + " " + op + " " + expr(*b.rhs, kAdditive);
        }
        return expr(*b.lhs, p) + " " + b.op + " " + expr(*b.rhs, p + 1);
    }
    std::string node(const LogicalExpr& l) {
        const int child = (l.op == "OR" ? kOr : kAnd) + 1;
        std::string out;
        for (std::size_t i = 0; i < l.operands.size(); ++i) {
            if (i) out += " " + l.op + " ";
            // Nested logical nodes keep their parentheses so re-parsing does
            // not flatten them.
            const bool logical = l.operands[i].as<LogicalExpr>() != nullptr;
            out += logical ? "(" + bare(l.operands[i]) + ")" : expr(l.operands[i], child);
        }
        return out;
    }
    std::string node(const InListExpr& in) {
        std::string out = expr(*in.operand, kAdditive) + (in.negated ? " NOT IN (" : " IN (");
        for (std::size_t i = 0; i < in.items.size(); ++i) out += (i ? ", " : "") + expr(in.items[i], kAdditive);
        return out + ")";
    }
    std::string node(const InQueryExpr& in) {
        return expr(*in.operand, kAdditive) + (in.negated ? " NOT IN (" : " IN (") + query(*in.query) + ")";
    }
    std::string node(const BetweenExpr& b) {
        return expr(*b.operand, kAdditive) + (b.negated ? " NOT BETWEEN " : " BETWEEN ") +
               expr(*b.low, kAdditive) + " AND " + expr(*b.high, kAdditive);
    }
    std::string node(const IsNullExpr& n) {
        return expr(*n.operand, kAdditive) + (n.negated ? " IS NOT NULL" : " IS NULL");
    }
    std::string node(const ExistsExpr& e) {
        return std::string(e.negated ? "NOT EXISTS (" : "EXISTS (") + query(*e.query) + ")";
    }
    std::string node(const FunctionExpr& f) {
        std::string out = f.name + "(";
        if (f.distinct) out += "DISTINCT ";
        for (std::size_t i = 0; i < f.args.size(); ++i) out += (i ? ", " : "") + expr(f.args[i], kOr);
        return out + ")";
    }
    std::string node(const SubqueryExpr& s) { return "(" + query(*s.query) + ")"; }
};

class Dumper {
public:
    std::ostringstream os;

    void line(int depth, const std::string& s) { os << std::string(depth * 2, ' ') << s << '\n'; }

    void query(const Query& q, int d) {
        line(d, q.distinct ? "Query DISTINCT" : "Query");
        line(d + 1, "select");
        for (const auto& item : q.select) {
            expr(item.expr, d + 2);
            if (!item.alias.empty()) line(d + 3, "alias " + item.alias);
        }
        if (!q.from.empty()) {
            line(d + 1, "from");
            for (const auto& f : q.from) {
                static const char* kinds[] = {"base", "comma", "join", "left join", "cross join"};
                std::string head = std::string(kinds[static_cast<int>(f.join)]) + " ";
                head += f.ref.subquery ? "(subquery)" : f.ref.table;
                if (!f.ref.alias.empty()) head += " AS " + f.ref.alias;
                line(d + 2, head);
                if (f.ref.subquery) query(**f.ref.subquery, d + 3);
                if (f.on) {
                    line(d + 3, "on");
                    expr(*f.on, d + 4);
                }
            }
        }
        if (q.where) {
            line(d + 1, "where");
            expr(*q.where, d + 2);
        }
        if (!q.group_by.empty()) {
            line(d + 1, "group_by");
            for (const auto& g : q.group_by) expr(g, d + 2);
        }
        if (q.having) {
            line(d + 1, "having");
            expr(*q.having, d + 2);
        }
        if (!q.order_by.empty()) {
            line(d + 1, "order_by");
            for (const auto& o : q.order_by) {
                expr(o.expr, d + 2);
                line(d + 3, o.desc ? "DESC" : "ASC");
            }
        }
        if (q.limit) line(d + 1, "limit " + *q.limit);
        if (q.set_op) {
            line(d + 1, std::string(to_string(q.set_op->kind)) + (q.set_op->all ? " ALL" : ""));
            query(*q.set_op->rhs, d + 2);
        }
    }

    void expr(const Expr& e, int d) {
        std::visit([&](const auto& n) { node(n, d); }, e.node);
    }

    void node(const ColumnExpr& c, int d) { line(d, "Column " + (c.qualifier.empty() ? "" : c.qualifier + ".") + c.name); }
    void node(const StarExpr& s, int d) { line(d, "Star " + s.qualifier); }
    void node(const LiteralExpr& l, int d) {
        static const char* kinds[] = {"number", "string", "null"};
        line(d, std::string("Literal ") + kinds[static_cast<int>(l.kind)] + " " + l.text);
    }
    void node(const PlaceholderExpr&, int d) { line(d, "Placeholder"); }
    void node(const UnaryExpr& u, int d) {
        line(d, "Unary " + u.op);
        expr(*u.operand, d + 1);
    }
    void node(const BinaryExpr& b, int d) {
        line(d, "Binary " + std::string(b.negated ? "NOT " : "") + b.op);
        expr(*b.lhs, d + 1);
        expr(*b.rhs, d + 1);
    }
    void node(const LogicalExpr& l, int d) {
        line(d, "Logical " + l.op);
        for (const auto& o : l.operands) expr(o, d + 1);
    }
    void node(const InListExpr& in, int d) {
        line(d, in.negated ? "NotIn" : "In");
        expr(*in.operand, d + 1);
        for (const auto& i : in.items) expr(i, d + 2);
    }
    void node(const InQueryExpr& in, int d) {
        line(d, in.negated ? "NotInQuery" : "InQuery");
        expr(*in.operand, d + 1);
        query(*in.query, d + 1);
    }
    void node(const BetweenExpr& b, int d) {
        line(d, b.negated ? "NotBetween" : "Between");
        expr(*b.operand, d + 1);
        expr(*b.low, d + 1);
        expr(*b.high, d + 1);
    }
    void node(const IsNullExpr& n, int d) {
        line(d, n.negated ? "IsNotNull" : "IsNull");
        expr(*n.operand, d + 1);
    }
    void node(const ExistsExpr& e, int d) {
        line(d, e.negated ? "NotExists" : "Exists");
        query(*e.query, d + 1);
    }
    void node(const FunctionExpr& f, int d) {
        line(d, "Function " + f.name + (f.distinct ? " DISTINCT" : ""));
        for (const auto& a : f.args) expr(a, d + 1);
    }
    void node(const SubqueryExpr& s, int d) {
        line(d, "Subquery");
        query(*s.query, d + 1);
    }
};

}  // namespace

std::string to_sql(const Query& q) { return Printer().query(q); }
std::string to_sql(const Expr& e) { return Printer().expr(e, kOr); }

std::string debug_dump(const Query& q) {
    Dumper d;
    d.query(q, 0);
    return d.os.str();
}

}  // namespace t2s::sql
