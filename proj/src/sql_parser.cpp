// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/sql_ast.hpp"

#include "t2s/text.hpp"

#include <array>

namespace t2s::sql {

bool is_aggregate_name(std::string_view n) noexcept {
    return n == "COUNT" || n == "SUM" || n == "AVG" || n == "MIN" || n == "MAX";
}

const char* to_string(SetOpKind k) noexcept {
    switch (k) {
        case SetOpKind::union_: return "UNION";
        case SetOpKind::intersect: return "INTERSECT";
        case SetOpKind::except: return "EXCEPT";
    }
    return "UNION";
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(lex(text)) {}

    Query statement() {
        Query q = query();
        if (peek().kind == TokenKind::semicolon) advance();
        if (peek().kind != TokenKind::end) fail({"end of statement"}, "unexpected " + describe(peek()));
        return q;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int agg_depth_ = 0;

    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }
    const Token& advance() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    static std::string describe(const Token& t) {
        switch (t.kind) {
            case TokenKind::end: return "end of input";
            case TokenKind::string: return "string literal";
            default: return "'" + t.value + "'";
        }
    }

    [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail) const {
        throw SyntaxError(peek().offset, std::move(expected), detail);
    }

    bool is_kw(std::string_view kw, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == TokenKind::keyword && t.value == kw;
    }
    bool accept_kw(std::string_view kw) {
        if (!is_kw(kw)) return false;
        advance();
        return true;
    }
    void expect_kw(std::string_view kw) {
        if (!accept_kw(kw)) fail({std::string(kw)}, "unexpected " + describe(peek()));
    }
    bool is_op(std::string_view op) const { return peek().kind == TokenKind::op && peek().value == op; }
    void expect(TokenKind kind, const char* what) {
        if (peek().kind != kind) fail({what}, "unexpected " + describe(peek()));
        advance();
    }
    bool is_name(std::size_t ahead = 0) const {
        const auto k = peek(ahead).kind;
        return k == TokenKind::identifier || k == TokenKind::quoted_identifier;
    }
    std::string name(const char* what) {
        if (!is_name()) fail({what}, "unexpected " + describe(peek()));
        return advance().value;
    }

    // query := term [set-op query]
    Query query() {
        Query q = query_term();
        SetOpKind kind;
        if (is_kw("UNION")) kind = SetOpKind::union_;
        else if (is_kw("INTERSECT")) kind = SetOpKind::intersect;
        else if (is_kw("EXCEPT")) kind = SetOpKind::except;
        else return q;
        if (q.set_op) fail({}, "a parenthesized compound query cannot take another set operator");
        advance();
        const bool all = accept_kw("ALL");
        Query rhs = query();
        q.set_op = SetOp{kind, all, Box<Query>(std::move(rhs))};
        return q;
    }

    Query query_term() {
        if (peek().kind == TokenKind::lparen) {
            advance();
            Query q = query();
            expect(TokenKind::rparen, ")");
            return q;
        }
        if (!is_kw("SELECT")) fail({"SELECT", "("}, "unexpected " + describe(peek()));
        return select_core();
    }

    Query select_core() {
        expect_kw("SELECT");
        const int saved = agg_depth_;
        agg_depth_ = 0;
        Query q;
        if (accept_kw("DISTINCT")) q.distinct = true;
        else accept_kw("ALL");
        do {
            q.select.push_back(select_item());
        } while (peek().kind == TokenKind::comma && (advance(), true));
        if (accept_kw("FROM")) from_clause(q);
        if (accept_kw("WHERE")) q.where = expr();
        if (accept_kw("GROUP")) {
            expect_kw("BY");
            do {
                q.group_by.push_back(expr());
            } while (peek().kind == TokenKind::comma && (advance(), true));
        }
        if (accept_kw("HAVING")) q.having = expr();
        if (accept_kw("ORDER")) {
            expect_kw("BY");
            do {
                OrderItem item{expr(), false};
                if (accept_kw("DESC")) item.desc = true;
                else accept_kw("ASC");
                q.order_by.push_back(std::move(item));
            } while (peek().kind == TokenKind::comma && (advance(), true));
        }
        if (accept_kw("LIMIT")) {
            if (peek().kind != TokenKind::number) fail({"number"}, "LIMIT needs a row count");
            q.limit = advance().value;
        }
        agg_depth_ = saved;
        return q;
    }

    std::string optional_alias() {
        if (accept_kw("AS")) {
            if (peek().kind == TokenKind::string) return advance().value;
            return name("alias");
        }
        if (is_name()) return advance().value;
        return {};
    }

    SelectItem select_item() {
        SelectItem item{expr(), {}};
        item.alias = optional_alias();
        return item;
    }

    TableRef table_ref() {
        TableRef ref;
        if (peek().kind == TokenKind::lparen) {
            advance();
            if (!is_kw("SELECT") && peek().kind != TokenKind::lparen)
                fail({"SELECT"}, "unexpected " + describe(peek()));
            ref.subquery = Box<Query>(query());
            expect(TokenKind::rparen, ")");
        } else {
            ref.table = name("table name");
        }
        ref.alias = optional_alias();
        return ref;
    }

    void from_clause(Query& q) {
        q.from.push_back({table_ref(), JoinKind::base, std::nullopt});
        for (;;) {
            JoinKind kind;
            if (peek().kind == TokenKind::comma) {
                advance();
                q.from.push_back({table_ref(), JoinKind::comma, std::nullopt});
                continue;
            }
            if (accept_kw("JOIN")) {
                kind = JoinKind::inner;
            } else if (is_kw("INNER") && is_kw("JOIN", 1)) {
                pos_ += 2;
                kind = JoinKind::inner;
            } else if (is_kw("LEFT")) {
                advance();
                accept_kw("OUTER");
                expect_kw("JOIN");
                kind = JoinKind::left;
            } else if (is_kw("CROSS")) {
                advance();
                expect_kw("JOIN");
                kind = JoinKind::cross;
            } else {
                return;
            }
            FromItem item{table_ref(), kind, std::nullopt};
            if (accept_kw("ON")) item.on = expr();
            q.from.push_back(std::move(item));
        }
    }

    // Precedence climbing: OR < AND < NOT < predicate < additive < multiplicative < unary.
    Expr expr() { return or_expr(); }

    Expr logical(const char* op, Expr (Parser::*next)()) {
        Expr first = (this->*next)();
        if (!is_kw(op)) return first;
        LogicalExpr l{op, {}};
        l.operands.push_back(std::move(first));
        while (accept_kw(op)) l.operands.push_back((this->*next)());
        return Expr{std::move(l)};
    }
    Expr or_expr() { return logical("OR", &Parser::and_expr); }
    Expr and_expr() { return logical("AND", &Parser::not_expr); }

    Expr not_expr() {
        if (is_kw("NOT") && !is_kw("EXISTS", 1)) {
            advance();
            return Expr{UnaryExpr{"NOT", Box<Expr>(not_expr())}};
        }
        return predicate();
    }

    Expr predicate() {
        Expr lhs = additive();
        const Token& t = peek();
        if (t.kind == TokenKind::op &&
            (t.value == "=" || t.value == "!=" || t.value == "<" || t.value == ">" || t.value == "<=" ||
             t.value == ">=")) {
            const std::string op = advance().value;
            return Expr{BinaryExpr{op, Box<Expr>(std::move(lhs)), Box<Expr>(additive()), false}};
        }
        bool negated = false;
        if (is_kw("NOT") && (is_kw("LIKE", 1) || is_kw("IN", 1) || is_kw("BETWEEN", 1))) {
            advance();
            negated = true;
        }
        if (accept_kw("LIKE"))
            return Expr{BinaryExpr{"LIKE", Box<Expr>(std::move(lhs)), Box<Expr>(additive()), negated}};
        if (accept_kw("BETWEEN")) {
            Expr low = additive();
            expect_kw("AND");
            Expr high = additive();
            return Expr{BetweenExpr{Box<Expr>(std::move(lhs)), Box<Expr>(std::move(low)),
                                    Box<Expr>(std::move(high)), negated}};
        }
        if (accept_kw("IN")) {
            expect(TokenKind::lparen, "(");
            if (is_kw("SELECT") || (peek().kind == TokenKind::lparen && is_kw("SELECT", 1))) {
                Query sub = nested_query();
                expect(TokenKind::rparen, ")");
                return Expr{InQueryExpr{Box<Expr>(std::move(lhs)), Box<Query>(std::move(sub)), negated}};
            }
            InListExpr in{Box<Expr>(std::move(lhs)), {}, negated};
            do {
                in.items.push_back(additive());
            } while (peek().kind == TokenKind::comma && (advance(), true));
            expect(TokenKind::rparen, ")");
            return Expr{std::move(in)};
        }
        if (negated) fail({"LIKE", "IN", "BETWEEN"}, "unexpected " + describe(peek()));
        if (accept_kw("IS")) {
            const bool neg = accept_kw("NOT");
            expect_kw("NULL");
            return Expr{IsNullExpr{Box<Expr>(std::move(lhs)), neg}};
        }
        return lhs;
    }

    Expr additive() {
        Expr lhs = multiplicative();
        while (is_op("+") || is_op("-")) {
            const std::string op = advance().value;
            lhs = Expr{BinaryExpr{op, Box<Expr>(std::move(lhs)), Box<Expr>(multiplicative()), false}};
        }
        return lhs;
    }

    Expr multiplicative() {
        Expr lhs = unary();
        while (is_op("*") || is_op("/") || is_op("%")) {
            const std::string op = advance().value;
            lhs = Expr{BinaryExpr{op, Box<Expr>(std::move(lhs)), Box<Expr>(unary()), false}};
        }
        return lhs;
    }

    Expr unary() {
        if (is_op("-") || is_op("+")) {
            const std::string op = advance().value;
            if (peek().kind == TokenKind::number) {
                std::string text = advance().value;
                if (op == "-") text.insert(0, "-");
                return Expr{LiteralExpr{LiteralExpr::Kind::number, std::move(text)}};
            }
            return Expr{UnaryExpr{op, Box<Expr>(unary())}};
        }
        return primary();
    }

    Query nested_query() {
        const int saved = agg_depth_;
        Query q = query();
        agg_depth_ = saved;
        return q;
    }

    Expr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::number:
                return Expr{LiteralExpr{LiteralExpr::Kind::number, advance().value}};
            case TokenKind::string:
                return Expr{LiteralExpr{LiteralExpr::Kind::string, advance().value}};
            case TokenKind::op:
                if (t.value == "*") {
                    advance();
                    return Expr{StarExpr{}};
                }
                if (t.value == "?") {
                    advance();
                    return Expr{PlaceholderExpr{}};
                }
                break;
            case TokenKind::lparen: {
                advance();
                if (is_kw("SELECT")) {
                    Query sub = nested_query();
                    expect(TokenKind::rparen, ")");
                    return Expr{SubqueryExpr{Box<Query>(std::move(sub))}};
                }
                if (peek().kind == TokenKind::lparen && is_kw("SELECT", 1)) {
                    // "((SELECT ...) UNION ...)" or "((SELECT ...) <= x)"; try the query reading first
                    const std::size_t mark = pos_;
                    const int depth = agg_depth_;
                    try {
                        Query sub = nested_query();
                        expect(TokenKind::rparen, ")");
                        return Expr{SubqueryExpr{Box<Query>(std::move(sub))}};
                    } catch (const SyntaxError&) {
                        pos_ = mark;
                        agg_depth_ = depth;
                    }
                }
                Expr inner = expr();
                expect(TokenKind::rparen, ")");
                return inner;
            }
            case TokenKind::keyword:
                if (t.value == "NULL") {
                    advance();
                    return Expr{LiteralExpr{LiteralExpr::Kind::null, "NULL"}};
                }
                if (t.value == "EXISTS" || (t.value == "NOT" && is_kw("EXISTS", 1))) {
                    const bool neg = t.value == "NOT";
                    if (neg) advance();
                    advance();
                    expect(TokenKind::lparen, "(");
                    Query sub = nested_query();
                    expect(TokenKind::rparen, ")");
                    return Expr{ExistsExpr{Box<Query>(std::move(sub)), neg}};
                }
                break;
            case TokenKind::identifier:
            case TokenKind::quoted_identifier:
                return name_expr();
            default:
                break;
        }
        fail({"expression"}, "unexpected " + describe(t));
    }

    Expr name_expr() {
        const Token first = advance();
        if (first.kind == TokenKind::identifier && peek().kind == TokenKind::lparen) return call(first);
        if (peek().kind == TokenKind::dot) {
            advance();
            if (is_op("*")) {
                advance();
                return Expr{StarExpr{first.value}};
            }
            return Expr{ColumnExpr{first.value, name("column name")}};
        }
        return Expr{ColumnExpr{{}, first.value}};
    }

    Expr call(const Token& fn) {
        const std::string upper = text::upper(fn.value);
        const bool aggregate = is_aggregate_name(upper);
        if (aggregate && agg_depth_ > 0)
            throw SyntaxError(fn.offset, {}, "nested aggregate " + upper + " is not allowed");
        advance();  // (
        FunctionExpr f{aggregate ? upper : fn.value, false, {}};
        if (aggregate) ++agg_depth_;
        if (accept_kw("DISTINCT")) f.distinct = true;
        if (peek().kind != TokenKind::rparen) {
            do {
                f.args.push_back(expr());
            } while (peek().kind == TokenKind::comma && (advance(), true));
        }
        if (aggregate) --agg_depth_;
        expect(TokenKind::rparen, ")");
        if (aggregate && f.args.size() != 1)
            throw SyntaxError(fn.offset, {}, upper + " takes exactly one argument");
        return Expr{std::move(f)};
    }
};

}  // namespace

Query parse_sql(std::string_view text) { return Parser(text).statement(); }

}  // namespace t2s::sql
