// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "t2s/sql_lexer.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace t2s::sql {

/// Owning pointer with value semantics (deep copy, deep comparison).
template <typename T>
class Box {
public:
    Box(T value) : p_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
    Box(const Box& o) : p_(std::make_unique<T>(*o.p_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& o) {
        if (this != &o) p_ = std::make_unique<T>(*o.p_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;

    T& operator*() noexcept { return *p_; }
    const T& operator*() const noexcept { return *p_; }
    T* operator->() noexcept { return p_.get(); }
    const T* operator->() const noexcept { return p_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a.p_ == *b.p_; }

private:
    std::unique_ptr<T> p_;
};

struct Expr;
struct Query;

struct ColumnExpr {
    std::string qualifier;  // table or alias; empty when unqualified
    std::string name;
    friend bool operator==(const ColumnExpr&, const ColumnExpr&) = default;
};

/// `*` or `t.*`.
struct StarExpr {
    std::string qualifier;
    friend bool operator==(const StarExpr&, const StarExpr&) = default;
};

struct LiteralExpr {
    enum class Kind { number, string, null } kind = Kind::null;
    std::string text;  // number as written, string unescaped
    friend bool operator==(const LiteralExpr&, const LiteralExpr&) = default;
};

/// Placeholder literal written as `?` (ignore-literals comparisons).
struct PlaceholderExpr {
    friend bool operator==(const PlaceholderExpr&, const PlaceholderExpr&) = default;
};

struct UnaryExpr {
    std::string op;  // "NOT" or "-" / "+"
    Box<Expr> operand;
    friend bool operator==(const UnaryExpr&, const UnaryExpr&) = default;
};

/// Arithmetic, comparison and LIKE. `negated` marks NOT LIKE.
struct BinaryExpr {
    std::string op;  // + - * / % = != < > <= >= LIKE
    Box<Expr> lhs;
    Box<Expr> rhs;
    bool negated = false;
    friend bool operator==(const BinaryExpr&, const BinaryExpr&) = default;
};

/// n-ary AND / OR.
struct LogicalExpr {
    std::string op;  // "AND" or "OR"
    std::vector<Expr> operands;
    friend bool operator==(const LogicalExpr&, const LogicalExpr&) = default;
};

struct InListExpr {
    Box<Expr> operand;
    std::vector<Expr> items;
    bool negated = false;
    friend bool operator==(const InListExpr&, const InListExpr&) = default;
};

struct InQueryExpr {
    Box<Expr> operand;
    Box<Query> query;
    bool negated = false;
    friend bool operator==(const InQueryExpr&, const InQueryExpr&) = default;
};

struct BetweenExpr {
    Box<Expr> operand;
    Box<Expr> low;
    Box<Expr> high;
    bool negated = false;
    friend bool operator==(const BetweenExpr&, const BetweenExpr&) = default;
};

struct IsNullExpr {
    Box<Expr> operand;
    bool negated = false;
    friend bool operator==(const IsNullExpr&, const IsNullExpr&) = default;
};

struct ExistsExpr {
    Box<Query> query;
    bool negated = false;
    friend bool operator==(const ExistsExpr&, const ExistsExpr&) = default;
};

/// Function call; the parser accepts COUNT SUM AVG MIN MAX (upper-cased in
/// `name`) plus any scalar function name as written.
struct FunctionExpr {
    std::string name;
    bool distinct = false;
    std::vector<Expr> args;
    friend bool operator==(const FunctionExpr&, const FunctionExpr&) = default;
};

struct SubqueryExpr {
    Box<Query> query;
    friend bool operator==(const SubqueryExpr&, const SubqueryExpr&) = default;
};

using ExprNode = std::variant<ColumnExpr, StarExpr, LiteralExpr, PlaceholderExpr, UnaryExpr, BinaryExpr,
                              LogicalExpr, InListExpr, InQueryExpr, BetweenExpr, IsNullExpr, ExistsExpr,
                              FunctionExpr, SubqueryExpr>;

struct Expr {
    ExprNode node;

    template <typename T>
    const T* as() const noexcept { return std::get_if<T>(&node); }
    template <typename T>
    T* as() noexcept { return std::get_if<T>(&node); }

    friend bool operator==(const Expr&, const Expr&) = default;
};

bool is_aggregate_name(std::string_view upper_name) noexcept;

struct SelectItem {
    Expr expr;
    std::string alias;
    friend bool operator==(const SelectItem&, const SelectItem&) = default;
};

/// A named table or a derived table.
struct TableRef {
    std::string table;                 // empty for derived tables
    std::optional<Box<Query>> subquery;
    std::string alias;
    friend bool operator==(const TableRef&, const TableRef&) = default;
};

enum class JoinKind { base, comma, inner, left, cross };

struct FromItem {
    TableRef ref;
    JoinKind join = JoinKind::base;
    std::optional<Expr> on;
    friend bool operator==(const FromItem&, const FromItem&) = default;
};

struct OrderItem {
    Expr expr;
    bool desc = false;
    friend bool operator==(const OrderItem&, const OrderItem&) = default;
};

enum class SetOpKind { union_, intersect, except };

const char* to_string(SetOpKind k) noexcept;

struct SetOp {
    SetOpKind kind = SetOpKind::union_;
    bool all = false;
    Box<Query> rhs;
    friend bool operator==(const SetOp&, const SetOp&) = default;
};

struct Query {
    bool distinct = false;
    std::vector<SelectItem> select;
    std::vector<FromItem> from;
    std::optional<Expr> where;
    std::vector<Expr> group_by;
    std::optional<Expr> having;
    std::vector<OrderItem> order_by;
    std::optional<std::string> limit;  // as written
    std::optional<SetOp> set_op;

    friend bool operator==(const Query&, const Query&) = default;
};

/// Parses one statement (an optional trailing ';' is allowed). Throws
/// SyntaxError with the offending offset and the expected-token set.
Query parse_sql(std::string_view text);

/// Single-line SQL text; parse_sql(to_sql(q)) == q.
std::string to_sql(const Query& q);
std::string to_sql(const Expr& e);

/// Indented tree dump for diagnostics.
std::string debug_dump(const Query& q);

}  // namespace t2s::sql
