// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "t2s/schema.hpp"
#include "t2s/sql_ast.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace t2s {

enum class IssueKind { unknown_table, unknown_column, case_mismatch, ambiguous_column, alias_error };

const char* to_string(IssueKind k) noexcept;

struct Issue {
    IssueKind kind = IssueKind::unknown_column;
    std::string offending;
    std::optional<std::string> suggestion;
    /// Free-form location, e.g. "FROM" or "column of Employees".
    std::string context;

    friend bool operator==(const Issue&, const Issue&) = default;
};

struct ValidationReport {
    bool syntax_ok = false;
    std::string syntax_error;   // parser message when !syntax_ok
    std::vector<Issue> issues;
    bool aligned = false;       // syntax_ok && issues.empty()
    /// Every table and column name of the schema, in schema order.
    std::vector<std::string> schema_names;

    /// Every issue carries a suggestion (and there is at least one issue).
    bool repairable() const noexcept;
};

/// Unique closest schema name for `name` among `candidates`: edit distance
/// within max(1, |name| / 3), else a unique prefix relation, else a unique
/// same-initial subsequence match. Ties yield nullopt.
std::optional<std::string> near_match(std::string_view name, const std::vector<std::string>& candidates);

std::size_t edit_distance(std::string_view a, std::string_view b);

/// Tables each followed by their columns, case-insensitive duplicates dropped.
std::vector<std::string> schema_names(const DatabaseSchema& schema);

ValidationReport validate(const sql::Query& query, const DatabaseSchema& schema);

/// Parses first; a syntax error short-circuits into a report with
/// syntax_ok = false.
ValidationReport validate_sql(std::string_view sql, const DatabaseSchema& schema);

struct Substitution {
    std::string from;
    std::string to;

    friend bool operator==(const Substitution&, const Substitution&) = default;
};

struct RepairPlan {
    std::vector<Substitution> substitutions;
    /// "Use the exact table and field names from the schema: <names>"
    std::string directive;
};

RepairPlan suggest_repairs(const ValidationReport& report);

/// Replaces whole identifier tokens outside string literals.
std::string apply_repairs(std::string_view sql, const std::vector<Substitution>& substitutions);

}  // namespace t2s
