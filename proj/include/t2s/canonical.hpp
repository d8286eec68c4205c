// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "t2s/schema.hpp"
#include "t2s/sql_ast.hpp"

#include <string>

namespace t2s::sql {

struct CanonicalOptions {
    /// Replace every literal with a `?` placeholder.
    bool ignore_literals = false;
    /// Lets unqualified columns in multi-table scopes bind to their owner.
    const DatabaseSchema* schema = nullptr;
};

/// Normal form used for query comparison:
///  - identifiers lower-cased; every FROM source gets a positional alias
///    (t1, t2, ... at the top level, s<depth>_t<i> in nested queries) and
///    column qualifiers are rewritten to it;
///  - unqualified columns are qualified when the owner is known (single
///    source, or a unique owner under `schema`);
///  - select-list aliases are dropped (kept for derived tables) and their
///    uses in ORDER BY / HAVING replaced by the aliased expression;
///  - AND / OR flattened and their operands sorted; comparisons put literals
///    on the right, otherwise order operands textually, mirroring the
///    operator; IN lists and GROUP BY sorted;
///  - numbers rewritten by value (5e4 -> 50000, 0.50 -> 0.5).
/// Idempotent: canonicalize(canonicalize(q)) == canonicalize(q).
Query canonicalize(const Query& q, const CanonicalOptions& options = {});

/// to_sql(canonicalize(q, options)).
std::string canonical_string(const Query& q, const CanonicalOptions& options = {});

/// Shortest decimal text that reads back as the same double.
std::string normalize_number(std::string_view text);

}  // namespace t2s::sql
