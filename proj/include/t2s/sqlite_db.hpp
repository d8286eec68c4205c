// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

struct sqlite3;

namespace t2s {

/// One result cell. monostate is SQL NULL.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;
using Row = std::vector<Cell>;

struct QueryResult {
    std::vector<Row> rows;
    std::size_t columns = 0;
};

/// Outcome of running one statement. `error` is set when SQLite rejects or
/// aborts it; fixture problems throw instead.
struct ExecOutcome {
    std::optional<QueryResult> result;
    std::string error;
    bool ok() const noexcept { return result.has_value(); }
};

/// Read-only handle on a single-file database. Not shareable across threads;
/// open one per worker.
class SqliteDb {
public:
    /// Throws Error(ErrorKind::fixture) when the file is missing or unreadable.
    explicit SqliteDb(const std::filesystem::path& path);
    ~SqliteDb();
    SqliteDb(const SqliteDb&) = delete;
    SqliteDb& operator=(const SqliteDb&) = delete;
    SqliteDb(SqliteDb&& other) noexcept;
    SqliteDb& operator=(SqliteDb&& other) noexcept;

    /// Runs one statement. Aborts after roughly `step_limit` VM instructions.
    ExecOutcome execute(std::string_view sql, std::uint64_t step_limit = 50'000'000) const;

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    sqlite3* db_ = nullptr;
    std::filesystem::path path_;
};

}  // namespace t2s
