// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/sqlite_db.hpp"

#include "t2s/error.hpp"

#include <sqlite3.h>

#include <utility>

namespace t2s {

namespace {

constexpr int kProgressEvery = 1000;

struct StepBudget {
    std::uint64_t left = 0;
};

int on_progress(void* p) {
    auto* b = static_cast<StepBudget*>(p);
    if (b->left <= static_cast<std::uint64_t>(kProgressEvery)) return 1;
    b->left -= kProgressEvery;
    return 0;
}

struct Stmt {
    sqlite3_stmt* s = nullptr;
    ~Stmt() { sqlite3_finalize(s); }
};

}  // namespace

SqliteDb::SqliteDb(const std::filesystem::path& path) : path_(path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        throw Error(ErrorKind::fixture, "fixture database not found: " + path.string());
    const int rc = sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READONLY | SQLITE_OPEN_NOMUTEX, nullptr);
    if (rc != SQLITE_OK) {
        std::string msg = db_ ? sqlite3_errmsg(db_) : sqlite3_errstr(rc);
        sqlite3_close(db_);
        db_ = nullptr;
        throw Error(ErrorKind::fixture, "cannot open " + path.string() + ": " + msg);
    }
    // touch the schema so a corrupt file fails here, not on the first query
    char* err = nullptr;
    if (sqlite3_exec(db_, "SELECT count(*) FROM sqlite_master", nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        sqlite3_close(db_);
        db_ = nullptr;
        throw Error(ErrorKind::fixture, "unreadable fixture " + path.string() + ": " + msg);
    }
}

SqliteDb::~SqliteDb() { sqlite3_close(db_); }

SqliteDb::SqliteDb(SqliteDb&& other) noexcept
    : db_(std::exchange(other.db_, nullptr)), path_(std::move(other.path_)) {}

SqliteDb& SqliteDb::operator=(SqliteDb&& other) noexcept {
    if (this != &other) {
        sqlite3_close(db_);
        db_ = std::exchange(other.db_, nullptr);
        path_ = std::move(other.path_);
    }
    return *this;
}

ExecOutcome SqliteDb::execute(std::string_view sql, std::uint64_t step_limit) const {
    ExecOutcome out;
    if (!db_) throw Error(ErrorKind::fixture, "database handle is closed");
    Stmt st;
    const char* tail = nullptr;
    if (sqlite3_prepare_v2(db_, sql.data(), static_cast<int>(sql.size()), &st.s, &tail) != SQLITE_OK) {
        out.error = sqlite3_errmsg(db_);
        return out;
    }
    if (!st.s) {
        out.error = "empty statement";
        return out;
    }
    for (const char* p = tail; p && p < sql.data() + sql.size(); ++p) {
        if (*p != ' ' && *p != '\n' && *p != '\t' && *p != '\r' && *p != ';') {
            out.error = "more than one statement";
            return out;
        }
    }
    if (!sqlite3_stmt_readonly(st.s)) {
        out.error = "statement is not read-only";
        return out;
    }

    StepBudget budget{step_limit};
    sqlite3_progress_handler(db_, kProgressEvery, on_progress, &budget);
    QueryResult res;
    res.columns = static_cast<std::size_t>(sqlite3_column_count(st.s));
    int rc;
    while ((rc = sqlite3_step(st.s)) == SQLITE_ROW) {
        Row row;
        row.reserve(res.columns);
        for (int i = 0; i < static_cast<int>(res.columns); ++i) {
            switch (sqlite3_column_type(st.s, i)) {
                case SQLITE_INTEGER: row.emplace_back(static_cast<std::int64_t>(sqlite3_column_int64(st.s, i))); break;
                case SQLITE_FLOAT: row.emplace_back(sqlite3_column_double(st.s, i)); break;
                case SQLITE_NULL: row.emplace_back(std::monostate{}); break;
                default: {
                    const auto* t = reinterpret_cast<const char*>(sqlite3_column_text(st.s, i));
                    row.emplace_back(std::string(t ? t : "", static_cast<std::size_t>(sqlite3_column_bytes(st.s, i))));
                }
            }
        }
        res.rows.push_back(std::move(row));
    }
    sqlite3_progress_handler(db_, 0, nullptr, nullptr);
    if (rc != SQLITE_DONE) {
        out.error = rc == SQLITE_INTERRUPT ? "step limit exceeded" : sqlite3_errmsg(db_);
        return out;
    }
    out.result = std::move(res);
    return out;
}

}  // namespace t2s
