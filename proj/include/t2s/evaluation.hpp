// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "t2s/pipeline.hpp"
#include "t2s/schema.hpp"
#include "t2s/sqlite_db.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace t2s {

/// Segment list compared by exact_set_match; stored in reports so scores
/// from different builds stay comparable.
inline constexpr std::string_view kEmSegmentsVersion =
    "em-segments/1: select,from,where,group_by,having,order_by,limit,set_op";

struct EmOptions {
    bool ignore_literals = false;
    /// Lets unqualified columns bind to their owning table in joins.
    const DatabaseSchema* schema = nullptr;
};

struct EmResult {
    bool match = false;
    /// Mismatching segment names in segment order; "syntax" when the
    /// prediction does not parse, "gold_syntax" when the gold does not.
    std::vector<std::string> diff;
};

EmResult exact_set_match(std::string_view pred, std::string_view gold, const EmOptions& options = {});

enum class TsDetail { match, result_mismatch, prediction_error, gold_error };

const char* to_string(TsDetail d) noexcept;
TsDetail parse_ts_detail(std::string_view name);

struct TsOptions {
    double float_tol = 1e-6;  // relative
    std::uint64_t step_limit = 50'000'000;
};

struct TsResult {
    bool match = false;
    TsDetail detail = TsDetail::prediction_error;
    std::string message;  // SQLite error text for the error details
};

/// True when the statement's outermost query carries ORDER BY.
bool has_top_level_order_by(std::string_view sql);

/// Cell-wise equality: numbers within relative `tol`, text exact, NULL == NULL.
bool cells_equal(const Cell& a, const Cell& b, double tol);

/// Sequence or multiset comparison of two results.
bool results_equal(const QueryResult& pred, const QueryResult& gold, bool ordered, double tol);

TsResult execution_match(std::string_view pred, std::string_view gold, const SqliteDb& db,
                         const TsOptions& options = {});

struct GoldItem {
    std::string id;
    std::string db_id;
    std::string query;

    friend bool operator==(const GoldItem&, const GoldItem&) = default;
};

/// JSON Lines {"id","db_id","query"}. Throws Error(ErrorKind::data) with the
/// line number on malformed input.
std::vector<GoldItem> load_golds(std::string_view jsonl);

struct EvalVerdict {
    std::string id;
    std::string db_id;
    bool em = false;
    bool ts = false;
    std::vector<std::string> em_diff;
    TsDetail ts_detail = TsDetail::prediction_error;
    std::size_t attempts = 0;
    std::string status;  // run status, "accepted" etc.

    friend bool operator==(const EvalVerdict&, const EvalVerdict&) = default;
};

struct EvalReport {
    std::size_t n = 0;            // items scored (gold errors excluded)
    std::size_t em_matches = 0;
    std::size_t ts_matches = 0;
    double em_accuracy = 0.0;
    double ts_accuracy = 0.0;
    std::size_t gold_errors = 0;
    std::size_t exhausted = 0;    // runs without a final query
    std::vector<EvalVerdict> per_item;
    std::map<std::size_t, std::size_t> attempt_histogram;
    std::string segments = std::string(kEmSegmentsVersion);

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct EvalOptions {
    EmOptions em;
    TsOptions ts;
    /// Supplies schemas for EM column binding; optional.
    const SchemaCatalog* catalog = nullptr;
};

/// Scores `records` against `golds` (same order, same ids) using
/// fixtures_dir/<db_id>/<db_id>.sqlite. Throws Error(ErrorKind::data) naming
/// the first id mismatch, Error(ErrorKind::fixture) for unusable fixtures.
EvalReport evaluate_run(std::span<const RunRecord> records, std::span<const GoldItem> golds,
                        const std::filesystem::path& fixtures_dir, const EvalOptions& options = {});

/// Recomputes counts and ratios from per_item.
void finalize(EvalReport& report);

std::filesystem::path fixture_path(const std::filesystem::path& fixtures_dir, std::string_view db_id);

}  // namespace t2s
