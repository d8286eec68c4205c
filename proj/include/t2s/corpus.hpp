// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "t2s/schema.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace t2s {

/// One (question, database, gold SQL) triple.
struct ExamplePoint {
    std::string id;
    std::string instruction;
    std::string schema_id;
    std::string gold_sql;

    friend bool operator==(const ExamplePoint&, const ExamplePoint&) = default;
};

/// Removes chat and markup noise from raw question text: `@user` tags, HTML
/// tags, Markdown fences / emphasis / headers, and runs of blank lines.
/// Applied until a fixpoint, so preprocess(preprocess(x)) == preprocess(x).
std::string preprocess(std::string_view raw);

// ---------------------------------------------------------------------------
// Schema dictionary text, e.g.
//   {'database': 'geo', 'metadata': [{'name': 'city', 'columns': ['a', 'b']}]
// The outer dictionary is left unclosed; that is the established training
// format and it must be reproduced byte for byte.

enum class DictWrap {
    none,   // single line
    field,  // may break after the database entry and after each table name
    table,  // may break only between tables
};

struct DictStyle {
    DictWrap wrap = DictWrap::none;
    std::size_t width = 0;  // greedy wrap column; lines never split a piece
    std::string continuation_indent;
};

std::string schema_dict_text(const DatabaseSchema& schema, const DictStyle& style = {});

// ---------------------------------------------------------------------------
// Training strings: "# Instruction:" / "# Schema:" / "# Response:" blocks.

enum class LabelStyle {
    spaced,   // "# Instruction:"
    compact,  // "#Instruction:"
};

enum class InstructionQuote {
    none,
    /// 'question body' ? -- a SPIDER-tokenised trailing " ?" stays outside.
    single,
    /// "question body ?"
    double_quote,
};

enum class ResponseStyle {
    verbatim,
    quoted_wrapped,   // '...' with greedy word wrap at response_width
    clause_per_line,  // line break before each top-level FROM/JOIN/WHERE/...
};

struct TrainingLayout {
    LabelStyle labels = LabelStyle::spaced;
    InstructionQuote instruction_quote = InstructionQuote::none;
    DictStyle schema;
    ResponseStyle response = ResponseStyle::verbatim;
    std::size_t response_width = 0;

    /// Spaced labels, single-quoted question, field-wrapped dictionary and a
    /// quoted, wrapped response.
    static TrainingLayout quoted_fieldwise();
    /// Compact labels, double-quoted question, table-wrapped dictionary and
    /// one SQL clause per line.
    static TrainingLayout compact_clauses();
};

struct TrainingString {
    std::string text;
};

/// Throws Error(ErrorKind::data) if the point's schema_id differs from the
/// schema's name.
TrainingString format_training_point(const ExamplePoint& point, const DatabaseSchema& schema,
                                     const TrainingLayout& layout = {});

struct TrainingBlocks {
    std::string instruction;
    std::string schema;
    std::string response;
};

/// Splits a training string back into its three blocks (either label style).
/// Throws Error(ErrorKind::parse) unless each label occurs exactly once and
/// in order.
TrainingBlocks parse_training_string(std::string_view text);

// ---------------------------------------------------------------------------
// Corpora

/// JSON Lines with "question", "db_id", "query" and an optional "id"; a
/// SPIDER JSON array is accepted as well. Records without an id get their
/// record index. Every record is checked against `catalog`.
std::vector<ExamplePoint> load_corpus(std::string_view source, const SchemaCatalog& catalog);

/// Like load_corpus but skips bad records, describing each in `problems`.
std::vector<ExamplePoint> load_corpus_lenient(std::string_view source, const SchemaCatalog& catalog,
                                              std::vector<std::string>& problems);

std::string serialize_corpus(std::span<const ExamplePoint> points);

struct CorpusSplit {
    std::vector<ExamplePoint> train;
    std::vector<ExamplePoint> held_out;
};

/// Seeded partition; both halves keep the input order. Requires at least two
/// points and 0 < fraction < 1; each side receives at least one point.
CorpusSplit split_corpus(std::span<const ExamplePoint> points, std::uint64_t seed, double fraction);

/// Portable Fisher-Yates permutation of [0, n) driven by mt19937_64.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace t2s
