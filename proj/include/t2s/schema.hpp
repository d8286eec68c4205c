// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace t2s {

enum class DataType { text, integer, real, boolean, date, other };

const char* to_string(DataType type) noexcept;

/// Accepts the native names plus SPIDER's ("number", "time", "others").
DataType parse_data_type(std::string_view name);

struct Column {
    std::string name;
    std::optional<DataType> type;

    friend bool operator==(const Column&, const Column&) = default;
};

struct Table {
    std::string name;
    std::vector<Column> columns;

    const Column* find_column(std::string_view name) const noexcept;

    friend bool operator==(const Table&, const Table&) = default;
};

struct ColumnRef {
    std::string table;
    std::string column;

    std::string to_string() const { return table + "." + column; }

    friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

struct ForeignKey {
    ColumnRef from;
    ColumnRef to;

    friend bool operator==(const ForeignKey&, const ForeignKey&) = default;
};

/// A database catalog: tables, columns and key constraints. Immutable once
/// constructed; the constructor enforces every invariant and throws
/// Error(ErrorKind::schema) naming the offending element.
class DatabaseSchema {
public:
    DatabaseSchema(std::string name, std::vector<Table> tables,
                   std::vector<ColumnRef> primary_keys = {},
                   std::vector<ForeignKey> foreign_keys = {});

    const std::string& name() const noexcept { return name_; }
    const std::vector<Table>& tables() const noexcept { return tables_; }
    const std::vector<ColumnRef>& primary_keys() const noexcept { return primary_keys_; }
    const std::vector<ForeignKey>& foreign_keys() const noexcept { return foreign_keys_; }

    /// Exact-spelling lookup.
    const Table* find_table(std::string_view name) const noexcept;

    friend bool operator==(const DatabaseSchema&, const DatabaseSchema&) = default;

private:
    std::string name_;
    std::vector<Table> tables_;
    std::vector<ColumnRef> primary_keys_;
    std::vector<ForeignKey> foreign_keys_;
};

enum class Match {
    exact,      // spelled exactly as in the schema
    case_fold,  // matched after ASCII case folding; `canonical` holds the schema spelling
    absent,
    ambiguous,  // unqualified column owned by several tables
};

const char* to_string(Match m) noexcept;

struct TableResolution {
    Match match = Match::absent;
    std::string canonical;  // empty when absent
};

struct ColumnResolution {
    Match match = Match::absent;
    std::string table;   // canonical owning table (empty unless exact/case_fold)
    std::string column;  // canonical column spelling
    std::vector<std::string> owners;  // all owning tables when ambiguous
};

TableResolution resolve_table(const DatabaseSchema& schema, std::string_view name);

/// With a hint, only that table is searched; the hint itself must resolve or
/// Error(ErrorKind::schema) is thrown. Without a hint every table is searched.
ColumnResolution resolve_column(const DatabaseSchema& schema,
                                std::optional<std::string_view> table_hint,
                                std::string_view name);

/// Loads one schema from a native document or a single SPIDER tables.json
/// entry (detected by the presence of "db_id").
DatabaseSchema load_schema(std::string_view json_text);

/// Imports every entry of a SPIDER tables.json array.
std::vector<DatabaseSchema> import_spider_tables(std::string_view json_text);

/// Native JSON document; load_schema(serialize_schema(s)) == s.
std::string serialize_schema(const DatabaseSchema& schema);

/// Lookup of schemas by database id. Holds shared immutable schemas so runs
/// may share them across threads.
class SchemaCatalog {
public:
    void add(DatabaseSchema schema);
    std::shared_ptr<const DatabaseSchema> find(std::string_view id) const;
    /// Throws Error(ErrorKind::data) for unknown ids.
    const DatabaseSchema& at(std::string_view id) const;
    std::shared_ptr<const DatabaseSchema> shared(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id) != nullptr; }
    std::vector<std::string> ids() const;
    std::size_t size() const noexcept { return schemas_.size(); }

    /// A directory of native documents (*.json), a SPIDER tables.json, or a
    /// single native document.
    static SchemaCatalog load(const std::filesystem::path& path);

private:
    std::map<std::string, std::shared_ptr<const DatabaseSchema>, std::less<>> schemas_;
};

}  // namespace t2s
