// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/schema.hpp"

#include "t2s/error.hpp"
#include "t2s/io.hpp"
#include "t2s/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace t2s {

using json = nlohmann::json;

const char* to_string(DataType type) noexcept {
    switch (type) {
        case DataType::text: return "text";
        case DataType::integer: return "integer";
        case DataType::real: return "real";
        case DataType::boolean: return "boolean";
        case DataType::date: return "date";
        case DataType::other: return "other";
    }
    return "other";
}

DataType parse_data_type(std::string_view name) {
    const std::string n = text::lower(name);
    if (n == "text" || n == "varchar" || n == "char" || n == "string") return DataType::text;
    if (n == "integer" || n == "int") return DataType::integer;
    // SPIDER's "number" covers both integral and fractional columns.
    if (n == "real" || n == "number" || n == "float" || n == "double") return DataType::real;
    if (n == "boolean" || n == "bool") return DataType::boolean;
    if (n == "date" || n == "time" || n == "datetime") return DataType::date;
    return DataType::other;
}

const char* to_string(Match m) noexcept {
    switch (m) {
        case Match::exact: return "exact";
        case Match::case_fold: return "case_fold";
        case Match::absent: return "absent";
        case Match::ambiguous: return "ambiguous";
    }
    return "absent";
}

const Column* Table::find_column(std::string_view name) const noexcept {
    for (const auto& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

[[noreturn]] void schema_error(const std::string& msg) { throw Error(ErrorKind::schema, msg); }

const Table* find_table_ci(const std::vector<Table>& tables, std::string_view name) {
    for (const auto& t : tables)
        if (text::iequals(t.name, name)) return &t;
    return nullptr;
}

void check_ref(const std::vector<Table>& tables, const ColumnRef& ref, const std::string& where) {
    if (ref.table.empty() || ref.column.empty())
        schema_error(where + ": empty column reference");
    const Table* t = find_table_ci(tables, ref.table);
    if (!t) schema_error(where + ": unknown table '" + ref.table + "'");
    const bool found = std::any_of(t->columns.begin(), t->columns.end(),
                                   [&](const Column& c) { return text::iequals(c.name, ref.column); });
    if (!found)
        schema_error(where + ": unknown column '" + ref.to_string() + "'");
}

}  // namespace

DatabaseSchema::DatabaseSchema(std::string name, std::vector<Table> tables,
                               std::vector<ColumnRef> primary_keys,
                               std::vector<ForeignKey> foreign_keys)
    : name_(std::move(name)),
      tables_(std::move(tables)),
      primary_keys_(std::move(primary_keys)),
      foreign_keys_(std::move(foreign_keys)) {
    if (name_.empty()) schema_error("schema name is empty");
    if (tables_.empty()) schema_error("empty schema '" + name_ + "'");
    std::set<std::string> seen_tables;
    for (std::size_t i = 0; i < tables_.size(); ++i) {
        const Table& t = tables_[i];
        const std::string where = "table[" + std::to_string(i) + "]";
        if (t.name.empty()) schema_error(where + ": empty table name");
        if (!seen_tables.insert(text::lower(t.name)).second)
            schema_error(where + ": duplicate table '" + t.name + "'");
        if (t.columns.empty()) schema_error(where + ": table '" + t.name + "' has no columns");
        std::set<std::string> seen_cols;
        for (std::size_t j = 0; j < t.columns.size(); ++j) {
            const Column& c = t.columns[j];
            if (c.name.empty())
                schema_error(where + ".column[" + std::to_string(j) + "]: empty column name");
            if (!seen_cols.insert(text::lower(c.name)).second)
                schema_error(where + ".column[" + std::to_string(j) + "]: duplicate column '" +
                             t.name + "." + c.name + "'");
        }
    }
    for (std::size_t i = 0; i < primary_keys_.size(); ++i)
        check_ref(tables_, primary_keys_[i], "primary_keys[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < foreign_keys_.size(); ++i) {
        const std::string where = "foreign_keys[" + std::to_string(i) + "]";
        check_ref(tables_, foreign_keys_[i].from, where + ".from");
        check_ref(tables_, foreign_keys_[i].to, where + ".to");
    }
}

const Table* DatabaseSchema::find_table(std::string_view name) const noexcept {
    for (const auto& t : tables_)
        if (t.name == name) return &t;
    return nullptr;
}

TableResolution resolve_table(const DatabaseSchema& schema, std::string_view name) {
    if (const Table* t = schema.find_table(name)) return {Match::exact, t->name};
    if (const Table* t = find_table_ci(schema.tables(), name)) return {Match::case_fold, t->name};
    return {};
}

namespace {

// Column lookup inside one table: exact wins, else the (unique) fold match.
std::optional<std::pair<Match, std::string>> match_column(const Table& t, std::string_view name) {
    if (const Column* c = t.find_column(name)) return std::pair{Match::exact, c->name};
    for (const auto& c : t.columns)
        if (text::iequals(c.name, name)) return std::pair{Match::case_fold, c.name};
    return std::nullopt;
}

}  // namespace

ColumnResolution resolve_column(const DatabaseSchema& schema,
                                std::optional<std::string_view> table_hint,
                                std::string_view name) {
    ColumnResolution out;
    if (table_hint) {
        const TableResolution tr = resolve_table(schema, *table_hint);
        if (tr.match == Match::absent)
            throw Error(ErrorKind::schema, "table hint '" + std::string(*table_hint) +
                                               "' does not resolve in schema '" + schema.name() + "'");
        const Table* t = schema.find_table(tr.canonical);
        if (auto m = match_column(*t, name)) {
            out.match = m->first;
            out.table = t->name;
            out.column = m->second;
        }
        return out;
    }

    std::vector<std::pair<const Table*, std::pair<Match, std::string>>> hits;
    for (const auto& t : schema.tables())
        if (auto m = match_column(t, name)) hits.emplace_back(&t, *m);
    if (hits.size() == 1) {
        out.match = hits[0].second.first;
        out.table = hits[0].first->name;
        out.column = hits[0].second.second;
    } else if (hits.size() > 1) {
        out.match = Match::ambiguous;
        for (const auto& h : hits) out.owners.push_back(h.first->name);
    }
    return out;
}

namespace {

ColumnRef parse_dotted(const json& j, const std::string& where) {
    if (!j.is_string()) throw Error(ErrorKind::parse, where + ": expected \"table.column\" string");
    const std::string s = j.get<std::string>();
    const auto dot = s.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == s.size())
        throw Error(ErrorKind::parse, where + ": expected \"table.column\", got '" + s + "'");
    return {s.substr(0, dot), s.substr(dot + 1)};
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string())
        throw Error(ErrorKind::parse, where + ": missing string field '" + key + "'");
    return obj[key].get<std::string>();
}

DatabaseSchema from_native(const json& doc) {
    const std::string name = require_string(doc, "database", "schema");
    if (!doc.contains("metadata") || !doc["metadata"].is_array())
        throw Error(ErrorKind::parse, "schema: missing array field 'metadata'");
    std::vector<Table> tables;
    const json& meta = doc["metadata"];
    for (std::size_t i = 0; i < meta.size(); ++i) {
        const std::string where = "metadata[" + std::to_string(i) + "]";
        Table t{require_string(meta[i], "name", where), {}};
        if (!meta[i].contains("columns") || !meta[i]["columns"].is_array())
            throw Error(ErrorKind::parse, where + ": missing array field 'columns'");
        const json& cols = meta[i]["columns"];
        const json* types = meta[i].contains("types") ? &meta[i]["types"] : nullptr;
        if (types && (!types->is_array() || types->size() != cols.size()))
            throw Error(ErrorKind::parse, where + ": 'types' must parallel 'columns'");
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (!cols[j].is_string())
                throw Error(ErrorKind::parse, where + ".columns[" + std::to_string(j) + "]: not a string");
            Column c{cols[j].get<std::string>(), std::nullopt};
            if (types) c.type = parse_data_type((*types)[j].get<std::string>());
            t.columns.push_back(std::move(c));
        }
        tables.push_back(std::move(t));
    }
    std::vector<ColumnRef> pks;
    if (doc.contains("primary_keys")) {
        const json& arr = doc["primary_keys"];
        for (std::size_t i = 0; i < arr.size(); ++i)
            pks.push_back(parse_dotted(arr[i], "primary_keys[" + std::to_string(i) + "]"));
    }
    std::vector<ForeignKey> fks;
    if (doc.contains("foreign_keys")) {
        const json& arr = doc["foreign_keys"];
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string where = "foreign_keys[" + std::to_string(i) + "]";
            if (!arr[i].is_array() || arr[i].size() != 2)
                throw Error(ErrorKind::parse, where + ": expected [\"t.c\", \"t.c\"] pair");
            fks.push_back({parse_dotted(arr[i][0], where + "[0]"), parse_dotted(arr[i][1], where + "[1]")});
        }
    }
    return DatabaseSchema(name, std::move(tables), std::move(pks), std::move(fks));
}

DatabaseSchema from_spider(const json& entry) {
    const std::string name = require_string(entry, "db_id", "tables.json entry");
    const std::string where = "tables.json[" + name + "]";
    for (const char* key : {"table_names_original", "column_names_original"})
        if (!entry.contains(key) || !entry[key].is_array())
            throw Error(ErrorKind::parse, where + ": missing array field '" + key + "'");
    const json& tnames = entry["table_names_original"];
    const json& cnames = entry["column_names_original"];
    const json* ctypes = entry.contains("column_types") ? &entry["column_types"] : nullptr;

    std::vector<Table> tables;
    for (const auto& t : tnames) tables.push_back({t.get<std::string>(), {}});
    // Global column index -> (table, column) for key decoding; index 0 is "*".
    std::vector<std::optional<ColumnRef>> by_index;
    for (std::size_t i = 0; i < cnames.size(); ++i) {
        const json& pair = cnames[i];
        if (!pair.is_array() || pair.size() != 2)
            throw Error(ErrorKind::parse, where + ".column_names_original[" + std::to_string(i) + "]: bad pair");
        const int tidx = pair[0].get<int>();
        const std::string cname = pair[1].get<std::string>();
        if (tidx < 0) {
            by_index.emplace_back(std::nullopt);
            continue;
        }
        if (static_cast<std::size_t>(tidx) >= tables.size())
            throw Error(ErrorKind::parse, where + ".column_names_original[" + std::to_string(i) +
                                              "]: table index out of range");
        Column c{cname, std::nullopt};
        if (ctypes && i < ctypes->size()) c.type = parse_data_type((*ctypes)[i].get<std::string>());
        tables[tidx].columns.push_back(c);
        by_index.emplace_back(ColumnRef{tables[tidx].name, cname});
    }
    auto ref_at = [&](const json& idx, const std::string& w) -> ColumnRef {
        const auto i = idx.get<std::size_t>();
        if (i >= by_index.size() || !by_index[i])
            throw Error(ErrorKind::schema, w + ": dangling column index " + std::to_string(i));
        return *by_index[i];
    };
    std::vector<ColumnRef> pks;
    if (entry.contains("primary_keys")) {
        const json& arr = entry["primary_keys"];
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string w = where + ".primary_keys[" + std::to_string(i) + "]";
            if (arr[i].is_array()) {
                for (const auto& idx : arr[i]) pks.push_back(ref_at(idx, w));
            } else {
                pks.push_back(ref_at(arr[i], w));
            }
        }
    }
    std::vector<ForeignKey> fks;
    if (entry.contains("foreign_keys")) {
        const json& arr = entry["foreign_keys"];
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string w = where + ".foreign_keys[" + std::to_string(i) + "]";
            if (!arr[i].is_array() || arr[i].size() != 2)
                throw Error(ErrorKind::parse, w + ": expected index pair");
            fks.push_back({ref_at(arr[i][0], w), ref_at(arr[i][1], w)});
        }
    }
    return DatabaseSchema(name, std::move(tables), std::move(pks), std::move(fks));
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse, std::string("schema document: ") + e.what());
    }
}

}  // namespace

DatabaseSchema load_schema(std::string_view json_text) {
    const json doc = parse_json(json_text);
    if (!doc.is_object()) throw Error(ErrorKind::parse, "schema document: expected a JSON object");
    try {
        if (doc.contains("db_id")) return from_spider(doc);
        return from_native(doc);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::parse, std::string("schema document: ") + e.what());
    }
}

std::vector<DatabaseSchema> import_spider_tables(std::string_view json_text) {
    const json doc = parse_json(json_text);
    if (!doc.is_array()) throw Error(ErrorKind::parse, "tables.json: expected a JSON array");
    std::vector<DatabaseSchema> out;
    try {
        for (const auto& entry : doc) out.push_back(from_spider(entry));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::parse, std::string("tables.json: ") + e.what());
    }
    return out;
}

std::string serialize_schema(const DatabaseSchema& schema) {
    json doc;
    doc["database"] = schema.name();
    json meta = json::array();
    for (const auto& t : schema.tables()) {
        json jt;
        jt["name"] = t.name;
        jt["columns"] = json::array();
        const bool typed = std::all_of(t.columns.begin(), t.columns.end(),
                                       [](const Column& c) { return c.type.has_value(); });
        for (const auto& c : t.columns) jt["columns"].push_back(c.name);
        if (typed) {
            jt["types"] = json::array();
            for (const auto& c : t.columns) jt["types"].push_back(to_string(*c.type));
        }
        meta.push_back(std::move(jt));
    }
    doc["metadata"] = std::move(meta);
    if (!schema.primary_keys().empty()) {
        doc["primary_keys"] = json::array();
        for (const auto& pk : schema.primary_keys()) doc["primary_keys"].push_back(pk.to_string());
    }
    if (!schema.foreign_keys().empty()) {
        doc["foreign_keys"] = json::array();
        for (const auto& fk : schema.foreign_keys())
            doc["foreign_keys"].push_back(json::array({fk.from.to_string(), fk.to.to_string()}));
    }
    return doc.dump(2) + "\n";
}

void SchemaCatalog::add(DatabaseSchema schema) {
    auto name = schema.name();
    schemas_[name] = std::make_shared<const DatabaseSchema>(std::move(schema));
}

std::shared_ptr<const DatabaseSchema> SchemaCatalog::find(std::string_view id) const {
    auto it = schemas_.find(id);
    return it == schemas_.end() ? nullptr : it->second;
}

const DatabaseSchema& SchemaCatalog::at(std::string_view id) const {
    return *shared(id);
}

std::shared_ptr<const DatabaseSchema> SchemaCatalog::shared(std::string_view id) const {
    auto s = find(id);
    if (!s) throw Error(ErrorKind::data, "unknown schema id '" + std::string(id) + "'");
    return s;
}

std::vector<std::string> SchemaCatalog::ids() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : schemas_) out.push_back(k);
    return out;
}

SchemaCatalog SchemaCatalog::load(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    SchemaCatalog cat;
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(path))
            if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            const std::string body = io::read_file(f);
            const auto first = body.find_first_not_of(" \t\r\n");
            if (first != std::string::npos && body[first] == '[') {
                for (auto& s : import_spider_tables(body)) cat.add(std::move(s));
            } else {
                cat.add(load_schema(body));
            }
        }
        return cat;
    }
    const std::string body = io::read_file(path);
    const auto first = body.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && body[first] == '[') {
        for (auto& s : import_spider_tables(body)) cat.add(std::move(s));
    } else {
        cat.add(load_schema(body));
    }
    return cat;
}

}  // namespace t2s
