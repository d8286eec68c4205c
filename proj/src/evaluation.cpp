// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/evaluation.hpp"

#include "t2s/canonical.hpp"
#include "t2s/error.hpp"
#include "t2s/sql_ast.hpp"
#include "t2s/sql_lexer.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace t2s {

namespace {

using sql::Expr;
using sql::Query;

void flatten_and(const Expr& e, std::vector<std::string>& out) {
    if (const auto* l = e.as<sql::LogicalExpr>(); l && l->op == "AND") {
        for (const auto& o : l->operands) flatten_and(o, out);
        return;
    }
    out.push_back(sql::to_sql(e));
}

std::vector<std::string> sorted(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<std::string> select_segment(const Query& q) {
    std::vector<std::string> items;
    for (const auto& it : q.select) items.push_back(sql::to_sql(it.expr));
    items = sorted(std::move(items));
    items.insert(items.begin(), q.distinct ? "DISTINCT" : "ALL");
    return items;
}

// Sources as a multiset plus every ON conjunct as a set. Inner, comma and
// cross joins are one class; only LEFT keeps its own tag.
std::vector<std::string> from_segment(const Query& q) {
    std::vector<std::string> sources;
    std::vector<std::string> conds;
    for (const auto& f : q.from) {
        std::string d = f.join == sql::JoinKind::left ? "left " : "inner ";
        d += f.ref.subquery ? "(" + sql::to_sql(**f.ref.subquery) + ")" : f.ref.table;
        d += " " + f.ref.alias;
        sources.push_back(std::move(d));
        if (f.on) flatten_and(*f.on, conds);
    }
    sources = sorted(std::move(sources));
    conds = sorted(std::move(conds));
    conds.erase(std::unique(conds.begin(), conds.end()), conds.end());
    sources.push_back("|");
    sources.insert(sources.end(), conds.begin(), conds.end());
    return sources;
}

std::string opt_expr(const std::optional<Expr>& e) { return e ? sql::to_sql(*e) : std::string(); }

std::vector<std::string> group_segment(const Query& q) {
    std::vector<std::string> g;
    for (const auto& e : q.group_by) g.push_back(sql::to_sql(e));
    g = sorted(std::move(g));
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

std::vector<std::string> order_segment(const Query& q) {
    std::vector<std::string> o;
    for (const auto& it : q.order_by) o.push_back(sql::to_sql(it.expr) + (it.desc ? " DESC" : " ASC"));
    return o;
}

bool same_query(const Query& a, const Query& b, std::vector<std::string>* diff);

bool same_set_op(const Query& a, const Query& b) {
    if (a.set_op.has_value() != b.set_op.has_value()) return false;
    if (!a.set_op) return true;
    if (a.set_op->kind != b.set_op->kind || a.set_op->all != b.set_op->all) return false;
    return same_query(*a.set_op->rhs, *b.set_op->rhs, nullptr);
}

bool same_query(const Query& a, const Query& b, std::vector<std::string>* diff) {
    bool ok = true;
    auto seg = [&](const char* name, bool equal) {
        if (equal) return;
        ok = false;
        if (diff) diff->emplace_back(name);
    };
    seg("select", select_segment(a) == select_segment(b));
    seg("from", from_segment(a) == from_segment(b));
    seg("where", opt_expr(a.where) == opt_expr(b.where));
    seg("group_by", group_segment(a) == group_segment(b));
    seg("having", opt_expr(a.having) == opt_expr(b.having));
    seg("order_by", order_segment(a) == order_segment(b));
    seg("limit", a.limit == b.limit);
    seg("set_op", same_set_op(a, b));
    return ok;
}

std::optional<double> as_number(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&c)) return *d;
    return std::nullopt;
}

bool rows_equal(const Row& a, const Row& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!cells_equal(a[i], b[i], tol)) return false;
    return true;
}

}  // namespace

EmResult exact_set_match(std::string_view pred, std::string_view gold, const EmOptions& options) {
    EmResult r;
    Query g;
    try {
        g = sql::parse_sql(gold);
    } catch (const sql::SyntaxError&) {
        r.diff = {"gold_syntax"};
        return r;
    }
    Query p;
    try {
        p = sql::parse_sql(pred);
    } catch (const sql::SyntaxError&) {
        r.diff = {"syntax"};
        return r;
    }
    sql::CanonicalOptions co{options.ignore_literals, options.schema};
    r.match = same_query(sql::canonicalize(p, co), sql::canonicalize(g, co), &r.diff);
    return r;
}

const char* to_string(TsDetail d) noexcept {
    switch (d) {
        case TsDetail::match: return "match";
        case TsDetail::result_mismatch: return "result_mismatch";
        case TsDetail::prediction_error: return "prediction_error";
        case TsDetail::gold_error: return "gold_error";
    }
    return "prediction_error";
}

TsDetail parse_ts_detail(std::string_view name) {
    for (TsDetail d : {TsDetail::match, TsDetail::result_mismatch, TsDetail::prediction_error, TsDetail::gold_error})
        if (name == to_string(d)) return d;
    throw Error(ErrorKind::data, "unknown ts detail '" + std::string(name) + "'");
}

bool has_top_level_order_by(std::string_view sql) {
    try {
        const Query q = sql::parse_sql(sql);
        // for a compound the trailing ORDER BY binds to the last operand
        const Query* last = &q;
        while (last->set_op) last = &*last->set_op->rhs;
        return !q.order_by.empty() || (last != &q && !last->order_by.empty());
    } catch (const sql::SyntaxError&) {
        return false;
    }
}

bool cells_equal(const Cell& a, const Cell& b, double tol) {
    if (std::holds_alternative<std::monostate>(a) || std::holds_alternative<std::monostate>(b))
        return std::holds_alternative<std::monostate>(a) && std::holds_alternative<std::monostate>(b);
    const auto na = as_number(a);
    const auto nb = as_number(b);
    if (na && nb) {
        if (*na == *nb) return true;
        const double scale = std::max(std::fabs(*na), std::fabs(*nb));
        return std::fabs(*na - *nb) <= tol * scale;
    }
    if (na || nb) return false;
    return std::get<std::string>(a) == std::get<std::string>(b);
}

bool results_equal(const QueryResult& pred, const QueryResult& gold, bool ordered, double tol) {
    if (pred.columns != gold.columns || pred.rows.size() != gold.rows.size()) return false;
    if (ordered) {
        for (std::size_t i = 0; i < pred.rows.size(); ++i)
            if (!rows_equal(pred.rows[i], gold.rows[i], tol)) return false;
        return true;
    }
    // greedy bipartite pairing; tolerance rules out a plain sort-and-compare
    std::vector<bool> used(gold.rows.size(), false);
    for (const auto& pr : pred.rows) {
        bool found = false;
        for (std::size_t j = 0; j < gold.rows.size(); ++j) {
            if (!used[j] && rows_equal(pr, gold.rows[j], tol)) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

TsResult execution_match(std::string_view pred, std::string_view gold, const SqliteDb& db, const TsOptions& options) {
    TsResult r;
    const ExecOutcome g = db.execute(gold, options.step_limit);
    if (!g.ok()) {
        r.detail = TsDetail::gold_error;
        r.message = g.error;
        return r;
    }
    const ExecOutcome p = db.execute(pred, options.step_limit);
    if (!p.ok()) {
        r.detail = TsDetail::prediction_error;
        r.message = p.error;
        return r;
    }
    r.match = results_equal(*p.result, *g.result, has_top_level_order_by(gold), options.float_tol);
    r.detail = r.match ? TsDetail::match : TsDetail::result_mismatch;
    return r;
}

std::vector<GoldItem> load_golds(std::string_view jsonl) {
    std::vector<GoldItem> out;
    std::istringstream in{std::string(jsonl)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            GoldItem g;
            g.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
            g.db_id = j.at("db_id").get<std::string>();
            g.query = j.at("query").get<std::string>();
            out.push_back(std::move(g));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::data, "gold line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::filesystem::path fixture_path(const std::filesystem::path& dir, std::string_view db_id) {
    return dir / std::string(db_id) / (std::string(db_id) + ".sqlite");
}

void finalize(EvalReport& r) {
    r.n = r.em_matches = r.ts_matches = r.gold_errors = r.exhausted = 0;
    r.attempt_histogram.clear();
    for (const auto& v : r.per_item) {
        ++r.attempt_histogram[v.attempts];
        if (v.status == "exhausted") ++r.exhausted;
        if (v.ts_detail == TsDetail::gold_error) {
            ++r.gold_errors;
            continue;
        }
        ++r.n;
        if (v.em) ++r.em_matches;
        if (v.ts) ++r.ts_matches;
    }
    r.em_accuracy = r.n ? static_cast<double>(r.em_matches) / static_cast<double>(r.n) : 0.0;
    r.ts_accuracy = r.n ? static_cast<double>(r.ts_matches) / static_cast<double>(r.n) : 0.0;
}

EvalReport evaluate_run(std::span<const RunRecord> records, std::span<const GoldItem> golds,
                        const std::filesystem::path& fixtures_dir, const EvalOptions& options) {
    const std::size_t common = std::min(records.size(), golds.size());
    for (std::size_t i = 0; i < common; ++i) {
        if (records[i].id != golds[i].id)
            throw Error(ErrorKind::data, "id mismatch at item " + std::to_string(i) + ": record '" + records[i].id +
                                             "' vs gold '" + golds[i].id + "'");
    }
    if (records.size() != golds.size())
        throw Error(ErrorKind::data, "id mismatch at item " + std::to_string(common) + ": " +
                                         std::to_string(records.size()) + " records vs " +
                                         std::to_string(golds.size()) + " golds");

    std::map<std::string, SqliteDb, std::less<>> dbs;
    auto db_for = [&](const std::string& id) -> const SqliteDb& {
        auto it = dbs.find(id);
        if (it == dbs.end()) it = dbs.emplace(id, SqliteDb(fixture_path(fixtures_dir, id))).first;
        return it->second;
    };

    EvalReport report;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const RunRecord& rec = records[i];
        const GoldItem& gold = golds[i];
        EvalVerdict v;
        v.id = gold.id;
        v.db_id = gold.db_id;
        v.attempts = rec.attempts.size();
        v.status = to_string(rec.status);
        const SqliteDb& db = db_for(gold.db_id);

        EmOptions em = options.em;
        if (!em.schema && options.catalog)
            if (auto s = options.catalog->find(gold.db_id)) em.schema = s.get();

        if (rec.final_sql) {
            const EmResult e = exact_set_match(*rec.final_sql, gold.query, em);
            v.em = e.match;
            v.em_diff = e.diff;
            const TsResult t = execution_match(*rec.final_sql, gold.query, db, options.ts);
            v.ts = t.match;
            v.ts_detail = t.detail;
        } else {
            v.em_diff = {"no_prediction"};
            // the gold still runs so a broken fixture is reported as such
            v.ts_detail = db.execute(gold.query, options.ts.step_limit).ok() ? TsDetail::prediction_error
                                                                              : TsDetail::gold_error;
        }
        report.per_item.push_back(std::move(v));
    }
    finalize(report);
    return report;
}

}  // namespace t2s
