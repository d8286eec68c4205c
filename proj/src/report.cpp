// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/report.hpp"

#include "t2s/error.hpp"
#include "t2s/text.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace t2s {

using json = nlohmann::json;

namespace {

json issue_json(const Issue& i) {
    json j{{"kind", to_string(i.kind)}, {"offending", i.offending}, {"context", i.context}};
    j["suggestion"] = i.suggestion ? json(*i.suggestion) : json(nullptr);
    return j;
}

IssueKind parse_issue_kind(const std::string& s) {
    for (IssueKind k : {IssueKind::unknown_table, IssueKind::unknown_column, IssueKind::case_mismatch,
                        IssueKind::ambiguous_column, IssueKind::alias_error})
        if (s == to_string(k)) return k;
    throw Error(ErrorKind::data, "unknown issue kind '" + s + "'");
}

Issue issue_from(const json& j) {
    Issue i;
    i.kind = parse_issue_kind(j.at("kind").get<std::string>());
    i.offending = j.at("offending").get<std::string>();
    i.context = j.value("context", "");
    if (j.contains("suggestion") && !j["suggestion"].is_null()) i.suggestion = j["suggestion"].get<std::string>();
    return i;
}

// schema_names is omitted: it is a function of the schema and would repeat
// the whole catalog on every attempt.
json validation_json(const ValidationReport& r) {
    json issues = json::array();
    for (const auto& i : r.issues) issues.push_back(issue_json(i));
    json j{{"syntax_ok", r.syntax_ok}, {"aligned", r.aligned}, {"issues", issues}};
    if (!r.syntax_ok) j["syntax_error"] = r.syntax_error;
    return j;
}

ValidationReport validation_from(const json& j) {
    ValidationReport r;
    r.syntax_ok = j.at("syntax_ok").get<bool>();
    r.aligned = j.at("aligned").get<bool>();
    r.syntax_error = j.value("syntax_error", "");
    for (const auto& i : j.at("issues")) r.issues.push_back(issue_from(i));
    return r;
}

json attempt_json(const AttemptRecord& a) {
    json j{{"n", a.number},
           {"prompt_digest", a.prompt_digest},
           {"prompt_tokens", a.prompt_tokens},
           {"temperature", a.temperature},
           {"raw_text", a.raw_text},
           {"finish", to_string(a.finish)},
           {"accepted", a.accepted}};
    if (a.prompt_text) j["prompt_text"] = *a.prompt_text;
    j["extracted_sql"] = a.extracted_sql ? json(*a.extracted_sql) : json(nullptr);
    j["validation"] = a.validation ? validation_json(*a.validation) : json(nullptr);
    j["confidence"] = a.confidence ? json{{"value", a.confidence->value}, {"tokens", a.confidence->token_count}}
                                   : json(nullptr);
    if (!a.rejection.empty()) j["rejection"] = a.rejection;
    return j;
}

AttemptRecord attempt_from(const json& j) {
    AttemptRecord a;
    a.number = j.at("n").get<std::size_t>();
    a.prompt_digest = j.at("prompt_digest").get<std::string>();
    a.prompt_tokens = j.value("prompt_tokens", std::size_t{0});
    a.temperature = j.value("temperature", 0.0);
    a.raw_text = j.at("raw_text").get<std::string>();
    a.finish = parse_finish_reason(j.value("finish", "stop"));
    a.accepted = j.at("accepted").get<bool>();
    if (j.contains("prompt_text")) a.prompt_text = j["prompt_text"].get<std::string>();
    if (j.contains("extracted_sql") && !j["extracted_sql"].is_null())
        a.extracted_sql = j["extracted_sql"].get<std::string>();
    if (j.contains("validation") && !j["validation"].is_null()) a.validation = validation_from(j["validation"]);
    if (j.contains("confidence") && !j["confidence"].is_null())
        a.confidence = ConfidenceScore{j["confidence"].at("value").get<double>(),
                                       j["confidence"].at("tokens").get<std::size_t>()};
    a.rejection = j.value("rejection", "");
    return a;
}

json record_json(const RunRecord& r) {
    json attempts = json::array();
    for (const auto& a : r.attempts) attempts.push_back(attempt_json(a));
    json j{{"id", r.id}, {"db_id", r.db_id}, {"status", to_string(r.status)}, {"attempts", attempts}};
    j["final_sql"] = r.final_sql ? json(*r.final_sql) : json(nullptr);
    if (!r.error.empty()) j["error"] = r.error;
    if (!r.warnings.empty()) j["warnings"] = r.warnings;
    return j;
}

RunRecord record_from(const json& j) {
    RunRecord r;
    r.id = j.at("id").get<std::string>();
    r.db_id = j.at("db_id").get<std::string>();
    r.status = parse_run_status(j.at("status").get<std::string>());
    for (const auto& a : j.at("attempts")) r.attempts.push_back(attempt_from(a));
    if (j.contains("final_sql") && !j["final_sql"].is_null()) r.final_sql = j["final_sql"].get<std::string>();
    r.error = j.value("error", "");
    if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
    return r;
}

std::string pct(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", ratio * 100.0);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string detail_text(const EvalVerdict& v) {
    std::string d = to_string(v.ts_detail);
    if (!v.em_diff.empty()) d += " em:" + text::join(v.em_diff, ";");
    return d;
}

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
}

}  // namespace

std::string serialize_run_records(std::span<const RunRecord> records) {
    std::string out;
    for (const auto& r : records) out += record_json(r).dump() + "\n";
    return out;
}

std::vector<RunRecord> parse_run_records(std::string_view jsonl) {
    std::vector<RunRecord> out;
    std::istringstream in{std::string(jsonl)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(record_from(json::parse(line)));
        } catch (const json::exception& e) {
            throw Error(ErrorKind::data, "run record line " + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorKind::data, "run record line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

ReportFormat parse_report_format(std::string_view name) {
    if (name == "json") return ReportFormat::json;
    if (name == "csv") return ReportFormat::csv;
    if (name == "table" || name == "text") return ReportFormat::table;
    throw Error(ErrorKind::config, "unknown report format '" + std::string(name) + "' (json, csv, table)");
}

std::string headline(const EvalReport& r) {
    return "EM " + pct(r.em_accuracy) + " / TS " + pct(r.ts_accuracy);
}

std::string emit_report(const EvalReport& r, ReportFormat format) {
    switch (format) {
        case ReportFormat::json: {
            json items = json::array();
            for (const auto& v : r.per_item)
                items.push_back({{"id", v.id},
                                 {"db_id", v.db_id},
                                 {"em", v.em},
                                 {"ts", v.ts},
                                 {"em_diff", v.em_diff},
                                 {"ts_detail", to_string(v.ts_detail)},
                                 {"attempts", v.attempts},
                                 {"status", v.status}});
            json hist = json::object();
            for (const auto& [k, n] : r.attempt_histogram) hist[std::to_string(k)] = n;
            json j{{"segments", r.segments},   {"n", r.n},
                   {"em_matches", r.em_matches}, {"ts_matches", r.ts_matches},
                   {"em_accuracy", r.em_accuracy}, {"ts_accuracy", r.ts_accuracy},
                   {"gold_errors", r.gold_errors}, {"exhausted", r.exhausted},
                   {"attempt_histogram", hist},  {"items", items}};
            return j.dump(2) + "\n";
        }
        case ReportFormat::csv: {
            std::string out = "id,em,ts,attempts,detail\n";
            for (const auto& v : r.per_item)
                out += csv_field(v.id) + "," + (v.em ? "1" : "0") + "," + (v.ts ? "1" : "0") + "," +
                       std::to_string(v.attempts) + "," + csv_field(detail_text(v)) + "\n";
            return out;
        }
        case ReportFormat::table: {
            std::size_t w = 2;
            for (const auto& v : r.per_item) w = std::max(w, v.id.size());
            std::string out = headline(r) + "\n";
            out += "n=" + std::to_string(r.n) + " em=" + std::to_string(r.em_matches) +
                   " ts=" + std::to_string(r.ts_matches) + " gold_errors=" + std::to_string(r.gold_errors) +
                   " exhausted=" + std::to_string(r.exhausted) + "\n";
            out += "attempts:";
            for (const auto& [k, n] : r.attempt_histogram) out += " " + std::to_string(k) + "=" + std::to_string(n);
            out += "\n\n";
            out += pad("id", w) + "  em  ts  att  detail\n";
            for (const auto& v : r.per_item)
                out += pad(v.id, w) + "  " + (v.em ? "1 " : "0 ") + "  " + (v.ts ? "1 " : "0 ") + "  " +
                       pad(std::to_string(v.attempts), 3) + "  " + detail_text(v) + "\n";
            return out;
        }
    }
    return {};
}

EvalReport parse_report_json(std::string_view text) {
    try {
        const json j = json::parse(text);
        EvalReport r;
        r.segments = j.at("segments").get<std::string>();
        r.n = j.at("n").get<std::size_t>();
        r.em_matches = j.at("em_matches").get<std::size_t>();
        r.ts_matches = j.at("ts_matches").get<std::size_t>();
        r.em_accuracy = j.at("em_accuracy").get<double>();
        r.ts_accuracy = j.at("ts_accuracy").get<double>();
        r.gold_errors = j.at("gold_errors").get<std::size_t>();
        r.exhausted = j.at("exhausted").get<std::size_t>();
        for (const auto& [k, n] : j.at("attempt_histogram").items())
            r.attempt_histogram[std::stoul(k)] = n.get<std::size_t>();
        for (const auto& it : j.at("items")) {
            EvalVerdict v;
            v.id = it.at("id").get<std::string>();
            v.db_id = it.at("db_id").get<std::string>();
            v.em = it.at("em").get<bool>();
            v.ts = it.at("ts").get<bool>();
            v.em_diff = it.at("em_diff").get<std::vector<std::string>>();
            v.ts_detail = parse_ts_detail(it.at("ts_detail").get<std::string>());
            v.attempts = it.at("attempts").get<std::size_t>();
            v.status = it.at("status").get<std::string>();
            r.per_item.push_back(std::move(v));
        }
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::data, std::string("malformed report: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw Error(ErrorKind::data, "malformed report: bad histogram key");
    }
}

}  // namespace t2s
