// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/cli.hpp"

#include "t2s/backend.hpp"
#include "t2s/corpus.hpp"
#include "t2s/error.hpp"
#include "t2s/evaluation.hpp"
#include "t2s/io.hpp"
#include "t2s/pipeline.hpp"
#include "t2s/prompt.hpp"
#include "t2s/report.hpp"
#include "t2s/schema.hpp"
#include "t2s/text.hpp"
#include "t2s/validate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>

namespace t2s {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::config: return kExitUsage;
        case ErrorKind::transport:
        case ErrorKind::timeout: return kExitTransport;
        default: return kExitData;
    }
}

void require_file(const std::string& path, const char* what) {
    if (!fs::exists(path)) throw Error(ErrorKind::config, std::string(what) + " not found: " + path);
}

// --- shared option groups --------------------------------------------------

struct PromptOpts {
    std::string strategy = "few_shot";
    std::size_t k = 2;
    std::string selection = "first_k";
    std::uint64_t seed = 0;
    std::size_t max_input_tokens = 512;
    std::string preamble_file;

    void add(CLI::App& app) {
        app.add_option("--strategy", strategy, "zero_shot, few_shot, structured_few_shot, schema_aware_few_shot, "
                                               "instruction_focused_few_shot")
            ->capture_default_str();
        app.add_option("--k", k, "examples per prompt")->capture_default_str();
        app.add_option("--selection", selection, "first_k, seeded_random, token_overlap")->capture_default_str();
        app.add_option("--seed", seed)->capture_default_str();
        app.add_option("--max-input-tokens", max_input_tokens)->capture_default_str();
        app.add_option("--preamble-file", preamble_file, "replaces the built-in preamble");
    }

    SpecTemplate spec() const {
        SpecTemplate t;
        t.strategy = parse_strategy(strategy);
        t.k = t.strategy == Strategy::zero_shot ? 0 : k;
        t.selection = {parse_selection_mode(selection), seed};
        t.max_input_tokens = max_input_tokens;
        if (!preamble_file.empty()) {
            require_file(preamble_file, "preamble file");
            t.preamble = io::read_file(preamble_file);
        }
        return t;
    }
};

SchemaCatalog load_catalog(const std::string& path) {
    require_file(path, "schema path");
    return SchemaCatalog::load(path);
}

std::vector<ExamplePoint> load_pool(const std::string& path, const SchemaCatalog& catalog) {
    if (path.empty()) return {};
    require_file(path, "corpus");
    return load_corpus(io::read_file(path), catalog);
}

/// JSONL or a JSON array of {"id"?, "question" | "instruction", "db_id"}.
std::vector<RunTarget> load_targets(const std::string& path, const SchemaCatalog& catalog) {
    require_file(path, "targets file");
    const std::string src = io::read_file(path);
    std::vector<json> recs;
    const auto first = src.find_first_not_of(" \t\r\n");
    try {
        if (first != std::string::npos && src[first] == '[') {
            for (auto& r : json::parse(src)) recs.push_back(r);
        } else {
            std::istringstream in(src);
            std::string line;
            while (std::getline(in, line))
                if (!text::trim(line).empty()) recs.push_back(json::parse(line));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::data, "targets: " + std::string(e.what()));
    }
    std::vector<RunTarget> out;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const json& r = recs[i];
        const std::string where = "target " + std::to_string(i);
        RunTarget t;
        if (r.contains("id")) t.id = r["id"].is_string() ? r["id"].get<std::string>() : r["id"].dump();
        else t.id = std::to_string(i);
        if (r.contains("question") && r["question"].is_string()) t.instruction = r["question"];
        else if (r.contains("instruction") && r["instruction"].is_string()) t.instruction = r["instruction"];
        else throw Error(ErrorKind::data, where + ": missing field 'question'");
        if (!r.contains("db_id") || !r["db_id"].is_string()) throw Error(ErrorKind::data, where + ": missing field 'db_id'");
        t.db_id = r["db_id"];
        if (!catalog.contains(t.db_id)) throw Error(ErrorKind::data, where + ": unknown schema id '" + t.db_id + "'");
        out.push_back(std::move(t));
    }
    return out;
}

void write_or_print(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") out << content;
    else io::write_file(path, content);
}

// --- prepare ---------------------------------------------------------------

struct PrepareOpts {
    std::string input;
    std::string tables;
    std::string out;
    std::string heldout_out;
    std::string schemas_out;
    double split = 0.0;
    std::uint64_t seed = 0;
    bool strict = false;
};

std::vector<fs::path> dataset_files(const fs::path& input) {
    std::vector<fs::path> files;
    if (fs::is_directory(input)) {
        for (const auto& e : fs::directory_iterator(input)) {
            const auto ext = e.path().extension();
            if (e.is_regular_file() && (ext == ".json" || ext == ".jsonl") && e.path().filename() != "tables.json")
                files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw Error(ErrorKind::data, "no dataset files (*.json, *.jsonl) in " + input.string());
    } else {
        files.push_back(input);
    }
    return files;
}

int cmd_prepare(const PrepareOpts& o, std::ostream& out, std::ostream& err) {
    require_file(o.input, "input");
    require_file(o.tables, "tables");
    const SchemaCatalog catalog = SchemaCatalog::load(o.tables);
    std::vector<ExamplePoint> points;
    std::vector<std::string> problems;
    for (const auto& f : dataset_files(o.input)) {
        std::vector<std::string> local;
        auto got = load_corpus_lenient(io::read_file(f), catalog, local);
        for (auto& p : local) problems.push_back(f.filename().string() + ": " + p);
        points.insert(points.end(), got.begin(), got.end());
    }
    for (const auto& p : problems) err << "skipped " << p << "\n";
    if (o.strict && !problems.empty())
        throw Error(ErrorKind::data, std::to_string(problems.size()) + " malformed record(s) under --strict");
    if (points.empty()) throw Error(ErrorKind::data, "no usable records in " + o.input);

    std::map<std::string, std::size_t> seen_ids;
    for (auto& p : points) {
        p.instruction = preprocess(p.instruction);
        // records from several files may reuse index ids
        if (const auto n = seen_ids[p.id]++; n > 0) p.id += "#" + std::to_string(n);
    }

    if (o.split > 0.0) {
        if (o.heldout_out.empty()) throw Error(ErrorKind::config, "--split needs --heldout-out");
        const CorpusSplit s = split_corpus(points, o.seed, o.split);
        io::write_file(o.out, serialize_corpus(s.train));
        io::write_file(o.heldout_out, serialize_corpus(s.held_out));
        out << "train " << s.train.size() << " -> " << o.out << "\n";
        out << "held_out " << s.held_out.size() << " -> " << o.heldout_out << "\n";
    } else {
        io::write_file(o.out, serialize_corpus(points));
        out << "records " << points.size() << " -> " << o.out << "\n";
    }

    std::map<std::string, std::size_t> per_db;
    for (const auto& p : points) ++per_db[p.schema_id];
    for (const auto& [db, n] : per_db) out << "  " << db << " " << n << "\n";
    if (!problems.empty()) out << "skipped " << problems.size() << "\n";

    if (!o.schemas_out.empty()) {
        fs::create_directories(o.schemas_out);
        for (const auto& id : catalog.ids())
            io::write_file(fs::path(o.schemas_out) / (id + ".json"), serialize_schema(catalog.at(id)));
        out << "schemas " << catalog.size() << " -> " << o.schemas_out << "\n";
    }
    return kExitOk;
}

// --- render ----------------------------------------------------------------

struct RenderOpts {
    std::string schemas;
    std::string corpus;
    std::string db;
    std::string question;
    std::string out;
    std::vector<std::string> notes;
    PromptOpts prompt;
};

int cmd_render(const RenderOpts& o, std::ostream& out) {
    const SchemaCatalog catalog = load_catalog(o.schemas);
    const auto pool = load_pool(o.corpus, catalog);
    const SpecTemplate t = o.prompt.spec();
    PromptSpec spec;
    spec.strategy = t.strategy;
    spec.preamble = t.preamble;
    spec.max_input_tokens = t.max_input_tokens;
    spec.target = {o.question, catalog.shared(o.db)};
    spec.target_notes = o.notes;
    if (t.strategy != Strategy::zero_shot)
        for (const auto& p : select_examples(pool, o.question, t.k, t.selection))
            spec.examples.push_back({p, catalog.shared(p.schema_id)});
    const RenderedPrompt r = render(spec);
    if (o.out.empty() || o.out == "-") out << r.text << "\n";
    else io::write_file(o.out, r.text);
    return kExitOk;
}

// --- generate --------------------------------------------------------------

struct GenerateOpts {
    std::string schemas;
    std::string corpus;
    std::string targets;
    std::string backend = "mock";
    std::string script;
    std::string url;
    std::string model;
    std::string out;
    double threshold = -1.0;
    std::size_t max_attempts = 5;
    double temperature = 0.0;
    double temperature_bump = 0.0;
    std::size_t max_output_tokens = 256;
    std::vector<std::string> stop;
    std::size_t parallelism = 1;
    bool verbose_prompts = false;
    PromptOpts prompt;
};

int cmd_generate(const GenerateOpts& o, std::ostream& out, std::ostream& err) {
    if (o.backend != "mock" && o.backend != "http")
        throw Error(ErrorKind::config, "unknown backend '" + o.backend + "' (mock, http)");
    // connection settings are checked before any file is read
    std::optional<HttpBackendConfig> http;
    if (o.backend == "http") {
        http = http_config_from_env(o.url.empty() ? std::nullopt : std::optional<std::string>(o.url));
        http->model = o.model;
    } else if (o.script.empty()) {
        throw Error(ErrorKind::config, "--backend mock needs --script");
    }

    const SchemaCatalog catalog = load_catalog(o.schemas);
    const auto pool = load_pool(o.corpus, catalog);
    const auto targets = load_targets(o.targets, catalog);

    RunContext ctx;
    ctx.catalog = &catalog;
    ctx.corpus = pool;
    ctx.spec = o.prompt.spec();
    ctx.policy.threshold = o.threshold;
    ctx.policy.max_attempts = o.max_attempts;
    ctx.policy.base_temperature = o.temperature;
    ctx.policy.temperature_bump = o.temperature_bump;
    ctx.policy.max_output_tokens = o.max_output_tokens;
    ctx.policy.stop_sequences = o.stop;
    ctx.policy.check();
    ctx.keep_prompts = o.verbose_prompts;

    // one backend per target keeps mock replays independent of scheduling
    std::vector<std::unique_ptr<Backend>> backends;
    if (http) {
        for (std::size_t i = 0; i < targets.size(); ++i) backends.push_back(std::make_unique<HttpBackend>(*http));
    } else {
        require_file(o.script, "mock script");
        const MockScript script = parse_mock_script(io::read_file(o.script));
        for (const auto& t : targets) {
            auto it = script.per_target.find(t.id);
            if (it != script.per_target.end()) backends.push_back(std::make_unique<ScriptedBackend>(it->second));
            else if (script.shared) backends.push_back(std::make_unique<ScriptedBackend>(*script.shared));
            else throw Error(ErrorKind::script, "mock script has no entry for target '" + t.id + "'");
        }
    }

    const BatchResult res =
        run_batch(targets, ctx, [&](std::size_t i) -> Backend& { return *backends[i]; }, o.parallelism);
    write_or_print(o.out, serialize_run_records(res.records), out);

    const auto& s = res.summary;
    err << "runs " << s.total << ": accepted " << s.accepted << ", exhausted " << s.exhausted << ", errored "
        << s.errored << "\n";
    bool transport = false;
    for (const auto& r : res.records) {
        if (!r.error.empty()) err << r.id << ": " << to_string(r.status) << ": " << r.error << "\n";
        transport = transport || r.status == RunStatus::transport_error;
    }
    return transport ? kExitTransport : kExitOk;
}

// --- validate --------------------------------------------------------------

struct ValidateOpts {
    std::string schemas;
    std::string db;
    std::string sql;
    std::string sql_file;
};

int cmd_validate(const ValidateOpts& o, std::ostream& out) {
    const SchemaCatalog catalog = load_catalog(o.schemas);
    if (o.sql.empty() == o.sql_file.empty()) throw Error(ErrorKind::config, "give exactly one of --sql, --sql-file");
    std::string sql = o.sql;
    if (!o.sql_file.empty()) {
        require_file(o.sql_file, "sql file");
        sql = std::string(text::trim(io::read_file(o.sql_file)));
    }
    const ValidationReport r = validate_sql(sql, catalog.at(o.db));
    if (!r.syntax_ok) {
        out << "syntax error: " << r.syntax_error << "\n";
        return kExitOk;
    }
    if (r.aligned) {
        out << "aligned\n";
        return kExitOk;
    }
    out << r.issues.size() << " issue(s)\n";
    for (const auto& i : r.issues) {
        out << "  " << to_string(i.kind) << ": " << i.offending;
        if (i.suggestion) out << " -> " << *i.suggestion;
        if (!i.context.empty()) out << " (" << i.context << ")";
        out << "\n";
    }
    const RepairPlan plan = suggest_repairs(r);
    if (r.repairable()) out << "repaired: " << apply_repairs(sql, plan.substitutions) << "\n";
    out << "directive: " << plan.directive << "\n";
    return kExitOk;
}

// --- evaluate --------------------------------------------------------------

struct EvaluateOpts {
    std::string records;
    std::string golds;
    std::string fixtures;
    std::string schemas;
    std::string json_out;
    std::string csv_out;
    std::string table_out;
    bool self_check = false;
    bool ignore_literals = false;
};

int cmd_evaluate(const EvaluateOpts& o, std::ostream& out) {
    require_file(o.golds, "gold file");
    require_file(o.fixtures, "fixtures dir");
    const auto golds = load_golds(io::read_file(o.golds));
    std::vector<RunRecord> records;
    if (o.self_check) {
        for (const auto& g : golds) {
            RunRecord r;
            r.id = g.id;
            r.db_id = g.db_id;
            r.final_sql = g.query;
            r.status = RunStatus::accepted;
            records.push_back(std::move(r));
        }
    } else {
        if (o.records.empty()) throw Error(ErrorKind::config, "--records is required unless --self-check");
        require_file(o.records, "records file");
        records = parse_run_records(io::read_file(o.records));
    }
    std::optional<SchemaCatalog> catalog;
    if (!o.schemas.empty()) catalog = load_catalog(o.schemas);

    EvalOptions opts;
    opts.em.ignore_literals = o.ignore_literals;
    opts.catalog = catalog ? &*catalog : nullptr;
    const EvalReport report = evaluate_run(records, golds, o.fixtures, opts);

    if (!o.json_out.empty()) io::write_file(o.json_out, emit_report(report, ReportFormat::json));
    if (!o.csv_out.empty()) io::write_file(o.csv_out, emit_report(report, ReportFormat::csv));
    if (!o.table_out.empty()) io::write_file(o.table_out, emit_report(report, ReportFormat::table));
    out << emit_report(report, ReportFormat::table);
    return kExitOk;
}

// --- cost ------------------------------------------------------------------

struct CostOpts {
    std::uint64_t E = 0, k = 0, Le = 0, Lq = 0, t = 1, Lsql = 0;
    std::optional<std::uint64_t> layers, hidden;
};

int cmd_cost(const CostOpts& o, std::ostream& out) {
    CostModel m;
    m.example_set_size = o.E;
    m.k = o.k;
    m.example_tokens = o.Le;
    m.question_tokens = o.Lq;
    m.max_attempts = o.t;
    m.output_tokens = o.Lsql;
    m.layers = o.layers;
    m.hidden_dim = o.hidden;
    const CostReport r = estimate_cost(m);
    out << "L=" << r.prompt_tokens << "\n";
    out << "ops/layer=" << r.per_layer_token_pair_ops << " (~" << approx_millions(r.per_layer_token_pair_ops) << ")\n";
    out << "ops over t attempts=" << r.total_ops_over_attempts << "\n";
    out << "validation ops=" << r.validation_ops << "\n";
    out << "selection ops=" << r.selection_ops << " " << r.selection_cost_class << "\n";
    if (r.full_attention_ops) out << "full attention ops=" << *r.full_attention_ops << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"text-to-SQL prompting, refinement and evaluation toolkit", "t2s"};
    app.require_subcommand(1);

    PrepareOpts prep;
    auto* p = app.add_subcommand("prepare", "normalize a dataset into a JSONL corpus");
    p->add_option("--input", prep.input, "dataset file or directory")->required();
    p->add_option("--tables", prep.tables, "tables.json or native schema dir")->required();
    p->add_option("--out", prep.out, "corpus JSONL")->required();
    p->add_option("--heldout-out", prep.heldout_out, "second file when splitting");
    p->add_option("--schemas-out", prep.schemas_out, "directory for native schema documents");
    p->add_option("--split", prep.split, "train fraction in (0, 1)");
    p->add_option("--seed", prep.seed)->capture_default_str();
    p->add_flag("--strict", prep.strict, "fail on malformed records");

    RenderOpts ren;
    auto* r = app.add_subcommand("render", "render one prompt");
    r->add_option("--schemas", ren.schemas)->required();
    r->add_option("--corpus", ren.corpus, "example pool");
    r->add_option("--db", ren.db)->required();
    r->add_option("--question", ren.question)->required();
    r->add_option("--note", ren.notes, "extra line under the question");
    r->add_option("--out", ren.out);
    ren.prompt.add(*r);

    GenerateOpts gen;
    auto* g = app.add_subcommand("generate", "run the refinement loop over targets");
    g->add_option("--schemas", gen.schemas)->required();
    g->add_option("--corpus", gen.corpus, "example pool");
    g->add_option("--targets", gen.targets)->required();
    g->add_option("--backend", gen.backend, "mock or http")->capture_default_str();
    g->add_option("--script", gen.script, "mock script JSON");
    g->add_option("--url", gen.url, "overrides T2S_BACKEND_URL");
    g->add_option("--model", gen.model);
    g->add_option("--out", gen.out, "run records JSONL (stdout when absent)");
    g->add_option("--threshold", gen.threshold)->capture_default_str();
    g->add_option("--max-attempts", gen.max_attempts)->capture_default_str();
    g->add_option("--temperature", gen.temperature)->capture_default_str();
    g->add_option("--temperature-bump", gen.temperature_bump)->capture_default_str();
    g->add_option("--max-output-tokens", gen.max_output_tokens)->capture_default_str();
    g->add_option("--stop", gen.stop, "stop sequence (repeatable)");
    g->add_option("--parallelism", gen.parallelism)->capture_default_str();
    g->add_flag("--verbose-prompts", gen.verbose_prompts, "store full prompt text");
    gen.prompt.add(*g);

    ValidateOpts val;
    auto* v = app.add_subcommand("validate", "check a query against a schema");
    v->add_option("--schemas", val.schemas)->required();
    v->add_option("--db", val.db)->required();
    v->add_option("--sql", val.sql);
    v->add_option("--sql-file", val.sql_file);

    EvaluateOpts ev;
    auto* e = app.add_subcommand("evaluate", "score run records against gold queries");
    e->add_option("--records", ev.records);
    e->add_option("--golds", ev.golds)->required();
    e->add_option("--fixtures", ev.fixtures)->required();
    e->add_option("--schemas", ev.schemas, "enables schema-aware column binding");
    e->add_option("--json", ev.json_out);
    e->add_option("--csv", ev.csv_out);
    e->add_option("--table", ev.table_out);
    e->add_flag("--self-check", ev.self_check, "score the golds against themselves");
    e->add_flag("--ignore-literals", ev.ignore_literals);

    CostOpts co;
    auto* c = app.add_subcommand("cost", "prompt-length and attention cost estimate");
    c->add_option("--E", co.E, "example set size")->required();
    c->add_option("--k", co.k)->required();
    c->add_option("--Le", co.Le, "tokens per example")->required();
    c->add_option("--Lq", co.Lq, "question tokens")->required();
    c->add_option("--t", co.t, "attempts")->capture_default_str();
    c->add_option("--Lsql", co.Lsql, "expected SQL tokens");
    c->add_option("--layers", co.layers);
    c->add_option("--hidden", co.hidden);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(std::move(rev));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& pe) {
        // subcommand help requests surface as CallForHelp too; anything else is usage
        err << "error: " << pe.what() << "\n" << "run 't2s --help' for usage\n";
        return kExitUsage;
    }

    try {
        if (p->parsed()) return cmd_prepare(prep, out, err);
        if (r->parsed()) return cmd_render(ren, out);
        if (g->parsed()) return cmd_generate(gen, out, err);
        if (v->parsed()) return cmd_validate(val, out);
        if (e->parsed()) return cmd_evaluate(ev, out);
        if (c->parsed()) return cmd_cost(co, out);
    } catch (const Error& ex) {
        err << "error [" << to_string(ex.kind()) << "]: " << ex.what() << "\n";
        return exit_code_for(ex.kind());
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace t2s
