// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/pipeline.hpp"

#include "t2s/extract.hpp"
#include "t2s/io.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

namespace t2s {

ConfidenceScore score_confidence(const GenerationOutcome& outcome) {
    if (!outcome.tokens || outcome.tokens->empty()) throw Error(ErrorKind::data, "no tokens to score");
    // extended accumulator, one rounding at the end: [-0.1,-0.3,-0.2] gives -0.2, not -0.20000000000000004
    long double sum = 0.0L;
    for (const auto& t : *outcome.tokens) sum += t.logprob;
    const std::size_t n = outcome.tokens->size();
    return {static_cast<double>(sum / static_cast<long double>(n)), n};
}

void RefinementPolicy::check() const {
    if (max_attempts == 0) throw Error(ErrorKind::config, "max_attempts must be at least 1");
    if (clarify_from_attempt > extra_example_from_attempt)
        throw Error(ErrorKind::config, "clarify_from_attempt must not exceed extra_example_from_attempt");
    if (!(base_temperature >= 0.0) || !(temperature_bump >= 0.0))
        throw Error(ErrorKind::config, "temperatures must be >= 0");
    if (max_output_tokens == 0) throw Error(ErrorKind::config, "max_output_tokens must be at least 1");
}

const char* to_string(RunStatus s) noexcept {
    switch (s) {
        case RunStatus::accepted: return "accepted";
        case RunStatus::exhausted: return "exhausted";
        case RunStatus::transport_error: return "transport_error";
        case RunStatus::backend_error: return "backend_error";
        case RunStatus::budget_error: return "budget_error";
        case RunStatus::failed: return "failed";
    }
    return "failed";
}

RunStatus parse_run_status(std::string_view name) {
    for (RunStatus s : {RunStatus::accepted, RunStatus::exhausted, RunStatus::transport_error,
                        RunStatus::backend_error, RunStatus::budget_error, RunStatus::failed})
        if (name == to_string(s)) return s;
    throw Error(ErrorKind::data, "unknown run status '" + std::string(name) + "'");
}

namespace {

PromptExample with_schema(const ExamplePoint& p, const SchemaCatalog& catalog) {
    auto schema = catalog.find(p.schema_id);
    if (!schema) throw Error(ErrorKind::data, "example '" + p.id + "' references unknown database '" + p.schema_id + "'");
    return {p, std::move(schema)};
}

/// The best token-overlap example not already in use whose gold query is
/// aligned with its own schema.
std::optional<PromptExample> extra_example(const RunTarget& target, const RunContext& ctx,
                                           const std::vector<ExamplePoint>& used) {
    std::vector<std::size_t> order(ctx.corpus.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> score(ctx.corpus.size());
    for (std::size_t i = 0; i < ctx.corpus.size(); ++i)
        score[i] = token_jaccard(target.instruction, ctx.corpus[i].instruction);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    for (std::size_t i : order) {
        const ExamplePoint& p = ctx.corpus[i];
        if (!target.id.empty() && p.id == target.id) continue;
        if (std::find(used.begin(), used.end(), p) != used.end()) continue;
        auto schema = ctx.catalog->find(p.schema_id);
        if (!schema) continue;
        if (!validate_sql(p.gold_sql, *schema).aligned) continue;
        return PromptExample{p, std::move(schema)};
    }
    return std::nullopt;
}

}  // namespace

RunRecord run_one(const RunTarget& target, const RunContext& ctx, Backend& backend) {
    RunRecord rec;
    rec.id = target.id;
    rec.db_id = target.db_id;
    try {
        if (!ctx.catalog) throw Error(ErrorKind::config, "run context has no schema catalog");
        ctx.policy.check();
        auto schema = ctx.catalog->find(target.db_id);
        if (!schema) throw Error(ErrorKind::data, "target '" + target.id + "' references unknown database '" + target.db_id + "'");

        std::vector<ExamplePoint> pool;
        for (const auto& p : ctx.corpus)
            if (target.id.empty() || p.id != target.id) pool.push_back(p);
        const bool zero = ctx.spec.strategy == Strategy::zero_shot;
        std::vector<ExamplePoint> chosen =
            zero ? std::vector<ExamplePoint>{} : select_examples(pool, target.instruction, ctx.spec.k, ctx.spec.selection);

        PromptSpec base;
        base.strategy = ctx.spec.strategy;
        base.preamble = ctx.spec.preamble;
        base.max_input_tokens = ctx.spec.max_input_tokens;
        base.target = {target.instruction, schema};
        for (const auto& p : chosen) base.examples.push_back(with_schema(p, *ctx.catalog));

        const TokenEstimator estimator = [&backend](std::string_view text) {
            if (auto n = backend.count_tokens(text)) return *n;
            return estimate_tokens(text);
        };

        std::optional<ValidationReport> last_report;
        std::optional<PromptExample> extra;
        bool extra_resolved = false;
        bool warned = false;

        for (std::size_t n = 1; n <= ctx.policy.max_attempts; ++n) {
            PromptSpec spec = base;
            if (n >= ctx.policy.clarify_from_attempt && n > 1) {
                ValidationReport r = last_report ? *last_report : ValidationReport{};
                if (r.schema_names.empty()) r.schema_names = schema_names(*schema);
                spec.target_notes.push_back(suggest_repairs(r).directive);
            }
            if (n >= ctx.policy.extra_example_from_attempt && n > 1 && !zero) {
                if (!extra_resolved) {
                    extra = extra_example(target, ctx, chosen);
                    extra_resolved = true;
                }
                if (extra) spec.examples.push_back(*extra);
            }

            RenderedPrompt prompt;
            try {
                prompt = render(spec, estimator);
            } catch (const BudgetError& e) {
                rec.status = RunStatus::budget_error;
                rec.error = "attempt " + std::to_string(n) + ": " + e.what();
                return rec;
            }

            AttemptRecord att;
            att.number = n;
            att.prompt_digest = io::sha256_hex(prompt.text);
            if (ctx.keep_prompts) att.prompt_text = prompt.text;
            att.prompt_tokens = prompt.token_estimate;
            att.temperature = ctx.policy.base_temperature + static_cast<double>(n - 1) * ctx.policy.temperature_bump;

            GenerationRequest req{prompt.text, ctx.policy.max_output_tokens, att.temperature, ctx.policy.stop_sequences};
            GenerationOutcome out;
            try {
                out = backend.generate(req);
            } catch (const Error& e) {
                rec.status = e.retryable() ? RunStatus::transport_error
                             : e.kind() == ErrorKind::backend ? RunStatus::backend_error
                                                              : RunStatus::failed;
                rec.error = "attempt " + std::to_string(n) + ": " + e.what();
                return rec;
            }
            att.raw_text = out.raw_text;
            att.finish = out.finish;

            if (out.finish == FinishReason::error) {
                att.rejection = "backend error: " + out.error_message;
                rec.attempts.push_back(std::move(att));
                continue;
            }
            try {
                att.extracted_sql = extract_sql(out.raw_text).sql;
            } catch (const ExtractionError& e) {
                att.rejection = e.what();
                rec.attempts.push_back(std::move(att));
                continue;
            }
            att.validation = validate_sql(*att.extracted_sql, *schema);
            last_report = att.validation;
            if (out.tokens && !out.tokens->empty()) {
                att.confidence = score_confidence(out);
            } else if (!warned) {
                rec.warnings.push_back("backend returned no logprobs; confidence gate disabled");
                warned = true;
            }

            if (!att.validation->syntax_ok) {
                att.rejection = "syntax: " + att.validation->syntax_error;
            } else if (!att.validation->aligned) {
                att.rejection = "schema alignment: " + std::to_string(att.validation->issues.size()) + " issue(s)";
            } else if (att.confidence && att.confidence->value < ctx.policy.threshold) {
                att.rejection = "confidence below threshold";
            } else {
                att.accepted = true;
                rec.final_sql = att.extracted_sql;
            }
            const bool done = att.accepted;
            rec.attempts.push_back(std::move(att));
            if (done) {
                rec.status = RunStatus::accepted;
                return rec;
            }
        }
        rec.status = RunStatus::exhausted;
    } catch (const Error& e) {
        rec.status = e.kind() == ErrorKind::budget ? RunStatus::budget_error : RunStatus::failed;
        rec.error = e.what();
    } catch (const std::exception& e) {
        rec.status = RunStatus::failed;
        rec.error = e.what();
    }
    return rec;
}

BatchSummary summarize(std::span<const RunRecord> records) {
    BatchSummary s;
    s.total = records.size();
    for (const auto& r : records) {
        if (r.status == RunStatus::accepted) ++s.accepted;
        else if (r.status == RunStatus::exhausted) ++s.exhausted;
        else ++s.errored;
        ++s.attempt_histogram[r.attempts.size()];
    }
    return s;
}

BatchResult run_batch(std::span<const RunTarget> targets, const RunContext& ctx, const BackendProvider& backends,
                      std::size_t parallelism) {
    if (parallelism == 0) throw Error(ErrorKind::config, "parallelism must be at least 1");
    BatchResult result;
    result.records.resize(targets.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < targets.size(); i = next++) {
            try {
                result.records[i] = run_one(targets[i], ctx, backends(i));
            } catch (const std::exception& e) {
                RunRecord r;
                r.id = targets[i].id;
                r.db_id = targets[i].db_id;
                r.status = RunStatus::failed;
                r.error = e.what();
                result.records[i] = std::move(r);
            }
        }
    };
    const std::size_t threads = std::min(parallelism, std::max<std::size_t>(targets.size(), 1));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    result.summary = summarize(result.records);
    return result;
}

}  // namespace t2s
