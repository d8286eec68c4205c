// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "t2s/backend.hpp"
#include "t2s/corpus.hpp"
#include "t2s/prompt.hpp"
#include "t2s/schema.hpp"
#include "t2s/validate.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace t2s {

struct ConfidenceScore {
    double value = 0.0;  // mean token logprob, <= 0
    std::size_t token_count = 0;

    friend bool operator==(const ConfidenceScore&, const ConfidenceScore&) = default;
};

/// Mean of the token logprobs. Throws Error(ErrorKind::data) with
/// "no tokens to score" for empty or absent logprobs.
ConfidenceScore score_confidence(const GenerationOutcome& outcome);

struct RefinementPolicy {
    double threshold = -1.0;
    std::size_t max_attempts = 5;
    std::size_t clarify_from_attempt = 2;
    std::size_t extra_example_from_attempt = 3;
    double base_temperature = 0.0;
    double temperature_bump = 0.0;
    std::size_t max_output_tokens = 256;
    std::vector<std::string> stop_sequences;

    /// Throws Error(ErrorKind::config) when max_attempts is 0 or the
    /// clarification would start after the extra example.
    void check() const;
};

struct AttemptRecord {
    std::size_t number = 0;  // 1-based
    std::string prompt_digest;  // hex SHA-256 of the prompt text
    std::optional<std::string> prompt_text;  // kept only when asked for
    std::size_t prompt_tokens = 0;
    double temperature = 0.0;
    std::string raw_text;
    FinishReason finish = FinishReason::stop;
    std::optional<std::string> extracted_sql;
    std::optional<ValidationReport> validation;
    std::optional<ConfidenceScore> confidence;
    bool accepted = false;
    std::string rejection;  // why the attempt was not accepted
};

enum class RunStatus { accepted, exhausted, transport_error, backend_error, budget_error, failed };

const char* to_string(RunStatus s) noexcept;
RunStatus parse_run_status(std::string_view name);

struct RunRecord {
    std::string id;
    std::string db_id;
    std::vector<AttemptRecord> attempts;
    std::optional<std::string> final_sql;
    RunStatus status = RunStatus::exhausted;
    std::string error;                  // for the error statuses
    std::vector<std::string> warnings;  // e.g. missing logprobs
};

/// A question to answer (no gold SQL needed).
struct RunTarget {
    std::string id;
    std::string instruction;
    std::string db_id;
};

struct SpecTemplate {
    Strategy strategy = Strategy::few_shot;
    std::size_t k = 2;
    Selection selection;
    std::optional<std::string> preamble;
    std::size_t max_input_tokens = 512;
};

struct RunContext {
    const SchemaCatalog* catalog = nullptr;
    std::span<const ExamplePoint> corpus;  // example pool
    SpecTemplate spec;
    RefinementPolicy policy;
    bool keep_prompts = false;
};

/// One target through generate -> extract -> validate -> score, retrying
/// with a clarification directive and then one extra example until an
/// attempt is accepted or the policy runs out. Never throws for backend or
/// budget failures; those end the run with the matching status.
RunRecord run_one(const RunTarget& target, const RunContext& context, Backend& backend);

struct BatchSummary {
    std::size_t total = 0;
    std::size_t accepted = 0;
    std::size_t exhausted = 0;
    std::size_t errored = 0;
    std::map<std::size_t, std::size_t> attempt_histogram;  // attempts -> runs

    friend bool operator==(const BatchSummary&, const BatchSummary&) = default;
};

struct BatchResult {
    std::vector<RunRecord> records;  // in target order
    BatchSummary summary;
};

/// Supplies the backend for target `index`; it must stay valid for the run.
using BackendProvider = std::function<Backend&(std::size_t index)>;

/// Runs every target with up to `parallelism` worker threads. A failure in
/// one run becomes a `failed` record; the batch always completes.
BatchResult run_batch(std::span<const RunTarget> targets, const RunContext& context,
                      const BackendProvider& backends, std::size_t parallelism = 1);

BatchSummary summarize(std::span<const RunRecord> records);

}  // namespace t2s
