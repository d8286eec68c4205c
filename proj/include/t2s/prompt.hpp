// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "t2s/corpus.hpp"
#include "t2s/error.hpp"
#include "t2s/schema.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace t2s {

enum class Strategy {
    zero_shot,
    few_shot,
    structured_few_shot,
    schema_aware_few_shot,
    instruction_focused_few_shot,
};

const char* to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view name);

/// The developer-persona rules prefixed by the structured strategies. Same
/// bytes as assets/preamble.txt.
std::string_view default_preamble() noexcept;

struct PromptExample {
    ExamplePoint point;
    std::shared_ptr<const DatabaseSchema> schema;
};

struct PromptTarget {
    std::string instruction;
    std::shared_ptr<const DatabaseSchema> schema;
};

struct PromptSpec {
    Strategy strategy = Strategy::few_shot;
    std::vector<PromptExample> examples;
    PromptTarget target;
    /// Replaces default_preamble() for strategies that attach one.
    std::optional<std::string> preamble;
    std::size_t max_input_tokens = 512;
    /// Extra lines placed under the target instruction (refinement directives).
    std::vector<std::string> target_notes;

    std::size_t k() const noexcept { return examples.size(); }
};

struct RenderedPrompt {
    std::string text;
    std::size_t token_estimate = 0;
    PromptSpec spec;
};

/// Raised instead of truncating when a prompt does not fit.
class BudgetError : public Error {
public:
    BudgetError(std::size_t estimate, std::size_t limit);
    std::size_t estimate() const noexcept { return estimate_; }
    std::size_t limit() const noexcept { return limit_; }
    std::size_t overflow() const noexcept { return estimate_ - limit_; }

private:
    std::size_t estimate_;
    std::size_t limit_;
};

using TokenEstimator = std::function<std::size_t(std::string_view)>;

/// Whitespace-delimited word count.
std::size_t estimate_tokens(std::string_view text) noexcept;

/// `Employees(id, name, department, salary)`, tables separated by ", ".
std::string schema_signature(const DatabaseSchema& schema);

/// Comparator and aggregate phrases copied verbatim from `instruction`,
/// e.g. "more than 50k" or "total".
std::vector<std::string> constraint_phrases(std::string_view instruction);

/// Renders `spec`. Throws Error(ErrorKind::config) when the spec breaks its
/// own invariants (zero_shot with examples, missing schemas) and BudgetError
/// when the estimate exceeds max_input_tokens. A backend-supplied estimator
/// replaces the whitespace count when given.
RenderedPrompt render(const PromptSpec& spec, const TokenEstimator& estimator = {});

enum class SelectionMode { first_k, seeded_random, token_overlap };

SelectionMode parse_selection_mode(std::string_view name);

struct Selection {
    SelectionMode mode = SelectionMode::first_k;
    std::uint64_t seed = 0;
};

/// Lower-cased whitespace tokens with surrounding punctuation trimmed.
std::vector<std::string> overlap_tokens(std::string_view text);

/// Jaccard similarity of the overlap_tokens sets; 0 when both are empty.
double token_jaccard(std::string_view a, std::string_view b);

/// Throws Error(ErrorKind::config) if k exceeds the corpus size.
std::vector<ExamplePoint> select_examples(std::span<const ExamplePoint> corpus,
                                          std::string_view target_instruction, std::size_t k,
                                          Selection selection);

struct CostModel {
    std::uint64_t example_set_size = 0;     // E
    std::uint64_t k = 0;                    // selected examples
    std::uint64_t example_tokens = 0;       // mean tokens per example
    std::uint64_t question_tokens = 0;      // target question tokens
    std::uint64_t max_attempts = 1;         // t
    std::uint64_t output_tokens = 0;        // expected SQL length
    std::optional<std::uint64_t> layers;
    std::optional<std::uint64_t> hidden_dim;
    std::optional<std::uint64_t> parameters;
};

struct CostReport {
    std::uint64_t prompt_tokens = 0;              // k * example_tokens + question_tokens
    std::uint64_t per_layer_token_pair_ops = 0;   // prompt_tokens^2
    std::uint64_t total_ops_over_attempts = 0;    // t * prompt_tokens^2
    std::uint64_t validation_ops = 0;             // t * output_tokens
    std::uint64_t selection_ops = 0;              // E (one scan)
    std::string selection_cost_class = "O(E)";
    /// H * d * L^2 * t, when both layers and hidden_dim are known.
    std::optional<std::uint64_t> full_attention_ops;
};

/// Throws Error(ErrorKind::config) when max_attempts is 0.
CostReport estimate_cost(const CostModel& model);

/// "2.3 million" style rendering used by the CLI.
std::string approx_millions(std::uint64_t value);

}  // namespace t2s
