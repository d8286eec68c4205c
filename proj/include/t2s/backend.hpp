// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "t2s/error.hpp"

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace t2s {

struct GenerationRequest {
    std::string prompt;
    std::size_t max_output_tokens = 256;
    double temperature = 0.0;
    std::vector<std::string> stop_sequences;

    /// Throws Error(ErrorKind::config) on an empty prompt, zero output
    /// tokens or a negative temperature.
    void check() const;
};

enum class FinishReason { stop, length, error };

const char* to_string(FinishReason f) noexcept;
FinishReason parse_finish_reason(std::string_view name);

struct TokenLogprob {
    std::string piece;  // may be empty when the backend sends no pieces
    double logprob = 0.0;

    friend bool operator==(const TokenLogprob&, const TokenLogprob&) = default;
};

struct GenerationOutcome {
    std::string raw_text;
    /// nullopt means the backend supplied no log-probabilities at all.
    std::optional<std::vector<TokenLogprob>> tokens;
    FinishReason finish = FinishReason::stop;
    std::string error_message;  // set when finish == error

    bool has_logprobs() const noexcept { return tokens.has_value(); }

    friend bool operator==(const GenerationOutcome&, const GenerationOutcome&) = default;
};

/// Checks the outcome invariants: logprobs finite and <= 0, pieces (when all
/// present) concatenate to raw_text, error outcomes carry no tokens.
/// Throws Error(ErrorKind::backend) describing the first violation.
void check_outcome(const GenerationOutcome& outcome);

/// Cuts `outcome` at the earliest stop sequence, trimming token pieces to
/// match. Tokens without pieces are left as they are.
void apply_stop_sequences(GenerationOutcome& outcome, const std::vector<std::string>& stops);

class Backend {
public:
    virtual ~Backend() = default;

    /// Throws Error with kind transport, timeout or backend on failure.
    virtual GenerationOutcome generate(const GenerationRequest& request) = 0;

    /// Tokenizer-exact count when the backend offers one.
    virtual std::optional<std::size_t> count_tokens(std::string_view) const { return std::nullopt; }

    virtual std::string name() const = 0;
};

/// One scripted reply. `raise` replays a failure instead of an outcome.
struct ScriptEntry {
    GenerationOutcome outcome;
    std::optional<ErrorKind> raise;
    std::string raise_message;
};

/// Plays back a fixed list of replies in order. Calls are serialized.
class ScriptedBackend final : public Backend {
public:
    explicit ScriptedBackend(std::vector<ScriptEntry> script);

    GenerationOutcome generate(const GenerationRequest& request) override;
    std::string name() const override { return "mock"; }

    std::size_t calls() const;
    std::size_t remaining() const;
    /// Requests received so far, in call order.
    std::vector<GenerationRequest> requests() const;

private:
    mutable std::mutex mu_;
    std::vector<ScriptEntry> script_;
    std::size_t next_ = 0;
    std::vector<GenerationRequest> seen_;
};

/// Script entries: {"text", "token_logprobs": [..], "tokens": [..]?,
/// "finish"?} or {"raise": "transport"|"timeout"|"backend", "message"?}.
/// Throws Error(ErrorKind::script) on empty or malformed scripts.
std::vector<ScriptEntry> parse_script_entries(std::string_view json_array);

/// A script document is either one array shared by every target, or an
/// object mapping target id to its own array.
struct MockScript {
    std::optional<std::vector<ScriptEntry>> shared;
    std::map<std::string, std::vector<ScriptEntry>, std::less<>> per_target;
};

MockScript parse_mock_script(std::string_view json_text);

/// Backend over a JSON array script.
std::unique_ptr<ScriptedBackend> mock_from_script(std::string_view json_array);

struct HttpBackendConfig {
    std::string base_url;              // scheme://host[:port][/prefix]
    std::optional<std::string> api_key;
    std::string model;                 // sent when non-empty
    std::chrono::milliseconds timeout{60000};
};

/// Fills the URL from `flag_url` or T2S_BACKEND_URL and the key from
/// T2S_BACKEND_KEY. Throws Error(ErrorKind::config) when no URL is set.
HttpBackendConfig http_config_from_env(const std::optional<std::string>& flag_url);

/// Completions-style HTTP client:
///   POST {base}/v1/completions {"prompt","max_tokens","temperature","stop","logprobs":true}
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    GenerationOutcome generate(const GenerationRequest& request) override;
    std::string name() const override { return "http"; }

    const HttpBackendConfig& config() const noexcept { return config_; }

private:
    HttpBackendConfig config_;
    std::string origin_;  // scheme://host:port
    std::string prefix_;  // path prefix without trailing slash
};

/// Decodes a completions response body. Exposed for tests.
GenerationOutcome parse_completion_response(std::string_view body);

}  // namespace t2s
