// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/backend.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace t2s {

using nlohmann::json;

void GenerationRequest::check() const {
    if (prompt.empty()) throw Error(ErrorKind::config, "generation request has an empty prompt");
    if (max_output_tokens == 0) throw Error(ErrorKind::config, "max_output_tokens must be at least 1");
    if (!(temperature >= 0.0)) throw Error(ErrorKind::config, "temperature must be >= 0");
}

const char* to_string(FinishReason f) noexcept {
    switch (f) {
        case FinishReason::stop: return "stop";
        case FinishReason::length: return "length";
        case FinishReason::error: return "error";
    }
    return "stop";
}

FinishReason parse_finish_reason(std::string_view name) {
    if (name == "stop" || name == "eos" || name.empty()) return FinishReason::stop;
    if (name == "length") return FinishReason::length;
    if (name == "error") return FinishReason::error;
    throw Error(ErrorKind::backend, "unknown finish reason '" + std::string(name) + "'");
}

void check_outcome(const GenerationOutcome& o) {
    if (o.finish == FinishReason::error) {
        if (o.tokens && !o.tokens->empty())
            throw Error(ErrorKind::backend, "error outcome carries tokens");
        return;
    }
    if (!o.tokens) return;
    bool all_pieces = !o.tokens->empty();
    std::string joined;
    for (std::size_t i = 0; i < o.tokens->size(); ++i) {
        const auto& t = (*o.tokens)[i];
        if (!std::isfinite(t.logprob) || t.logprob > 0.0)
            throw Error(ErrorKind::backend, "token " + std::to_string(i) + " has logprob " +
                                                std::to_string(t.logprob) + " (must be finite and <= 0)");
        if (t.piece.empty()) all_pieces = false;
        joined += t.piece;
    }
    if (all_pieces && joined != o.raw_text)
        throw Error(ErrorKind::backend, "token pieces do not concatenate to the completion text");
}

void apply_stop_sequences(GenerationOutcome& o, const std::vector<std::string>& stops) {
    std::size_t cut = std::string::npos;
    for (const auto& s : stops) {
        if (s.empty()) continue;
        cut = std::min(cut, o.raw_text.find(s));
    }
    if (cut == std::string::npos) return;
    o.raw_text.resize(cut);
    o.finish = FinishReason::stop;
    if (!o.tokens) return;
    const bool pieces = std::all_of(o.tokens->begin(), o.tokens->end(),
                                    [](const TokenLogprob& t) { return !t.piece.empty(); });
    if (!pieces) return;
    std::size_t pos = 0;
    std::vector<TokenLogprob> kept;
    for (auto& t : *o.tokens) {
        if (pos >= cut) break;
        if (pos + t.piece.size() > cut) t.piece.resize(cut - pos);
        pos += t.piece.size();
        kept.push_back(std::move(t));
    }
    o.tokens = std::move(kept);
}

// --- scripted playback ------------------------------------------------------

ScriptedBackend::ScriptedBackend(std::vector<ScriptEntry> script) : script_(std::move(script)) {
    if (script_.empty()) throw Error(ErrorKind::script, "empty script");
}

GenerationOutcome ScriptedBackend::generate(const GenerationRequest& request) {
    request.check();
    std::lock_guard lock(mu_);
    if (next_ >= script_.size())
        throw Error(ErrorKind::script, "script exhausted after " + std::to_string(script_.size()) + " calls");
    seen_.push_back(request);
    const ScriptEntry& e = script_[next_++];
    if (e.raise) throw Error(*e.raise, e.raise_message.empty() ? "scripted failure" : e.raise_message);
    GenerationOutcome out = e.outcome;
    apply_stop_sequences(out, request.stop_sequences);
    return out;
}

std::size_t ScriptedBackend::calls() const {
    std::lock_guard lock(mu_);
    return next_;
}

std::size_t ScriptedBackend::remaining() const {
    std::lock_guard lock(mu_);
    return script_.size() - next_;
}

std::vector<GenerationRequest> ScriptedBackend::requests() const {
    std::lock_guard lock(mu_);
    return seen_;
}

namespace {

ScriptEntry entry_from_json(const json& j, std::size_t index) {
    const std::string where = "script entry " + std::to_string(index);
    if (!j.is_object()) throw Error(ErrorKind::script, where + ": expected an object");
    ScriptEntry e;
    if (j.contains("raise")) {
        const std::string kind = j.at("raise").get<std::string>();
        if (kind == "transport") e.raise = ErrorKind::transport;
        else if (kind == "timeout") e.raise = ErrorKind::timeout;
        else if (kind == "backend") e.raise = ErrorKind::backend;
        else throw Error(ErrorKind::script, where + ": unknown raise kind '" + kind + "'");
        e.raise_message = j.value("message", std::string());
        return e;
    }
    if (!j.contains("text") || !j["text"].is_string())
        throw Error(ErrorKind::script, where + ": missing string field 'text'");
    e.outcome.raw_text = j["text"].get<std::string>();
    e.outcome.finish = parse_finish_reason(j.value("finish", std::string("stop")));
    if (j.contains("token_logprobs") && !j["token_logprobs"].is_null()) {
        const json& lp = j["token_logprobs"];
        if (!lp.is_array()) throw Error(ErrorKind::script, where + ": 'token_logprobs' must be an array");
        std::vector<TokenLogprob> toks;
        for (std::size_t i = 0; i < lp.size(); ++i) {
            if (!lp[i].is_number())
                throw Error(ErrorKind::script, where + ": logprob " + std::to_string(i) + " is not a number");
            const double v = lp[i].get<double>();
            if (!std::isfinite(v) || v > 0.0)
                throw Error(ErrorKind::script, where + ": logprob " + std::to_string(i) + " is " +
                                                   std::to_string(v) + ", must be <= 0");
            toks.push_back({std::string(), v});
        }
        if (j.contains("tokens")) {
            const json& pieces = j["tokens"];
            if (!pieces.is_array() || pieces.size() != toks.size())
                throw Error(ErrorKind::script, where + ": 'tokens' must match 'token_logprobs' in length");
            for (std::size_t i = 0; i < toks.size(); ++i) toks[i].piece = pieces[i].get<std::string>();
        }
        e.outcome.tokens = std::move(toks);
    }
    if (e.outcome.finish == FinishReason::error) {
        e.outcome.error_message = j.value("message", std::string("backend error"));
        e.outcome.tokens = std::vector<TokenLogprob>{};
        if (j.contains("token_logprobs") && j["token_logprobs"].is_array() && !j["token_logprobs"].empty())
            throw Error(ErrorKind::script, where + ": error entries carry no tokens");
    }
    try {
        check_outcome(e.outcome);
    } catch (const Error& err) {
        throw Error(ErrorKind::script, where + ": " + err.what());
    }
    return e;
}

std::vector<ScriptEntry> entries_from_json(const json& arr, const std::string& label) {
    if (!arr.is_array()) throw Error(ErrorKind::script, label + ": expected an array of responses");
    if (arr.empty()) throw Error(ErrorKind::script, label + ": empty script");
    std::vector<ScriptEntry> out;
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(entry_from_json(arr[i], i));
    return out;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::script, std::string("script is not valid JSON: ") + e.what());
    }
}

}  // namespace

std::vector<ScriptEntry> parse_script_entries(std::string_view json_array) {
    return entries_from_json(parse_json(json_array), "script");
}

MockScript parse_mock_script(std::string_view json_text) {
    const json doc = parse_json(json_text);
    MockScript out;
    if (doc.is_array()) {
        out.shared = entries_from_json(doc, "script");
    } else if (doc.is_object()) {
        if (doc.empty()) throw Error(ErrorKind::script, "empty script");
        for (const auto& [id, arr] : doc.items()) out.per_target.emplace(id, entries_from_json(arr, "script '" + id + "'"));
    } else {
        throw Error(ErrorKind::script, "script must be an array or an object of arrays");
    }
    return out;
}

std::unique_ptr<ScriptedBackend> mock_from_script(std::string_view json_array) {
    return std::make_unique<ScriptedBackend>(parse_script_entries(json_array));
}

}  // namespace t2s
