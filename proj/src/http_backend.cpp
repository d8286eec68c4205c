// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "t2s/backend.hpp"

#include <cstdlib>

namespace t2s {

using nlohmann::json;

HttpBackendConfig http_config_from_env(const std::optional<std::string>& flag_url) {
    HttpBackendConfig cfg;
    if (flag_url && !flag_url->empty()) {
        cfg.base_url = *flag_url;
    } else if (const char* env = std::getenv("T2S_BACKEND_URL"); env && *env) {
        cfg.base_url = env;
    } else {
        throw Error(ErrorKind::config, "no backend URL: pass --url or set T2S_BACKEND_URL");
    }
    if (const char* key = std::getenv("T2S_BACKEND_KEY"); key && *key) cfg.api_key = key;
    return cfg;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    const std::string& url = config_.base_url;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw Error(ErrorKind::config, "backend URL '" + url + "' has no scheme");
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw Error(ErrorKind::config, "backend URL scheme must be http or https, got '" + scheme + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    origin_ = url.substr(0, path_start);
    if (origin_.size() <= scheme_end + 3) throw Error(ErrorKind::config, "backend URL '" + url + "' has no host");
    if (path_start != std::string::npos) prefix_ = url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

GenerationOutcome parse_completion_response(std::string_view body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::backend, std::string("completion response is not JSON: ") + e.what());
    }
    if (doc.contains("error")) {
        const json& err = doc["error"];
        std::string msg = err.is_object() ? err.value("message", err.dump()) : err.dump();
        throw Error(ErrorKind::backend, "backend error: " + msg);
    }
    if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty())
        throw Error(ErrorKind::backend, "completion response has no choices");
    const json& choice = doc["choices"][0];
    if (!choice.contains("text") || !choice["text"].is_string())
        throw Error(ErrorKind::backend, "completion response lacks choices[0].text");

    GenerationOutcome out;
    out.raw_text = choice["text"].get<std::string>();
    const json fr = choice.value("finish_reason", json());
    out.finish = fr.is_string() && fr.get<std::string>() == "length" ? FinishReason::length : FinishReason::stop;

    if (choice.contains("logprobs") && choice["logprobs"].is_object()) {
        const json& lp = choice["logprobs"];
        if (lp.contains("token_logprobs") && lp["token_logprobs"].is_array()) {
            const json& values = lp["token_logprobs"];
            const json pieces = lp.value("tokens", json::array());
            const bool use_pieces = pieces.is_array() && pieces.size() == values.size();
            std::vector<TokenLogprob> toks;
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (values[i].is_null()) continue;  // some servers send null for a leading token
                double v = values[i].get<double>();
                if (v > 0.0 && v < 1e-6) v = 0.0;  // float noise around certainty
                toks.push_back({use_pieces ? pieces[i].get<std::string>() : std::string(), v});
            }
            out.tokens = std::move(toks);
        }
    }
    check_outcome(out);
    return out;
}

GenerationOutcome HttpBackend::generate(const GenerationRequest& request) {
    request.check();
    json body = {{"prompt", request.prompt},
                 {"max_tokens", request.max_output_tokens},
                 {"temperature", request.temperature},
                 {"stop", request.stop_sequences},
                 {"logprobs", true}};
    if (!config_.model.empty()) body["model"] = config_.model;

    httplib::Client client(origin_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usec.count());
    client.set_read_timeout(secs.count(), usec.count());
    client.set_write_timeout(secs.count(), usec.count());
    httplib::Headers headers;
    if (config_.api_key) headers.emplace("Authorization", "Bearer " + *config_.api_key);

    auto res = client.Post(prefix_ + "/v1/completions", headers, body.dump(), "application/json");
    if (!res) {
        const auto err = res.error();
        const std::string what = "backend request to " + origin_ + " failed: " + httplib::to_string(err);
        if (err == httplib::Error::ConnectionTimeout) throw Error(ErrorKind::timeout, what);
        if (err == httplib::Error::Read) throw Error(ErrorKind::timeout, what + " (no reply before the read timeout)");
        throw Error(ErrorKind::transport, what);
    }
    if (res->status == 408 || res->status == 504)
        throw Error(ErrorKind::timeout, "backend timed out with HTTP " + std::to_string(res->status));
    if (res->status >= 500)
        throw Error(ErrorKind::transport, "backend answered HTTP " + std::to_string(res->status));
    if (res->status != 200)
        throw Error(ErrorKind::backend, "backend answered HTTP " + std::to_string(res->status) + ": " + res->body);

    GenerationOutcome out = parse_completion_response(res->body);
    apply_stop_sequences(out, request.stop_sequences);
    return out;
}

}  // namespace t2s
