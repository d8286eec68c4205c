// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace t2s {

enum class ErrorKind {
    parse,        // malformed input document
    schema,       // schema invariant violated
    data,         // corpus / gold / record content problem
    budget,       // prompt exceeds the input token budget
    transport,    // backend unreachable, connection dropped
    backend,      // backend answered with an error payload
    timeout,      // backend did not answer in time
    script,       // scripted backend misuse
    extraction,   // no SQL found in model output
    fixture,      // database fixture could not be opened
    config,       // bad command line / environment
    io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Transport failures and timeouts may succeed on a later call.
    bool retryable() const noexcept {
        return kind_ == ErrorKind::transport || kind_ == ErrorKind::timeout;
    }

private:
    ErrorKind kind_;
};

}  // namespace t2s
