// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "t2s/error.hpp"

#include <cstddef>
#include <string>
#include <string_view>

namespace t2s {

struct ExtractionResult {
    std::string sql;
    // Lengths are measured on the backslash-free text.
    std::size_t discarded_prefix_len = 0;
    std::size_t discarded_suffix_len = 0;
    std::size_t backslashes_removed = 0;
};

class ExtractionError : public Error {
public:
    ExtractionError(const std::string& what, std::string raw)
        : Error(ErrorKind::extraction, what), raw_(std::move(raw)) {}

    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

/// Removes every backslash. The escape pairs \n, \t and \r turn into the
/// whitespace they stand for; any other backslash is simply dropped.
std::string remove_backslashes(std::string_view raw, std::size_t* removed = nullptr);

/// Isolates the SQL answer in raw model output:
///   1. backslashes go (see remove_backslashes);
///   2. everything up to the last "# Response:" (or line-start "SQL:") marker
///      is prompt echo;
///   3. the last complete statement wins; a statement runs to its first
///      top-level-quote-free ';', else to a blank line, fence, label line or
///      the end;
///   4. whitespace runs that contain a newline collapse to one space.
/// Throws ExtractionError (carrying the raw text) when no statement is found.
ExtractionResult extract_sql(std::string_view raw);

}  // namespace t2s
