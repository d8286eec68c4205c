// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "t2s/io.hpp"
#include "t2s/schema.hpp"

#include <filesystem>
#include <string>

namespace t2s::testing {

inline std::filesystem::path source_path(const std::string& rel) {
    return std::filesystem::path(T2S_SOURCE_DIR) / rel;
}

inline std::string read_source(const std::string& rel) { return io::read_file(source_path(rel)); }

inline const SchemaCatalog& catalog() {
    static const SchemaCatalog c = SchemaCatalog::load(source_path("tests/data/schemas"));
    return c;
}

inline std::filesystem::path fixtures_dir() { return source_path("fixtures"); }

}  // namespace t2s::testing
