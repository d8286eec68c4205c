// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace t2s::io {

/// Whole-file read; throws Error(ErrorKind::io) when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Creates parent directories as needed.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace t2s::io
