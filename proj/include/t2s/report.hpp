// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "t2s/evaluation.hpp"
#include "t2s/pipeline.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace t2s {

/// One JSON object per line, trailing newline after each.
std::string serialize_run_records(std::span<const RunRecord> records);

/// Throws Error(ErrorKind::data) naming the line of a malformed record.
std::vector<RunRecord> parse_run_records(std::string_view jsonl);

enum class ReportFormat { json, csv, table };

ReportFormat parse_report_format(std::string_view name);

/// Deterministic rendering. CSV header: id,em,ts,attempts,detail.
std::string emit_report(const EvalReport& report, ReportFormat format);

/// Inverse of emit_report(report, json).
EvalReport parse_report_json(std::string_view text);

/// "EM 60.7% / TS 64.5%".
std::string headline(const EvalReport& report);

}  // namespace t2s
