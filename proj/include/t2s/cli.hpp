// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace t2s {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitTransport = 3 };

/// Entry point of the `t2s` tool. `args` excludes the program name. Output
/// goes to `out`, diagnostics to `err`; the return value is the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace t2s
