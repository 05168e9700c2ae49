// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors
#pragma once

namespace tubechan {

// Command-line entry point (run | stats | compare | sweep). Returns the
// process exit code: 0 success, 1 configuration error, 2 runtime error.
int cli_main(int argc, const char *const *argv);

} // namespace tubechan
