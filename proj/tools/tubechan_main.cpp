// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors

#include "tubechan/cli.hpp"

int main(int argc, char **argv) { return tubechan::cli_main(argc, argv); }
