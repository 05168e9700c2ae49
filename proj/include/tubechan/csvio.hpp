// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors
#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace tubechan {

// CSV emitter: mandatory header row, one footer comment line carrying the
// config digest and seed, '\n' newlines, floats in shortest round-trip form.
class CsvWriter {
  public:
    CsvWriter(const std::string &path, const std::vector<std::string> &columns);
    ~CsvWriter();

    CsvWriter(const CsvWriter &) = delete;
    CsvWriter &operator=(const CsvWriter &) = delete;

    void row(const std::vector<double> &values);
    void row_mixed(const std::vector<std::string> &values);

    // Writes "# <comment>" and closes the file.
    void finish(const std::string &footer_comment);

  private:
    std::ofstream out_;
    std::size_t column_count_;
    bool finished_ = false;
};

// Standard footer text "config_digest=0x<hex> seed=<seed>".
std::string output_footer(std::uint64_t digest, std::uint64_t seed);

} // namespace tubechan
