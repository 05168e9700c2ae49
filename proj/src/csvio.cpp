// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 tubechan contributors

#include "tubechan/csvio.hpp"

#include <stdexcept>

#include "tubechan/scenario.hpp"

namespace tubechan {

CsvWriter::CsvWriter(const std::string &path, const std::vector<std::string> &columns)
    : out_(path, std::ios::binary), column_count_(columns.size())
{
    if (!out_)
        throw std::runtime_error("cannot open output file: " + path);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i)
            out_ << ',';
        out_ << columns[i];
    }
    out_ << '\n';
}

CsvWriter::~CsvWriter()
{
    if (!finished_ && out_.is_open())
        out_.close();
}

void CsvWriter::row(const std::vector<double> &values)
{
    if (values.size() != column_count_)
        throw std::logic_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out_ << ',';
        out_ << format_double(values[i]);
    }
    out_ << '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string> &values)
{
    if (values.size() != column_count_)
        throw std::logic_error("CsvWriter: column count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out_ << ',';
        out_ << values[i];
    }
    out_ << '\n';
}

void CsvWriter::finish(const std::string &footer_comment)
{
    out_ << "# " << footer_comment << '\n';
    out_.close();
    finished_ = true;
}

std::string output_footer(std::uint64_t digest, std::uint64_t seed)
{
    char hex[17];
    static const char digits[] = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        hex[15 - i] = digits[(digest >> (4 * i)) & 0xF];
    }
    hex[16] = '\0';
    return "config_digest=0x" + std::string(hex) + " seed=" + std::to_string(seed);
}

} // namespace tubechan
