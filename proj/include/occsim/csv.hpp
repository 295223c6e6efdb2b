// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace occsim {

/// Numeric CSV: one header line, then rows of numbers. Blank lines are
/// skipped; lines starting with '#' are comments, and comments of the form
/// `# key=value` are collected into `meta`.
struct NumericCsv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> row_lines;  ///< 1-based source line of each row
    std::map<std::string, std::string> meta;
};

/// Throws ParseError (with the offending line) on a short row or a field that
/// is not a finite number.
NumericCsv read_numeric_csv(std::istream& in, const std::string& source);

/// Fields of the first non-blank, non-comment line; empty if there is none.
std::vector<std::string> read_csv_header(std::istream& in);

/// Comma-separated fields with surrounding whitespace trimmed.
std::vector<std::string> split_csv_line(std::string_view line);

/// Shortest decimal text that reads back to exactly `value`.
std::string format_double(double value);

std::string_view trim(std::string_view text);

}  // namespace occsim
