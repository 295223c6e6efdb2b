// SPDX-License-Identifier: Apache-2.0
#include "occsim/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

#include "occsim/error.hpp"

namespace occsim {

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.emplace_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::vector<std::string> read_csv_header(std::istream& in) {
    std::string raw;
    while (std::getline(in, raw)) {
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        return split_csv_line(line);
    }
    return {};
}

NumericCsv read_numeric_csv(std::istream& in, const std::string& source) {
    NumericCsv csv;
    std::string raw;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            const std::string_view body = trim(line.substr(1));
            if (const auto eq = body.find('='); eq != std::string_view::npos) {
                csv.meta.emplace(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
            }
            continue;
        }
        auto fields = split_csv_line(line);
        if (!have_header) {
            csv.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != csv.header.size()) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(csv.header.size()) + " fields, found " +
                                 std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const std::string& f = fields[i];
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
            if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(value)) {
                throw ParseError(source, line_no,
                                 "field '" + csv.header[i] + "' is not a number: '" + f + "'");
            }
            row.push_back(value);
        }
        csv.rows.push_back(std::move(row));
        csv.row_lines.push_back(line_no);
    }
    if (!have_header) {
        throw ParseError(source, 0, "missing CSV header");
    }
    return csv;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) {
        std::ostringstream os;
        os.precision(17);
        os << value;
        return os.str();
    }
    return std::string(buf, ptr);
}

}  // namespace occsim
