#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "seqseed/errors.hpp"

namespace seqseed {

/// Reals in output files: six significant digits via "%.6g". glibc rounds the
/// exact binary value, ties to even, so output does not depend on the build.
inline std::string format_real(double x)
{
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x == 0.0 ? 0.0 : x);
    return buf;
}

/// Splits one line of a plain CSV (no quoting; none of our fields need it).
inline std::vector<std::string> split_csv_line(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

/// Header plus rows of a CSV file; rejects rows whose width differs from the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ParseError("missing CSV column '" + std::string(name) + "'");
    }
};

inline CsvTable read_csv(std::istream& in)
{
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size())
            throw ParseError("CSV line " + std::to_string(line_no) + ": expected " +
                             std::to_string(t.header.size()) + " fields, found " +
                             std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
    }
    if (t.header.empty()) throw ParseError("CSV input is empty");
    return t;
}

}  // namespace seqseed
