#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chemodem::csv {

// RFC 4180 quoting: wrap in quotes when the field contains comma, quote, CR or
// LF; embedded quotes are doubled.
inline std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline void write_row(std::ostream& os, std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << quote(fields[i]);
    }
    os << '\n';
}

// Parses one logical CSV record that is known to fit on one line (none of our
// files put newlines inside fields).
std::vector<std::string> parse_line(std::string_view line);

inline std::string format_double(double v, int precision = 17) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

}  // namespace chemodem::csv
