#include "chemodem/csv.hpp"

#include <stdexcept>

namespace chemodem::csv {

std::vector<std::string> parse_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\r') {
            // tolerate CRLF line endings
        } else {
            cur.push_back(c);
        }
        ++i;
    }
    if (quoted) throw std::runtime_error("csv: unterminated quoted field");
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace chemodem::csv
