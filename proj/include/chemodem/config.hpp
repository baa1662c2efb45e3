#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace chemodem {

// Structured key-value configuration. The text format is INI-like:
//
//   # comment (';' also works)
//   top_key = value
//   [section]
//   key = value
//   [section.nested]
//   list = 1 2 3
//
// Keys are addressed by their dotted path ("section.nested.list"). Parsing is
// strict: unknown syntax, duplicate keys and empty values are ConfigErrors.
// Accessors record which keys were read so callers can report typos.
class Config {
  public:
    Config() = default;

    static Config parse(std::istream& in, const std::string& origin = "<config>");
    static Config parse_string(const std::string& text, const std::string& origin = "<config>");
    static Config parse_file(const std::string& path);

    bool has(const std::string& key) const;
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key,
                                    const std::vector<double>& fallback) const;

    // Keys present in the file that no accessor has touched yet.
    std::vector<std::string> unused_keys() const;

    // Verbatim input text, for config.snapshot files.
    const std::string& text() const { return text_; }

  private:
    const std::string& raw(const std::string& key) const;

    std::string origin_ = "<config>";
    std::string text_;
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

}  // namespace chemodem
