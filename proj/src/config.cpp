#include "chemodem/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>

#include "chemodem/errors.hpp"

namespace chemodem {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool valid_name(const std::string& name, bool allow_dots) {
    if (name.empty()) return false;
    if (name.front() == '.' || name.back() == '.') return false;
    for (char c : name) {
        bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
                  (allow_dots && c == '.');
        if (!ok) return false;
    }
    return true;
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& what) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& origin) {
    std::ostringstream all;
    all << in.rdbuf();
    return parse_string(all.str(), origin);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    cfg.text_ = text;

    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        std::string body = trim(line);
        if (body.empty()) continue;

        if (body.front() == '[') {
            if (body.back() != ']') fail(origin, lineno, "unterminated section header");
            section = trim(body.substr(1, body.size() - 2));
            if (!valid_name(section, true))
                fail(origin, lineno, "invalid section name '" + section + "'");
            continue;
        }

        std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            fail(origin, lineno, "expected 'key = value' or '[section]', got '" + body + "'");
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (!valid_name(key, false)) fail(origin, lineno, "invalid key name '" + key + "'");
        if (value.empty()) fail(origin, lineno, "empty value for key '" + key + "'");
        std::string full = section.empty() ? key : section + "." + key;
        if (!cfg.values_.emplace(full, value).second)
            fail(origin, lineno, "duplicate key '" + full + "'");
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse(in, path);
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (auto it = values_.lower_bound(prefix); it != values_.end(); ++it) {
        if (it->first.compare(0, prefix.size(), prefix) != 0) break;
        out.push_back(it->first);
    }
    return out;
}

const std::string& Config::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(origin_ + ": missing required key '" + key + "'");
    used_.insert(key);
    return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
}

double Config::get_double(const std::string& key) const {
    const std::string& v = raw(key);
    std::size_t pos = 0;
    double out = 0.0;
    bool ok = true;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        ok = false;
    }
    if (!ok || pos != v.size())
        throw ConfigError(origin_ + ": key '" + key + "': expected a number, got '" + v + "'");
    return out;
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
    const std::string& v = raw(key);
    std::size_t pos = 0;
    long long out = 0;
    bool ok = true;
    try {
        out = std::stoll(v, &pos);
    } catch (const std::exception&) {
        ok = false;
    }
    if (!ok || pos != v.size())
        throw ConfigError(origin_ + ": key '" + key + "': expected an integer, got '" + v + "'");
    return out;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key) const {
    std::string v = raw(key);
    for (char& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(origin_ + ": key '" + key + "': expected a boolean, got '" + v + "'");
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    const std::string& v = raw(key);
    std::istringstream in(v);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
        std::size_t pos = 0;
        bool ok = true;
        double x = 0.0;
        try {
            x = std::stod(token, &pos);
        } catch (const std::exception&) {
            ok = false;
        }
        if (!ok || pos != token.size())
            throw ConfigError(origin_ + ": key '" + key + "': expected numbers, got '" + v + "'");
        out.push_back(x);
    }
    return out;
}

std::vector<double> Config::get_doubles(const std::string& key,
                                        const std::vector<double>& fallback) const {
    return has(key) ? get_doubles(key) : fallback;
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : values_)
        if (!used_.count(key)) out.push_back(key);
    return out;
}

}  // namespace chemodem
