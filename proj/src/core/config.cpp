#include "wavecorpuscle/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "wavecorpuscle/errors.hpp"
#include "wavecorpuscle/io.hpp"

namespace wc {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_' || c == '.'))
            return false;
    return true;
}

double parse_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v{};
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ConfigError(key, "not a number: '" + s + "'");
    return v;
}

}  // namespace

Config Config::parse_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", "line " + std::to_string(lineno) +
                                            ": expected KEY = VALUE");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (!valid_key(key))
            throw ConfigError("config", "line " + std::to_string(lineno) +
                                            ": bad key '" + key + "'");
        if (cfg.kv_.count(key))
            throw ConfigError(key, "duplicate key");
        cfg.kv_[key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

void Config::set(const std::string& key, const std::string& value) {
    kv_[key] = value;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError(key, "missing required key");
    used_[key] = it->second;
    return it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& dflt) const {
    const auto it = kv_.find(key);
    const std::string v = it == kv_.end() ? dflt : it->second;
    used_[key] = v;
    return v;
}

double Config::get_double(const std::string& key) const {
    return parse_double(key, get_string(key));
}

double Config::get_double(const std::string& key, double dflt) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) {
        used_[key] = format_double(dflt);
        return dflt;
    }
    used_[key] = it->second;
    return parse_double(key, it->second);
}

long Config::get_int(const std::string& key) const {
    const double v = get_double(key);
    const long n = static_cast<long>(v);
    if (static_cast<double>(n) != v) throw ConfigError(key, "not an integer");
    return n;
}

long Config::get_int(const std::string& key, long dflt) const {
    if (!has(key)) {
        used_[key] = std::to_string(dflt);
        return dflt;
    }
    return get_int(key);
}

bool Config::get_bool(const std::string& key, bool dflt) const {
    const std::string v = get_string(key, dflt ? "true" : "false");
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key, "expected true/false");
}

Vec3 Config::get_vec3(const std::string& key, const Vec3& dflt) const {
    if (!has(key)) {
        used_[key] = format_double(dflt.x) + "," + format_double(dflt.y) + "," +
                     format_double(dflt.z);
        return dflt;
    }
    const std::string v = get_string(key);
    std::array<double, 3> parts{};
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        const auto comma = v.find(',', pos);
        const bool last = i == 2;
        if ((comma == std::string::npos) != last)
            throw ConfigError(key, "expected x,y,z");
        parts[i] = parse_double(key, v.substr(pos, last ? std::string::npos
                                                        : comma - pos));
        pos = comma + 1;
    }
    return {parts[0], parts[1], parts[2]};
}

void Config::require_known_keys(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : kv_)
        if (!allowed.count(key))
            throw ConfigError(key, "unknown key");
}

}  // namespace wc
