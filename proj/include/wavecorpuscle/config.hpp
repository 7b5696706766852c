// Flat KEY = VALUE experiment configs.
//
// Grammar: one "key = value" pair per line; '#' starts a comment; blank
// lines ignored; keys are [a-z0-9_.]+; values are read as strings and
// converted on access.  Vector values are comma-separated ("0.1,0,0").
// Every consumer declares its allowed key set; unknown keys are rejected
// with a ConfigError naming the key, so typos cannot silently change an
// experiment.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wavecorpuscle/grids.hpp"

namespace wc {

class Config {
public:
    Config() = default;

    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    // Typed getters; the defaulted forms record the default so that
    // effective_values() reproduces the full parameter set actually used.
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double dflt) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long dflt) const;
    bool get_bool(const std::string& key, bool dflt) const;
    Vec3 get_vec3(const std::string& key, const Vec3& dflt) const;

    // Throws ConfigError on any key outside `allowed`.
    void require_known_keys(const std::set<std::string>& allowed) const;

    const std::map<std::string, std::string>& values() const { return kv_; }
    // Keys actually consumed (with defaults filled in) -- for run summaries.
    const std::map<std::string, std::string>& effective_values() const {
        return used_;
    }

private:
    std::map<std::string, std::string> kv_;
    mutable std::map<std::string, std::string> used_;
};

}  // namespace wc
