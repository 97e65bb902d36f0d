#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gstein {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ConfigKey {
    const char* name;
    const char* defaultValue;
    const char* help;
};

/// Every recognized key with its default; anything else is rejected.
const std::vector<ConfigKey>& configSchema();

/**
 * Line-oriented `key = value` settings. '#' starts a comment, blank lines are
 * ignored, keys may appear once per file. Later set() calls (command-line
 * overrides) replace earlier values.
 *
 * Lists are comma separated. Numeric lists also accept `lo:hi:count`
 * (linear) and `geom:lo:hi:count` (geometric).
 */
class RunConfig {
public:
    RunConfig();

    void loadFile(const std::filesystem::path& path);
    void loadText(std::string_view text, const std::string& origin = "<config>");
    void set(const std::string& key, const std::string& value);

    bool isAuto(const std::string& key) const { return get(key) == "auto"; }
    const std::string& get(const std::string& key) const;
    double real(const std::string& key) const;
    // real(key) checked against [lo, hi]
    double realIn(const std::string& key, double lo, double hi) const;
    long integer(const std::string& key, long lo, long hi) const;
    bool flag(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
    std::vector<std::size_t> counts(const std::string& key) const;
    std::vector<std::string> words(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Parses "lo:hi:count", "geom:lo:hi:count" or a comma list.
std::vector<double> parseRealList(std::string_view text);

}  // namespace gstein
