#pragma once

// INI-style run configuration: [section] key = value. Every key must be known;
// command-line overrides are applied on top of the file before validation.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsmcli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Config {
public:
    static Config load(const std::optional<std::string>& path, const std::vector<std::string>& overrides);

    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
    [[nodiscard]] std::string str(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double num(const std::string& key, double fallback) const;
    [[nodiscard]] std::optional<double> opt_num(const std::string& key) const;
    [[nodiscard]] long integer(const std::string& key, long fallback) const;
    [[nodiscard]] bool flag(const std::string& key, bool fallback) const;
    [[nodiscard]] std::vector<std::string> list(const std::string& key, const std::vector<std::string>& fallback) const;
    [[nodiscard]] std::vector<double> num_list(const std::string& key, const std::vector<double>& fallback) const;

    void set(const std::string& key, const std::string& value);
    [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

    static const std::set<std::string>& known_keys();

private:
    std::map<std::string, std::string> values_;  // "section.key" -> raw text
};

}  // namespace dsmcli
