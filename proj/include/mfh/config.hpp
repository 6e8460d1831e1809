#pragma once

// Flat key-value configuration with one section per pipeline stage:
//
//   # comment
//   [gateway]
//   endpoint = http://localhost:8000/v1/completions
//   model = text-davinci-002
//
// Secrets never live here; the API token is read from the environment
// variable named by gateway.api_key_env.

#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "mfh/errors.hpp"

namespace mfh {

class Config {
public:
    Config() = default;

    static Config parse(std::string_view text, const std::string& origin = "<config>") {
        Config cfg;
        std::istringstream in{std::string(text)};
        std::string line;
        std::string section;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::string trimmed = trim(line);
            if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == ';') continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']') {
                    throw ParseError(origin + ": unterminated section header", line_no);
                }
                section = trim(trimmed.substr(1, trimmed.size() - 2));
                if (section.empty()) throw ParseError(origin + ": empty section name", line_no);
                continue;
            }
            auto eq = trimmed.find('=');
            if (eq == std::string::npos) {
                throw ParseError(origin + ": expected 'key = value'", line_no);
            }
            std::string key = trim(trimmed.substr(0, eq));
            std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty()) throw ParseError(origin + ": empty key", line_no);
            cfg.values_[qualify(section, key)] = value;
        }
        return cfg;
    }

    std::optional<std::string> get(const std::string& section, const std::string& key) const {
        auto it = values_.find(qualify(section, key));
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::string get_or(const std::string& section, const std::string& key,
                       std::string fallback) const {
        auto v = get(section, key);
        return v ? *v : std::move(fallback);
    }

    long long get_int_or(const std::string& section, const std::string& key,
                         long long fallback) const {
        auto v = get(section, key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            long long parsed = std::stoll(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            return parsed;
        } catch (const std::exception&) {
            throw ConfigError("config value " + qualify(section, key) + " is not an integer: '" +
                              *v + "'");
        }
    }

    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const {
        auto v = get(section, key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            double parsed = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            return parsed;
        } catch (const std::exception&) {
            throw ConfigError("config value " + qualify(section, key) + " is not a number: '" +
                              *v + "'");
        }
    }

    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
        auto v = get(section, key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
        if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
        throw ConfigError("config value " + qualify(section, key) + " is not a boolean: '" + *v +
                          "'");
    }

    void set(const std::string& section, const std::string& key, std::string value) {
        values_[qualify(section, key)] = std::move(value);
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    static std::string qualify(const std::string& section, const std::string& key) {
        return section.empty() ? key : section + "." + key;
    }

    static std::string trim(const std::string& s) {
        std::size_t b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return "";
        std::size_t e = s.find_last_not_of(" \t");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
};

// Secrets are environment-only by design.
inline std::string api_key_from_env(const std::string& env_var) {
    if (env_var.empty()) return "";
    const char* value = std::getenv(env_var.c_str());
    return value ? value : "";
}

}  // namespace mfh
