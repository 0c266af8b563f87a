#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hemoflow::util {

// Configuration / usage problems that should surface as exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x00000100000001B3ULL;
    }
    return h;
}

namespace detail {
inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}
}  // namespace detail

// Flat key/value configuration. One `key = value` per line, '#' starts a
// comment, blank lines ignored. Serialization sorts keys so a resolved
// snapshot is byte-stable.
class Config {
public:
    Config() = default;

    static Config parse_text(const std::string& text, const std::string& origin = "<text>") {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string stripped = detail::trim(line);
            if (stripped.empty()) continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
            const std::string key = detail::trim(stripped.substr(0, eq));
            const std::string value = detail::trim(stripped.substr(eq + 1));
            if (key.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
            cfg.entries_[key] = value;
        }
        return cfg;
    }

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_text(buf.str(), path);
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        return parse_double(key, it->second);
    }

    long long get_int(const std::string& key, long long fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(it->second, &pos);
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': not an integer: " + it->second);
        }
        if (pos != it->second.size())
            throw ConfigError("config key '" + key + "': not an integer: " + it->second);
        return v;
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::size_t pos = 0;
        std::uint64_t v = 0;
        try {
            v = std::stoull(it->second, &pos);
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': not an unsigned integer: " + it->second);
        }
        if (pos != it->second.size())
            throw ConfigError("config key '" + key + "': not an unsigned integer: " + it->second);
        return v;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ConfigError("config key '" + key + "': expected true/false: " + it->second);
    }

    // Rejects keys outside the allowed set, so typos fail loudly.
    void validate_keys(const std::vector<std::string>& allowed) const {
        for (const auto& [key, value] : entries_) {
            bool ok = false;
            for (const auto& a : allowed)
                if (key == a) {
                    ok = true;
                    break;
                }
            if (!ok) throw ConfigError("unknown config key: " + key);
        }
    }

    std::string to_text() const {
        std::ostringstream out;
        for (const auto& [key, value] : entries_) out << key << " = " << value << "\n";
        return out.str();
    }

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    static double parse_double(const std::string& key, const std::string& text) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &pos);
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': not a number: " + text);
        }
        if (pos != text.size())
            throw ConfigError("config key '" + key + "': not a number: " + text);
        return v;
    }

    std::map<std::string, std::string> entries_;
};

}  // namespace hemoflow::util
