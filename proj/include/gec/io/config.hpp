#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gec/error.hpp"

namespace gec::io {

/// Sectioned key = value text (INI; ';' starts a comment). Every key must be
/// read through the accessors; leftovers are reported by `reject_unknown`.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& origin = "<config>") {
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::ini_parser::read_ini(in, tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError(origin + ": " + e.what());
        }
        KeyValueConfig c;
        for (const auto& [section, body] : tree) {
            if (!body.data().empty()) throw ConfigError(origin + ": key '" + section + "' outside any [section]");
            for (const auto& [key, value] : body) c.values_[{section, key}] = trim(value.data());
        }
        return c;
    }

    static KeyValueConfig parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    [[nodiscard]] bool has(const std::string& section, const std::string& key) const {
        return values_.count({section, key}) != 0;
    }

    [[nodiscard]] bool has_section(const std::string& section) const {
        for (const auto& [k, v] : values_)
            if (k.first == section) return true;
        return false;
    }

    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        const auto it = values_.find({section, key});
        if (it == values_.end()) return std::nullopt;
        used_.insert(it->first);
        return it->second;
    }

    std::string str(const std::string& section, const std::string& key, const std::string& fallback) const {
        return raw(section, key).value_or(fallback);
    }

    std::string require_str(const std::string& section, const std::string& key) const {
        auto v = raw(section, key);
        if (!v) throw ConfigError("missing required key [" + section + "] " + key);
        return *v;
    }

    double real(const std::string& section, const std::string& key, double fallback) const {
        auto v = raw(section, key);
        return v ? to_real(*v, section, key) : fallback;
    }

    std::optional<double> optional_real(const std::string& section, const std::string& key) const {
        auto v = raw(section, key);
        if (!v) return std::nullopt;
        return to_real(*v, section, key);
    }

    std::int64_t integer(const std::string& section, const std::string& key, std::int64_t fallback) const {
        auto v = raw(section, key);
        return v ? to_integer(*v, section, key) : fallback;
    }

    std::uint64_t unsigned_integer(const std::string& section, const std::string& key, std::uint64_t fallback) const {
        auto v = raw(section, key);
        if (!v) return fallback;
        std::uint64_t out = 0;
        const auto* end = v->data() + v->size();
        const auto r = std::from_chars(v->data(), end, out);
        if (r.ec != std::errc() || r.ptr != end) bad(section, key, *v, "an unsigned integer");
        return out;
    }

    bool boolean(const std::string& section, const std::string& key, bool fallback) const {
        auto v = raw(section, key);
        if (!v) return fallback;
        if (*v == "true" || *v == "yes" || *v == "1") return true;
        if (*v == "false" || *v == "no" || *v == "0") return false;
        bad(section, key, *v, "a boolean");
    }

    /// Comma-separated reals; "inf" is accepted when `allow_inf`.
    std::vector<double> real_list(const std::string& section, const std::string& key, bool allow_inf = false) const {
        auto v = raw(section, key);
        std::vector<double> out;
        if (!v) return out;
        for (const auto& item : split(*v)) {
            const double x = to_real(item, section, key);
            if (std::isinf(x) && !allow_inf) bad(section, key, item, "a finite number");
            out.push_back(x);
        }
        return out;
    }

    /// Throws on the first key no accessor has read.
    void reject_unknown() const {
        for (const auto& [k, v] : values_)
            if (!used_.count(k)) throw ConfigError("unknown key [" + k.first + "] " + k.second);
    }

    /// Canonical text of every key (sorted), used for hashing.
    [[nodiscard]] std::string canonical() const {
        std::string s;
        for (const auto& [k, v] : values_) s += "[" + k.first + "]" + k.second + "=" + v + "\n";
        return s;
    }

private:
    using Key = std::pair<std::string, std::string>;

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static std::vector<std::string> split(const std::string& s) {
        std::vector<std::string> out;
        std::string item;
        std::istringstream in(s);
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    [[noreturn]] static void bad(const std::string& section, const std::string& key, const std::string& v,
                                 const char* want) {
        throw ConfigError("[" + section + "] " + key + " = '" + v + "' is not " + want);
    }

    static double to_real(const std::string& s, const std::string& section, const std::string& key) {
        if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
        double out = 0.0;
        const auto* end = s.data() + s.size();
        const auto r = std::from_chars(s.data(), end, out);
        if (r.ec != std::errc() || r.ptr != end || std::isnan(out)) bad(section, key, s, "a number");
        return out;
    }

    static std::int64_t to_integer(const std::string& s, const std::string& section, const std::string& key) {
        std::int64_t out = 0;
        const auto* end = s.data() + s.size();
        const auto r = std::from_chars(s.data(), end, out);
        if (r.ec != std::errc() || r.ptr != end) bad(section, key, s, "an integer");
        return out;
    }

    std::map<Key, std::string> values_;
    mutable std::set<Key> used_;
};

}  // namespace gec::io
