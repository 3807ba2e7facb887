#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ordres/errors.hpp"

namespace ordres {

// Focused TOML subset: [table] headers, bare keys, strings, booleans,
// integers, floats, and flat arrays. That covers the experiment
// configuration format; nested inline tables and multi-line strings are out
// of scope.
class TomlTable {
public:
    using Value = std::variant<std::string, std::int64_t, double, bool, std::vector<double>,
                               std::vector<std::string>>;

    static TomlTable parse(const std::string& text) {
        TomlTable t;
        std::istringstream in(text);
        std::string line, prefix;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = strip_comment(line);
            s = trim(s);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']') fail(lineno, "unterminated table header");
                prefix = trim(s.substr(1, s.size() - 2));
                if (prefix.empty()) fail(lineno, "empty table header");
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos) fail(lineno, "expected key = value");
            std::string key = trim(s.substr(0, eq));
            std::string val = trim(s.substr(eq + 1));
            if (key.empty() || val.empty()) fail(lineno, "expected key = value");
            const std::string full = prefix.empty() ? key : prefix + "." + key;
            t.values_[full] = parse_value(val, lineno);
        }
        return t;
    }

    static TomlTable parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("TomlTable: cannot open " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return as_string(it, key);
    }
    std::string require_string(const std::string& key) const { return as_string(find(key), key); }

    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return as_double(it, key);
    }
    double require_double(const std::string& key) const { return as_double(find(key), key); }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return as_int(it, key);
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (const bool* b = std::get_if<bool>(&it->second)) return *b;
        throw std::runtime_error("TomlTable: key '" + key + "' is not a boolean");
    }

    std::vector<double> get_double_array(const std::string& key, std::vector<double> fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (const auto* a = std::get_if<std::vector<double>>(&it->second)) return *a;
        throw std::runtime_error("TomlTable: key '" + key + "' is not a numeric array");
    }

    const std::map<std::string, Value>& entries() const { return values_; }

    void set(const std::string& key, Value v) { values_[key] = std::move(v); }

private:
    std::map<std::string, Value> values_;

    std::map<std::string, Value>::const_iterator find(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw std::runtime_error("TomlTable: missing required key '" + key + "'");
        return it;
    }

    static std::string as_string(std::map<std::string, Value>::const_iterator it, const std::string& key) {
        if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
        throw std::runtime_error("TomlTable: key '" + key + "' is not a string");
    }

    static double as_double(std::map<std::string, Value>::const_iterator it, const std::string& key) {
        if (const auto* d = std::get_if<double>(&it->second)) return *d;
        if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
        throw std::runtime_error("TomlTable: key '" + key + "' is not a number");
    }

    static std::int64_t as_int(std::map<std::string, Value>::const_iterator it, const std::string& key) {
        if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
        throw std::runtime_error("TomlTable: key '" + key + "' is not an integer");
    }

    [[noreturn]] static void fail(int lineno, const std::string& what) {
        throw std::runtime_error("TomlTable: line " + std::to_string(lineno) + ": " + what);
    }

    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    static std::string strip_comment(const std::string& s) {
        bool in_str = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') in_str = !in_str;
            if (s[i] == '#' && !in_str) return s.substr(0, i);
        }
        return s;
    }

    static Value parse_scalar(const std::string& v, int lineno) {
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
        if (v == "true") return true;
        if (v == "false") return false;
        const bool looks_float = v.find_first_of(".eE") != std::string::npos;
        if (!looks_float) {
            try {
                std::size_t pos = 0;
                const std::int64_t i = std::stoll(v, &pos);
                if (pos == v.size()) return i;
            } catch (...) {
            }
        }
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos == v.size()) return d;
        } catch (...) {
        }
        fail(lineno, "cannot parse value '" + v + "'");
    }

    static Value parse_value(const std::string& v, int lineno) {
        if (v.front() == '[') {
            if (v.back() != ']') fail(lineno, "unterminated array");
            std::vector<double> nums;
            std::vector<std::string> strs;
            std::string body = v.substr(1, v.size() - 2);
            std::size_t start = 0;
            bool any_string = false;
            while (start <= body.size()) {
                std::size_t comma = body.find(',', start);
                std::string item = trim(body.substr(start, comma == std::string::npos ? std::string::npos
                                                                                       : comma - start));
                if (!item.empty()) {
                    Value sv = parse_scalar(item, lineno);
                    if (const auto* s = std::get_if<std::string>(&sv)) {
                        strs.push_back(*s);
                        any_string = true;
                    } else if (const auto* d = std::get_if<double>(&sv)) {
                        nums.push_back(*d);
                    } else if (const auto* i = std::get_if<std::int64_t>(&sv)) {
                        nums.push_back(static_cast<double>(*i));
                    } else {
                        fail(lineno, "unsupported array element");
                    }
                }
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            if (any_string) {
                if (!nums.empty()) fail(lineno, "mixed array types");
                return strs;
            }
            return nums;
        }
        return parse_scalar(v, lineno);
    }
};

}  // namespace ordres
