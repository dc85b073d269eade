#pragma once

#include "cuff/errors.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace cuff {

/// Flat "key = value" configuration with '#' comments and dotted namespaces
/// (plant.dt, control.position_kp, mapping.rc_sh_max, ...).
class Config {
public:
    Config() = default;

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open config: " + path);
        Config cfg;
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto trimmed = trim(line);
            if (trimmed.empty()) continue;
            auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ParseError("expected 'key = value' in " + path, lineno);
            auto key = trim(trimmed.substr(0, eq));
            auto value = trim(trimmed.substr(eq + 1));
            if (key.empty()) throw ParseError("empty key in " + path, lineno);
            cfg.values_[key] = value;
        }
        return cfg;
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw Error("cannot open for writing: " + path);
        for (const auto& [k, v] : values_) out << k << " = " << v << "\n";
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& def) const {
        auto it = values_.find(key);
        return it == values_.end() ? def : it->second;
    }

    std::string get_required_string(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end())
            throw ValidationError("required config key missing: " + key);
        return it->second;
    }

    double get_double(const std::string& key, double def) const {
        auto it = values_.find(key);
        if (it == values_.end()) return def;
        return parse_double(key, it->second);
    }

    double get_required_double(const std::string& key) const {
        return parse_double(key, get_required_string(key));
    }

    long get_long(const std::string& key, long def) const {
        auto it = values_.find(key);
        if (it == values_.end()) return def;
        try {
            return std::stol(it->second);
        } catch (const std::exception&) {
            throw ValidationError("config key " + key + " is not an integer: " + it->second);
        }
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void set(const std::string& key, double value) {
        std::ostringstream os;
        os.precision(17);
        os << value;
        values_[key] = os.str();
    }

    const std::map<std::string, std::string>& items() const { return values_; }

private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return "";
        auto e = s.find_last_not_of(" \t");
        return s.substr(b, e - b + 1);
    }
    static double parse_double(const std::string& key, const std::string& v) {
        try {
            size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ValidationError("config key " + key + " is not numeric: " + v);
        }
    }

    std::map<std::string, std::string> values_;
};

}  // namespace cuff
