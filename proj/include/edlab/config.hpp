#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <edlab/errors.hpp>

namespace edlab {

// Flat keyed configuration: `key = value` lines, `#` comments, numeric lists
// in brackets. Values keep their raw token form and are coerced on access.
class Config {
 public:
  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  static Config parse(const std::string& text) {
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
        throw Error(ErrorCode::ConfigError,
                    "line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(t.substr(0, eq));
      const std::string val = trim(t.substr(eq + 1));
      if (key.empty() || val.empty())
        throw Error(ErrorCode::ConfigError,
                    "line " + std::to_string(lineno) + ": empty key or value");
      cfg.values_[key] = val;
    }
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
  }

  std::string require_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
      throw Error(ErrorCode::ConfigError, "missing required key '" + key + "'");
    return it->second;
  }

  double get_double(const std::string& key, double dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : to_double(key, it->second);
  }

  double require_double(const std::string& key) const {
    return to_double(key, require_string(key));
  }

  int get_int(const std::string& key, int dflt) const {
    const double v = get_double(key, static_cast<double>(dflt));
    return static_cast<int>(std::llround(v));
  }

  std::uint64_t get_seed(const std::string& key, std::uint64_t dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
      return std::stoull(it->second);
    } catch (...) {
      throw Error(ErrorCode::ConfigError, "key '" + key + "' is not a seed");
    }
  }

  std::vector<double> get_list(const std::string& key,
                               std::vector<double> dflt = {}) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    return to_list(key, it->second);
  }

  std::vector<double> require_list(const std::string& key) const {
    return to_list(key, require_string(key));
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

  static double to_double(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (...) {
      throw Error(ErrorCode::ConfigError, "key '" + key + "' is not a number: " + v);
    }
  }

  static std::vector<double> to_list(const std::string& key, std::string v) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
      throw Error(ErrorCode::ConfigError, "key '" + key + "' is not a [list]");
    v = v.substr(1, v.size() - 2);
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) continue;
      out.push_back(to_double(key, t));
    }
    if (out.empty())
      throw Error(ErrorCode::ConfigError, "key '" + key + "' is an empty list");
    return out;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace edlab
