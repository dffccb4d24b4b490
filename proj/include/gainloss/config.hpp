#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gainloss/csv.hpp"
#include "gainloss/errors.hpp"

namespace gainloss {

// Flat `key = value` text, `#` starts a comment, blank lines ignored.
// Later assignments to the same key override earlier ones.
using Config = std::map<std::string, std::string>;

inline Config parse_config_text(const std::string& text, const std::string& origin = "<config>") {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string value = detail::trim(body.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    cfg[key] = value;
  }
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

inline void require_known_keys(const Config& cfg, const std::set<std::string>& allowed,
                               const std::string& context) {
  for (const auto& [key, value] : cfg) {
    (void)value;
    if (allowed.find(key) == allowed.end()) {
      throw ConfigError(context + ": unknown key '" + key + "'");
    }
  }
}

inline bool has_key(const Config& cfg, const std::string& key) {
  return cfg.find(key) != cfg.end();
}

inline std::string get_string(const Config& cfg, const std::string& key,
                              const std::string& fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

inline std::string require_string(const Config& cfg, const std::string& key) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

inline double get_double(const Config& cfg, const std::string& key, double fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  double v = 0.0;
  if (!detail::parse_double(it->second, v)) {
    throw ConfigError("key '" + key + "': expected a number, got '" + it->second + "'");
  }
  return v;
}

inline long get_long(const Config& cfg, const std::string& key, long fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + it->second + "'");
  }
}

inline std::uint64_t get_seed(const Config& cfg, const std::string& key, std::uint64_t fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a seed, got '" + it->second + "'");
  }
}

inline std::vector<double> get_double_list(const Config& cfg, const std::string& key,
                                           const std::vector<double>& fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  std::vector<double> out;
  std::istringstream ss(it->second);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token = detail::trim(token);
    if (token.empty()) continue;
    double v = 0.0;
    if (!detail::parse_double(token, v)) {
      throw ConfigError("key '" + key + "': expected comma-separated numbers, got '" +
                        it->second + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

inline std::vector<int> get_int_list(const Config& cfg, const std::string& key,
                                     const std::vector<int>& fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  std::vector<int> out;
  for (double v : get_double_list(cfg, key, {})) {
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
      throw ConfigError("key '" + key + "': expected integers, got '" + it->second + "'");
    }
    out.push_back(i);
  }
  return out;
}

}  // namespace gainloss
