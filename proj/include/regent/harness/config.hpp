#pragma once

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "regent/automata/io.hpp"
#include "regent/error.hpp"

namespace regent {

/// Flat `key = value` text with `#` comments. Every lookup marks its key as
/// used so that leftovers can be reported as typos.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string t = trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
      std::string key = trim(t.substr(0, eq));
      std::string value = trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
      if (cfg.values_.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig load(const std::string& path) {
    std::string text;
    try {
      text = read_text_file(path);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    auto cfg = parse(text);
    cfg.source_ = path;
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  std::string str(const std::string& key, const std::string& fallback) const { return get(key).value_or(fallback); }

  std::string required(const std::string& key) const {
    auto v = get(key);
    if (!v) throw ConfigError("missing required key '" + key + "'");
    return *v;
  }

  template <typename T>
  T number(const std::string& key, T fallback) const {
    auto v = get(key);
    return v ? to_number<T>(key, *v) : fallback;
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    auto v = get(key);
    if (!v) return out;
    std::string item;
    std::istringstream in(*v);
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  template <typename T>
  std::vector<T> numbers(const std::string& key) const {
    std::vector<T> out;
    for (const auto& s : list(key)) out.push_back(to_number<T>(key, s));
    return out;
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  void reject_unknown() const {
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) throw ConfigError("unknown key '" + k + "'");
  }

  const std::map<std::string, std::string>& values() const noexcept { return values_; }
  const std::string& source() const noexcept { return source_; }

  template <typename T>
  static T to_number(const std::string& key, const std::string& s) {
    T out{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': cannot parse '" + s + "' as a number");
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
  std::string source_;
};

}  // namespace regent
