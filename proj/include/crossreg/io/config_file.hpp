#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace crossreg::io {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

/// Flat `key = value` text with [section] headers and # comments. Keys are
/// addressed as "section.key" ("" section for keys before any header).
class Config {
 public:
  Config() = default;

  static Config load(const std::string& path);
  static Config parse(const std::string& text, const std::string& name = "<config>");

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  /// Deterministic (sorted) serialization; parses back to an equal config.
  std::string serialize() const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace crossreg::io
