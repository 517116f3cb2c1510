#pragma once

// Strict INI-style run configuration:
//
//   # comment
//   seed = 7                 (top-level keys belong to section "run")
//   [sim-quadratic]
//   runs = 200
//
// Every key must be known for its section; duplicates and unknown keys are
// errors carrying the source line.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mocu::app {

struct ConfigValue {
  std::string text;
  std::size_t line = 0;  // 0 = set programmatically
};

class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "<config>");
  static Config load(const std::string& path);

  /// Adds or replaces a value; the key is validated like a parsed one.
  void set(const std::string& section, const std::string& key, const std::string& value);

  bool has(const std::string& section, const std::string& key) const;
  const std::string& source() const noexcept { return source_; }
  /// Directory of the loaded file, for resolving relative paths ("" if parsed).
  const std::string& base_dir() const noexcept { return base_dir_; }

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback) const;
  std::vector<std::string> get_list(const std::string& section, const std::string& key,
                                    const std::vector<std::string>& fallback) const;
  /// Keys of a section matching "prefix.<n>", in numeric order.
  std::vector<std::string> indexed_keys(const std::string& section, const std::string& prefix) const;

  /// Canonical text with every set key, sorted by section and key.
  std::string resolved() const;

 private:
  [[noreturn]] void bad_value(const std::string& section, const std::string& key, const std::string& why) const;
  const ConfigValue* find(const std::string& section, const std::string& key) const;

  std::string source_;
  std::string base_dir_;
  std::map<std::string, std::map<std::string, ConfigValue>> values_;
};

/// Known sections and their keys (used by the strict parser and the docs).
const std::map<std::string, std::vector<std::string>>& config_schema();

}  // namespace mocu::app
