#pragma once

#include <string>
#include <utility>
#include <vector>

#include "girder/types.hpp"

namespace girder {

// parse error carrying the 1-based source line
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, int line)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// value tree for the nested-table config format (toml-like subset:
// tables, arrays of tables, arrays, numbers, strings, booleans)
struct ConfigValue {
  enum class Kind { number, string, boolean, array, table };

  Kind kind = Kind::table;
  double number = 0.0;
  std::string str;
  bool boolean = false;
  std::vector<ConfigValue> items;  // array elements
  std::vector<std::pair<std::string, ConfigValue>> entries;  // table, in file order
  int line = 0;

  bool is_table() const { return kind == Kind::table; }
  bool is_array() const { return kind == Kind::array; }

  bool has(const std::string& key) const { return find(key) != nullptr; }
  const ConfigValue* find(const std::string& key) const;
  const ConfigValue& at(const std::string& key) const;

  double as_number() const;
  std::string as_string() const;
  bool as_bool() const;
  const std::vector<ConfigValue>& as_array() const;

  double number_or(const std::string& key, double fallback) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  bool bool_or(const std::string& key, bool fallback) const;
};

ConfigValue parse_config(const std::string& text);
ConfigValue parse_config_file(const std::string& path);

}  // namespace girder
