#pragma once

// Sectioned key-value configuration files (a TOML subset): tables, dotted
// keys, arrays of tables, inline tables, arrays, strings, integers, floats
// and booleans. Dates and multi-line strings are not supported.

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "avglab/error.hpp"

namespace avglab {

// Schema or syntax problem; the message starts with the offending key path
// or line.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class ConfigValue {
 public:
  using Array = std::vector<ConfigValue>;
  using Table = std::vector<std::pair<std::string, ConfigValue>>;  // insertion order

  ConfigValue() : value_(Table{}) {}
  ConfigValue(bool v) : value_(v) {}                          // NOLINT(google-explicit-constructor)
  ConfigValue(long long v) : value_(v) {}                     // NOLINT(google-explicit-constructor)
  ConfigValue(int v) : value_(static_cast<long long>(v)) {}   // NOLINT(google-explicit-constructor)
  ConfigValue(double v) : value_(v) {}                        // NOLINT(google-explicit-constructor)
  ConfigValue(std::string v) : value_(std::move(v)) {}        // NOLINT(google-explicit-constructor)
  ConfigValue(const char* v) : value_(std::string(v)) {}      // NOLINT(google-explicit-constructor)
  ConfigValue(Array v) : value_(std::move(v)) {}              // NOLINT(google-explicit-constructor)
  ConfigValue(Table v) : value_(std::move(v)) {}              // NOLINT(google-explicit-constructor)

  static ConfigValue parse(const std::string& text);
  // Serialises a table; parse(serialize()) reproduces the value.
  std::string serialize() const;

  bool is_bool() const { return std::holds_alternative<bool>(value_); }
  bool is_integer() const { return std::holds_alternative<long long>(value_); }
  bool is_float() const { return std::holds_alternative<double>(value_); }
  bool is_number() const { return is_integer() || is_float(); }
  bool is_string() const { return std::holds_alternative<std::string>(value_); }
  bool is_array() const { return std::holds_alternative<Array>(value_); }
  bool is_table() const { return std::holds_alternative<Table>(value_); }
  const char* type_name() const;

  bool as_bool() const { return std::get<bool>(value_); }
  long long as_integer() const { return std::get<long long>(value_); }
  double as_number() const { return is_integer() ? static_cast<double>(as_integer()) : std::get<double>(value_); }
  const std::string& as_string() const { return std::get<std::string>(value_); }
  const Array& as_array() const { return std::get<Array>(value_); }
  Array& as_array() { return std::get<Array>(value_); }
  const Table& as_table() const { return std::get<Table>(value_); }
  Table& as_table() { return std::get<Table>(value_); }

  // Table lookup; nullptr when absent.
  const ConfigValue* find(const std::string& key) const;
  ConfigValue* find(const std::string& key);
  // Inserts or replaces.
  void set(const std::string& key, ConfigValue value);

  // Tables compare as unordered key sets.
  friend bool operator==(const ConfigValue& a, const ConfigValue& b);

 private:
  std::variant<bool, long long, double, std::string, Array, Table> value_;
};

// Typed access to one table with error messages that name the key path.
// finish() rejects keys that were never read.
class ConfigReader {
 public:
  ConfigReader(const ConfigValue& table, std::string path);

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return table_->find(key) != nullptr; }
  const ConfigValue& raw(const std::string& key);
  const ConfigValue* optional_raw(const std::string& key);

  std::string string(const std::string& key);
  std::string string_or(const std::string& key, const std::string& fallback);
  double number(const std::string& key);
  double number_or(const std::string& key, double fallback);
  long long integer(const std::string& key);
  long long integer_or(const std::string& key, long long fallback);
  bool boolean_or(const std::string& key, bool fallback);
  ConfigReader table(const std::string& key);
  const ConfigValue::Array& array(const std::string& key);

  // "<path>.<key>: <what>"
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
  void finish() const;

 private:
  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const ConfigValue* table_;
  std::string path_;
  std::vector<std::string> used_;
};

}  // namespace avglab
