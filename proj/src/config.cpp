#include "avglab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace avglab {
namespace {

bool bare_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  ConfigValue run() {
    ConfigValue root;
    ConfigValue* current = &root;
    std::string current_name;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      statement_ = pos_;
      if (peek() == '[') {
        const bool array = s_.compare(pos_, 2, "[[") == 0;
        pos_ += array ? 2 : 1;
        skip_ws();
        std::vector<std::string> path = key_path();
        skip_ws();
        if (array ? s_.compare(pos_, 2, "]]") != 0 : peek() != ']') fail("expected ']' after table name");
        pos_ += array ? 2 : 1;
        end_of_line();
        current_name = join(path);
        current = open_table(root, path, array);
        defined_.push_back(current_name);
        continue;
      }
      std::vector<std::string> path = key_path();
      skip_ws();
      if (peek() != '=') fail("expected '=' after key");
      ++pos_;
      skip_ws();
      ConfigValue v = value();
      end_of_line();
      assign(*current, path, std::move(v), current_name);
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    fail_at(pos_, what);
  }
  [[noreturn]] void fail_at(std::size_t at, const std::string& what) const {
    long line = 1;
    for (std::size_t i = 0; i < at && i < s_.size(); ++i) line += s_[i] == '\n';
    throw ConfigError("line " + std::to_string(line) + ": " + what);
  }
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }
  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }
  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        ++pos_;
        continue;
      }
      break;
    }
  }
  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        ++pos_;
        continue;
      }
      break;
    }
  }
  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (!eof() && peek() != '\n') fail("unexpected text after value");
    if (!eof()) ++pos_;
  }

  std::string key_part() {
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    const std::size_t start = pos_;
    while (!eof() && bare_key_char(peek())) ++pos_;
    if (pos_ == start) fail("expected a key");
    return s_.substr(start, pos_ - start);
  }
  std::vector<std::string> key_path() {
    std::vector<std::string> path{key_part()};
    skip_ws();
    while (peek() == '.') {
      ++pos_;
      skip_ws();
      path.push_back(key_part());
      skip_ws();
    }
    return path;
  }
  static std::string join(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& p : path) out += (out.empty() ? "" : ".") + p;
    return out;
  }

  ConfigValue* open_table(ConfigValue& root, const std::vector<std::string>& path, bool array) {
    ConfigValue* t = &root;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const bool last = i + 1 == path.size();
      ConfigValue* next = t->find(path[i]);
      if (last && array) {
        if (!next) {
          t->set(path[i], ConfigValue::Array{});
          next = t->find(path[i]);
        }
        if (!next->is_array()) fail("'" + join(path) + "' is not an array of tables");
        next->as_array().push_back(ConfigValue());
        return &next->as_array().back();
      }
      if (!next) {
        t->set(path[i], ConfigValue());
        next = t->find(path[i]);
      } else if (last) {
        const std::string name = join(path);
        for (const auto& d : defined_)
          if (d == name) fail_at(statement_, "table '" + name + "' defined twice");
      }
      if (next->is_array() && !next->as_array().empty() && next->as_array().back().is_table())
        next = &next->as_array().back();
      if (!next->is_table()) fail("'" + path[i] + "' is not a table");
      t = next;
    }
    return t;
  }

  void assign(ConfigValue& table, const std::vector<std::string>& path, ConfigValue v, const std::string& where) {
    ConfigValue* t = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      ConfigValue* next = t->find(path[i]);
      if (!next) {
        t->set(path[i], ConfigValue());
        next = t->find(path[i]);
      }
      if (!next->is_table()) fail("'" + path[i] + "' is not a table");
      t = next;
    }
    if (t->find(path.back()))
      fail_at(statement_, "duplicate key '" + (where.empty() ? "" : where + ".") + join(path) + "'");
    t->set(path.back(), std::move(v));
  }

  ConfigValue value() {
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (c == '{') return inline_table();
    if (s_.compare(pos_, 4, "true") == 0 && !bare_key_char(pos_ + 4 < s_.size() ? s_[pos_ + 4] : ' ')) {
      pos_ += 4;
      return true;
    }
    if (s_.compare(pos_, 5, "false") == 0 && !bare_key_char(pos_ + 5 < s_.size() ? s_[pos_ + 5] : ' ')) {
      pos_ += 5;
      return false;
    }
    return number();
  }

  ConfigValue number() {
    const std::size_t start = pos_;
    while (!eof() && (bare_key_char(peek()) || peek() == '+' || peek() == '.')) ++pos_;
    std::string tok = s_.substr(start, pos_ - start);
    if (tok.empty()) fail("expected a value");
    std::string clean;
    for (std::size_t i = 0; i < tok.size(); ++i) {
      if (tok[i] == '_') {
        if (i == 0 || i + 1 == tok.size() || !std::isdigit(static_cast<unsigned char>(tok[i - 1])) ||
            !std::isdigit(static_cast<unsigned char>(tok[i + 1])))
          fail("misplaced '_' in number '" + tok + "'");
        continue;
      }
      clean += tok[i];
    }
    std::string body = clean;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) body = body.substr(1);
    if (body == "inf" || body == "nan") {
      double v = body == "inf" ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
      return clean[0] == '-' ? -v : v;
    }
    const bool is_float = clean.find_first_of(".eE") != std::string::npos;
    if (body.size() > 1 && body[0] == '0' && std::isdigit(static_cast<unsigned char>(body[1])))
      fail("leading zeros in '" + tok + "'");
    char* end = nullptr;
    errno = 0;
    if (is_float) {
      const double v = std::strtod(clean.c_str(), &end);
      if (*end != '\0' || clean.back() == '.' || clean.find(".e") != std::string::npos ||
          clean.find(".E") != std::string::npos || body[0] == '.')
        fail("invalid float '" + tok + "'");
      return v;
    }
    const long long v = std::strtoll(clean.c_str(), &end, 10);
    if (*end != '\0') fail("invalid value '" + tok + "'");
    if (errno == ERANGE) fail("integer out of range '" + tok + "'");
    return v;
  }

  std::string basic_string() {
    ++pos_;
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated string");
      const char e = s_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'u': {
          if (pos_ + 4 > s_.size()) fail("truncated \\u escape");
          const unsigned long cp = std::strtoul(s_.substr(pos_, 4).c_str(), nullptr, 16);
          pos_ += 4;
          if (cp < 0x80) {
            out += static_cast<char>(cp);
          } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
          } else {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
          }
          break;
        }
        default: fail(std::string("unknown escape \\") + e);
      }
    }
    return out;
  }

  std::string literal_string() {
    ++pos_;
    const std::size_t start = pos_;
    while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
    if (peek() != '\'') fail("unterminated string");
    return s_.substr(start, pos_++ - start);
  }

  ConfigValue array() {
    ++pos_;
    ConfigValue::Array out;
    skip_array_space();
    while (peek() != ']') {
      if (eof()) fail("unterminated array");
      out.push_back(value());
      skip_array_space();
      if (peek() == ',') {
        ++pos_;
        skip_array_space();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    ++pos_;
    return out;
  }

  ConfigValue inline_table() {
    ++pos_;
    ConfigValue out;
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return out;
    }
    while (true) {
      std::vector<std::string> path = key_path();
      skip_ws();
      if (peek() != '=') fail("expected '=' in inline table");
      ++pos_;
      skip_ws();
      ConfigValue v = value();
      assign(out, path, std::move(v), "");
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
        continue;
      }
      if (peek() == '}') {
        ++pos_;
        return out;
      }
      fail("expected ',' or '}' in inline table");
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  std::size_t statement_ = 0;
  std::vector<std::string> defined_;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + "\"";
}

std::string key_text(const std::string& k) {
  bool bare = !k.empty();
  for (char c : k) bare = bare && bare_key_char(c);
  return bare ? k : quote(k);
}

std::string inline_text(const ConfigValue& v) {
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  if (v.is_integer()) return std::to_string(v.as_integer());
  if (v.is_float()) {
    const double d = v.as_number();
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  }
  if (v.is_string()) return quote(v.as_string());
  if (v.is_array()) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.as_array().size(); ++i) s += (i ? ", " : "") + inline_text(v.as_array()[i]);
    return s + "]";
  }
  std::string s = "{";
  bool first = true;
  for (const auto& [k, x] : v.as_table()) {
    s += (first ? "" : ", ") + key_text(k) + " = " + inline_text(x);
    first = false;
  }
  return s + "}";
}

void serialize_table(const ConfigValue& t, const std::string& prefix, std::string& out) {
  for (const auto& [k, v] : t.as_table())
    if (!v.is_table()) out += key_text(k) + " = " + inline_text(v) + "\n";
  for (const auto& [k, v] : t.as_table()) {
    if (!v.is_table()) continue;
    const std::string name = prefix.empty() ? key_text(k) : prefix + "." + key_text(k);
    if (!out.empty()) out += "\n";
    out += "[" + name + "]\n";
    serialize_table(v, name, out);
  }
}

}  // namespace

ConfigValue ConfigValue::parse(const std::string& text) { return Parser(text).run(); }

bool operator==(const ConfigValue& a, const ConfigValue& b) {
  if (a.is_table() && b.is_table()) {
    const auto& ta = a.as_table();
    if (ta.size() != b.as_table().size()) return false;
    return std::all_of(ta.begin(), ta.end(), [&](const auto& kv) {
      const ConfigValue* other = b.find(kv.first);
      return other && kv.second == *other;
    });
  }
  if (a.is_array() && b.is_array()) return std::equal(a.as_array().begin(), a.as_array().end(),
                                                      b.as_array().begin(), b.as_array().end());
  return a.value_ == b.value_;
}

std::string ConfigValue::serialize() const {
  if (!is_table()) throw ConfigError("only tables serialise as documents");
  std::string out;
  serialize_table(*this, "", out);
  return out;
}

const char* ConfigValue::type_name() const {
  static const char* names[] = {"boolean", "integer", "float", "string", "array", "table"};
  return names[value_.index()];
}

const ConfigValue* ConfigValue::find(const std::string& key) const {
  if (!is_table()) return nullptr;
  for (const auto& [k, v] : as_table())
    if (k == key) return &v;
  return nullptr;
}

ConfigValue* ConfigValue::find(const std::string& key) {
  if (!is_table()) return nullptr;
  for (auto& [k, v] : as_table())
    if (k == key) return &v;
  return nullptr;
}

void ConfigValue::set(const std::string& key, ConfigValue value) {
  if (!is_table()) throw ConfigError("set on a non-table value");
  if (ConfigValue* v = find(key)) {
    *v = std::move(value);
    return;
  }
  as_table().emplace_back(key, std::move(value));
}

}  // namespace avglab

namespace avglab {

ConfigReader::ConfigReader(const ConfigValue& table, std::string path) : table_(&table), path_(std::move(path)) {
  if (!table.is_table()) throw ConfigError((path_.empty() ? std::string("<root>") : path_) + ": expected a table");
}

void ConfigReader::fail(const std::string& key, const std::string& what) const {
  throw ConfigError(key_path(key) + ": " + what);
}

const ConfigValue* ConfigReader::optional_raw(const std::string& key) {
  used_.push_back(key);
  return table_->find(key);
}

const ConfigValue& ConfigReader::raw(const std::string& key) {
  const ConfigValue* v = optional_raw(key);
  if (!v) fail(key, "missing required key");
  return *v;
}

std::string ConfigReader::string(const std::string& key) {
  const ConfigValue& v = raw(key);
  if (!v.is_string()) fail(key, std::string("expected a string, got ") + v.type_name());
  return v.as_string();
}

std::string ConfigReader::string_or(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : (used_.push_back(key), fallback);
}

double ConfigReader::number(const std::string& key) {
  const ConfigValue& v = raw(key);
  if (!v.is_number()) fail(key, std::string("expected a number, got ") + v.type_name());
  return v.as_number();
}

double ConfigReader::number_or(const std::string& key, double fallback) {
  return has(key) ? number(key) : (used_.push_back(key), fallback);
}

long long ConfigReader::integer(const std::string& key) {
  const ConfigValue& v = raw(key);
  if (!v.is_integer()) fail(key, std::string("expected an integer, got ") + v.type_name());
  return v.as_integer();
}

long long ConfigReader::integer_or(const std::string& key, long long fallback) {
  return has(key) ? integer(key) : (used_.push_back(key), fallback);
}

bool ConfigReader::boolean_or(const std::string& key, bool fallback) {
  if (!has(key)) {
    used_.push_back(key);
    return fallback;
  }
  const ConfigValue& v = raw(key);
  if (!v.is_bool()) fail(key, std::string("expected a boolean, got ") + v.type_name());
  return v.as_bool();
}

ConfigReader ConfigReader::table(const std::string& key) {
  const ConfigValue& v = raw(key);
  if (!v.is_table()) fail(key, std::string("expected a table, got ") + v.type_name());
  return ConfigReader(v, key_path(key));
}

const ConfigValue::Array& ConfigReader::array(const std::string& key) {
  const ConfigValue& v = raw(key);
  if (!v.is_array()) fail(key, std::string("expected an array, got ") + v.type_name());
  return v.as_array();
}

void ConfigReader::finish() const {
  for (const auto& [k, v] : table_->as_table()) {
    bool seen = false;
    for (const auto& u : used_) seen = seen || u == k;
    if (!seen) fail(k, "unknown key");
  }
}

}  // namespace avglab
