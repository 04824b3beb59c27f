// Copyright 2026 The ndsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// A TOML reader for the subset scenario files use: tables, arrays of tables,
// dotted keys, basic and literal strings, integers, floats, booleans, arrays
// and inline tables. Dates and multi-line strings are rejected.

#ifndef NDSIM_TOML_HPP
#define NDSIM_TOML_HPP

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ndsim/units.hpp"

namespace ndsim::toml {

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
};

class ParseError : public Error {
 public:
  ParseError(SourcePos pos, std::string const& what)
      : Error("line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) + ": " + what),
        pos_(pos) {}

  SourcePos where() const { return pos_; }

 private:
  SourcePos pos_;
};

struct Value;

class Table {
 public:
  Value* find(std::string_view key);
  Value const* find(std::string_view key) const;
  Value& insert(std::string key, Value v);

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::pair<std::string, Value>> entries_;
};

using Array = std::vector<Value>;

enum class Origin { Value, Header, Implicit, ArrayOfTables };

struct Value {
  std::variant<bool, std::int64_t, double, std::string, Array, Table> data;
  SourcePos pos;
  Origin origin = Origin::Value;

  bool is_table() const { return std::holds_alternative<Table>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  Table& table() { return std::get<Table>(data); }
  Table const& table() const { return std::get<Table>(data); }
  Array& array() { return std::get<Array>(data); }
  Array const& array() const { return std::get<Array>(data); }

  std::string_view type_name() const {
    static constexpr std::string_view names[] = {"boolean", "integer", "float", "string", "array", "table"};
    return names[data.index()];
  }
};

inline Value* Table::find(std::string_view key) {
  for (auto& [k, v] : entries_) {
    if (k == key) return &v;
  }
  return nullptr;
}

inline Value const* Table::find(std::string_view key) const {
  for (auto const& [k, v] : entries_) {
    if (k == key) return &v;
  }
  return nullptr;
}

inline Value& Table::insert(std::string key, Value v) {
  entries_.emplace_back(std::move(key), std::move(v));
  return entries_.back().second;
}

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Table parse() {
    Value root{Table{}, {}, Origin::Header};
    Table* current = &root.table();
    while (true) {
      skip_ws_comments_newlines();
      if (eof()) break;
      if (peek() == '[') {
        current = parse_header(root.table());
      } else {
        parse_keyval(*current);
      }
      expect_line_end();
    }
    return std::move(root.table());
  }

 private:
  bool eof() const { return i_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const { return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0'; }

  SourcePos pos() const { return {line_, col_}; }

  char get() {
    char const c = text_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  [[noreturn]] void fail(std::string const& what) const { throw ParseError(pos(), what); }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) get();
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') get();
    }
  }

  void skip_ws_comments_newlines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n') {
        get();
      } else if (peek() == '\r' && peek(1) == '\n') {
        get();
        get();
      } else {
        break;
      }
    }
  }

  void expect_line_end() {
    skip_ws();
    skip_comment();
    if (eof()) return;
    if (peek() == '\n') {
      get();
      return;
    }
    if (peek() == '\r' && peek(1) == '\n') {
      get();
      get();
      return;
    }
    fail(std::string("expected end of line, found '") + peek() + "'");
  }

  static bool bare_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  }

  std::string parse_simple_key() {
    if (peek() == '"') return parse_basic_string();
    if (peek() == '\'') return parse_literal_string();
    std::string key;
    while (!eof() && bare_char(peek())) key.push_back(get());
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::pair<std::string, SourcePos>> parse_key() {
    std::vector<std::pair<std::string, SourcePos>> parts;
    while (true) {
      skip_ws();
      SourcePos const p = pos();
      parts.emplace_back(parse_simple_key(), p);
      skip_ws();
      if (peek() != '.') break;
      get();
    }
    return parts;
  }

  static std::string join(std::vector<std::pair<std::string, SourcePos>> const& parts, std::size_t n) {
    std::string s;
    for (std::size_t k = 0; k < n; ++k) {
      if (k) s += '.';
      s += parts[k].first;
    }
    return s;
  }

  // Descends into (or creates) an intermediate table along a header path.
  Table* descend(Table* t, std::string const& key, SourcePos p, std::string const& path) {
    Value* v = t->find(key);
    if (v == nullptr) return &t->insert(key, Value{Table{}, p, Origin::Implicit}).table();
    if (v->is_table()) {
      if (v->origin == Origin::Value) throw ParseError(p, "cannot extend inline table '" + path + "'");
      return &v->table();
    }
    if (v->is_array() && v->origin == Origin::ArrayOfTables) return &v->array().back().table();
    throw ParseError(p, "key '" + path + "' is not a table");
  }

  Table* parse_header(Table& root) {
    SourcePos const start = pos();
    get();  // '['
    bool const array = peek() == '[';
    if (array) get();
    auto parts = parse_key();
    if (get_if(']') == false) fail("expected ']' to close table header");
    if (array && get_if(']') == false) fail("expected ']]' to close array-of-tables header");

    Table* t = &root;
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
      t = descend(t, parts[k].first, parts[k].second, join(parts, k + 1));
    }
    auto const& [last, lpos] = parts.back();
    std::string const path = join(parts, parts.size());
    Value* v = t->find(last);
    if (array) {
      if (v == nullptr) v = &t->insert(last, Value{Array{}, start, Origin::ArrayOfTables});
      if (!v->is_array() || v->origin != Origin::ArrayOfTables) {
        throw ParseError(start, "key '" + path + "' is not an array of tables");
      }
      v->array().push_back(Value{Table{}, start, Origin::Header});
      return &v->array().back().table();
    }
    if (v == nullptr) return &t->insert(last, Value{Table{}, start, Origin::Header}).table();
    if (v->is_table() && v->origin == Origin::Implicit) {
      v->origin = Origin::Header;
      return &v->table();
    }
    throw ParseError(start, "duplicate definition of table '" + path + "'");
  }

  bool get_if(char c) {
    if (peek() != c) return false;
    get();
    return true;
  }

  void parse_keyval(Table& table) {
    auto parts = parse_key();
    skip_ws();
    if (!get_if('=')) fail("expected '=' after key '" + join(parts, parts.size()) + "'");
    skip_ws();
    Value value = parse_value();
    Table* t = &table;
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
      Value* v = t->find(parts[k].first);
      if (v == nullptr) {
        t = &t->insert(parts[k].first, Value{Table{}, parts[k].second, Origin::Implicit}).table();
      } else if (v->is_table() && v->origin == Origin::Implicit) {
        t = &v->table();
      } else {
        throw ParseError(parts[k].second, "key '" + join(parts, k + 1) + "' is already defined");
      }
    }
    auto const& [last, lpos] = parts.back();
    if (t->find(last) != nullptr) throw ParseError(lpos, "duplicate key '" + join(parts, parts.size()) + "'");
    t->insert(last, std::move(value));
  }

  Value parse_value() {
    SourcePos const p = pos();
    char const c = peek();
    if (c == '"') {
      if (peek(1) == '"' && peek(2) == '"') fail("multi-line strings are not supported");
      return Value{parse_basic_string(), p};
    }
    if (c == '\'') {
      if (peek(1) == '\'' && peek(2) == '\'') fail("multi-line strings are not supported");
      return Value{parse_literal_string(), p};
    }
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    if (text_.substr(i_, 4) == "true" && !bare_char(peek(4))) {
      for (int k = 0; k < 4; ++k) get();
      return Value{true, p};
    }
    if (text_.substr(i_, 5) == "false" && !bare_char(peek(5))) {
      for (int k = 0; k < 5; ++k) get();
      return Value{false, p};
    }
    return parse_number();
  }

  Value parse_number() {
    SourcePos const p = pos();
    std::string tok;
    while (!eof() && (bare_char(peek()) || peek() == '+' || peek() == '.' || peek() == ':')) tok.push_back(get());
    if (tok.empty()) throw ParseError(p, "expected a value");
    std::string_view body = tok;
    bool neg = false;
    if (body.front() == '+' || body.front() == '-') {
      neg = body.front() == '-';
      body.remove_prefix(1);
    }
    if (body == "inf") return Value{neg ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity(), p};
    if (body == "nan") return Value{std::numeric_limits<double>::quiet_NaN(), p};
    if (tok.find(':') != std::string::npos) throw ParseError(p, "date/time values are not supported");
    std::string clean;
    for (std::size_t k = 0; k < tok.size(); ++k) {
      if (tok[k] == '_') {
        bool const ok = k > 0 && k + 1 < tok.size() && std::isdigit(static_cast<unsigned char>(tok[k - 1])) &&
                        std::isdigit(static_cast<unsigned char>(tok[k + 1]));
        if (!ok) throw ParseError(p, "misplaced '_' in number '" + tok + "'");
        continue;
      }
      clean.push_back(tok[k]);
    }
    bool const is_float = clean.find_first_of(".eE") != std::string::npos;
    char const* first = clean.data();
    char const* last = clean.data() + clean.size();
    if (*first == '+') ++first;
    if (is_float) {
      double d = 0;
      auto [ptr, ec] = std::from_chars(first, last, d);
      if (ec != std::errc() || ptr != last) throw ParseError(p, "invalid float '" + tok + "'");
      return Value{d, p};
    }
    std::int64_t n = 0;
    auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec == std::errc::result_out_of_range) throw ParseError(p, "integer out of range '" + tok + "'");
    if (ec != std::errc() || ptr != last) throw ParseError(p, "invalid value '" + tok + "'");
    std::string_view digits = std::string_view(first, last - first);
    if (!digits.empty() && (digits.front() == '-')) digits.remove_prefix(1);
    if (digits.size() > 1 && digits.front() == '0') throw ParseError(p, "leading zeros in '" + tok + "'");
    return Value{n, p};
  }

  std::string parse_literal_string() {
    get();  // '
    std::string s;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char const c = get();
      if (c == '\'') break;
      s.push_back(c);
    }
    return s;
  }

  static void append_utf8(std::string& s, std::uint32_t cp) {
    if (cp < 0x80) {
      s.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      s.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      s.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      s.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      s.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  std::string parse_basic_string() {
    get();  // "
    std::string s;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char const c = get();
      if (c == '"') break;
      if (c != '\\') {
        s.push_back(c);
        continue;
      }
      if (eof()) fail("unterminated escape");
      char const e = get();
      switch (e) {
        case '"': s.push_back('"'); break;
        case '\\': s.push_back('\\'); break;
        case 'b': s.push_back('\b'); break;
        case 'f': s.push_back('\f'); break;
        case 'n': s.push_back('\n'); break;
        case 'r': s.push_back('\r'); break;
        case 't': s.push_back('\t'); break;
        case 'u':
        case 'U': {
          int const n = e == 'u' ? 4 : 8;
          std::uint32_t cp = 0;
          for (int k = 0; k < n; ++k) {
            if (eof()) fail("truncated unicode escape");
            char const h = get();
            cp <<= 4;
            if (h >= '0' && h <= '9') cp |= static_cast<std::uint32_t>(h - '0');
            else if (h >= 'a' && h <= 'f') cp |= static_cast<std::uint32_t>(h - 'a' + 10);
            else if (h >= 'A' && h <= 'F') cp |= static_cast<std::uint32_t>(h - 'A' + 10);
            else fail("invalid unicode escape");
          }
          append_utf8(s, cp);
          break;
        }
        default: fail(std::string("invalid escape '\\") + e + "'");
      }
    }
    return s;
  }

  Value parse_array() {
    SourcePos const p = pos();
    get();  // [
    Array items;
    while (true) {
      skip_ws_comments_newlines();
      if (get_if(']')) break;
      items.push_back(parse_value());
      skip_ws_comments_newlines();
      if (get_if(',')) continue;
      if (get_if(']')) break;
      fail("expected ',' or ']' in array");
    }
    return Value{std::move(items), p};
  }

  Value parse_inline_table() {
    SourcePos const p = pos();
    get();  // {
    Value v{Table{}, p, Origin::Value};
    skip_ws();
    if (get_if('}')) return v;
    while (true) {
      parse_keyval(v.table());
      skip_ws();
      if (get_if(',')) {
        skip_ws();
        continue;
      }
      if (get_if('}')) break;
      fail("expected ',' or '}' in inline table");
    }
    return v;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace detail

inline Table parse(std::string_view text) { return detail::Parser(text).parse(); }

inline Table parse_file(std::string const& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (ParseError const& e) {
    throw ParseError(e.where(), path + ": " + std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
  }
}

/// Strict accessor over one table: every key must be read, or finish() fails.
class Reader {
 public:
  Reader(Table const& t, std::string path) : table_(&t), path_(std::move(path)) {}

  std::string const& path() const { return path_; }
  bool has(std::string_view key) const { return table_->find(key) != nullptr; }

  std::string field(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }

  Value const* raw(std::string_view key) {
    used_.insert(std::string(key));
    return table_->find(key);
  }

  template <typename T>
  std::optional<T> optional(std::string_view key) {
    Value const* v = raw(key);
    if (v == nullptr) return std::nullopt;
    return convert<T>(*v, field(key));
  }

  template <typename T>
  T required(std::string_view key) {
    Value const* v = raw(key);
    if (v == nullptr) throw ConfigError(field(key) + " is required");
    return convert<T>(*v, field(key));
  }

  template <typename T>
  T get_or(std::string_view key, T fallback) {
    auto v = optional<T>(key);
    return v ? *v : fallback;
  }

  /// Sub-table reader; nullopt when the key is absent.
  std::optional<Reader> table(std::string_view key) {
    Value const* v = raw(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_table()) throw ConfigError(field(key) + " must be a table");
    return Reader(v->table(), field(key));
  }

  /// Readers over an array of tables (header or inline form).
  std::vector<Reader> tables(std::string_view key) {
    std::vector<Reader> out;
    Value const* v = raw(key);
    if (v == nullptr) return out;
    if (!v->is_array()) throw ConfigError(field(key) + " must be an array of tables");
    auto const& arr = v->array();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string const where = field(key) + "[" + std::to_string(i) + "]";
      if (!arr[i].is_table()) throw ConfigError(where + " must be a table");
      out.emplace_back(arr[i].table(), where);
    }
    return out;
  }

  void finish() const {
    for (auto const& [k, v] : *table_) {
      if (!used_.contains(k)) {
        throw ConfigError("unknown key '" + field(k) + "' (line " + std::to_string(v.pos.line) + ")");
      }
    }
  }

  template <typename T>
  static T convert(Value const& v, std::string const& name) {
    if constexpr (std::is_same_v<T, double>) {
      if (auto const* d = std::get_if<double>(&v.data)) return *d;
      if (auto const* i = std::get_if<std::int64_t>(&v.data)) return static_cast<double>(*i);
      throw ConfigError(name + " must be a number, found " + std::string(v.type_name()));
    } else if constexpr (std::is_same_v<T, std::int64_t>) {
      if (auto const* i = std::get_if<std::int64_t>(&v.data)) return *i;
      throw ConfigError(name + " must be an integer, found " + std::string(v.type_name()));
    } else if constexpr (std::is_same_v<T, bool>) {
      if (auto const* b = std::get_if<bool>(&v.data)) return *b;
      throw ConfigError(name + " must be a boolean, found " + std::string(v.type_name()));
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (auto const* s = std::get_if<std::string>(&v.data)) return *s;
      throw ConfigError(name + " must be a string, found " + std::string(v.type_name()));
    } else if constexpr (std::is_same_v<T, Array>) {
      if (auto const* a = std::get_if<Array>(&v.data)) return *a;
      throw ConfigError(name + " must be an array, found " + std::string(v.type_name()));
    } else {
      static_assert(sizeof(T) == 0, "unsupported TOML conversion");
    }
  }

 private:
  Table const* table_;
  std::string path_;
  std::set<std::string> used_;
};

// --- writing --------------------------------------------------------------------

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out += '"';
  return out;
}

/// Shortest representation that reads back to the same double.
inline std::string format_float(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace ndsim::toml

#endif  // NDSIM_TOML_HPP
