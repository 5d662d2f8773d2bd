#include "bitensor/toml.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

namespace bitensor {

namespace {

using nlohmann::json;

class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  json run() {
    json root = json::object();
    json* table = &root;
    for (;;) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        table = header(root);
      } else {
        key_value(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw TomlError(line_, message); }

  bool eof() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }
  char get() {
    const char c = s_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }
  // whitespace, newlines and comments, as allowed inside arrays
  void skip_all() {
    for (;;) {
      skip_spaces();
      skip_comment();
      if (!eof() && (peek() == '\n' || peek() == '\r')) {
        get();
        continue;
      }
      return;
    }
  }
  void skip_blank_lines() { skip_all(); }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail(std::string("unexpected '") + peek() + "' after value");
    get();
  }

  static bool bare_key_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  }

  std::string key_part() {
    skip_spaces();
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    const std::size_t start = pos_;
    while (!eof() && bare_key_char(peek())) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{key_part()};
    skip_spaces();
    while (peek() == '.') {
      ++pos_;
      parts.push_back(key_part());
      skip_spaces();
    }
    return parts;
  }

  json* descend(json& root, const std::vector<std::string>& parts, std::size_t count) {
    json* t = &root;
    for (std::size_t k = 0; k < count; ++k) {
      json& next = (*t)[parts[k]];
      if (next.is_null()) next = json::object();
      if (next.is_array() && !next.empty() && next.back().is_object()) {
        t = &next.back();
      } else if (next.is_object()) {
        t = &next;
      } else {
        fail("key '" + parts[k] + "' is not a table");
      }
    }
    return t;
  }

  json* header(json& root) {
    ++pos_;
    const bool array = peek() == '[';
    if (array) ++pos_;
    const auto parts = dotted_key();
    for (int closing = array ? 2 : 1; closing > 0; --closing) {
      if (peek() != ']') fail("unterminated table header");
      ++pos_;
    }
    json* parent = descend(root, parts, parts.size() - 1);
    json& slot = (*parent)[parts.back()];
    if (array) {
      if (slot.is_null()) slot = json::array();
      if (!slot.is_array()) fail("'" + parts.back() + "' is already defined as a table");
      slot.push_back(json::object());
      return &slot.back();
    }
    if (slot.is_null()) slot = json::object();
    if (!slot.is_object()) fail("'" + parts.back() + "' is already defined");
    return &slot;
  }

  void key_value(json& table) {
    const auto parts = dotted_key();
    if (get() != '=') fail("expected '=' after key");
    json* t = descend(table, parts, parts.size() - 1);
    if (t->contains(parts.back())) fail("duplicate key '" + parts.back() + "'");
    skip_spaces();
    (*t)[parts.back()] = value();
  }

  json value() {
    skip_spaces();
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (c == '{') return inline_table();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number();
  }

  json array() {
    ++pos_;
    json out = json::array();
    for (;;) {
      skip_all();
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      out.push_back(value());
      skip_all();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json inline_table() {
    ++pos_;
    json out = json::object();
    skip_spaces();
    if (peek() == '}') {
      ++pos_;
      return out;
    }
    for (;;) {
      key_value(out);
      skip_spaces();
      const char c = eof() ? '\0' : get();
      if (c == '}') return out;
      if (c != ',') fail("expected ',' or '}' in inline table");
    }
  }

  std::string basic_string() {
    ++pos_;
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated escape");
      switch (const char e = get()) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'u': {
          if (pos_ + 4 > s_.size()) fail("short \\u escape");
          unsigned cp = 0;
          const auto r = std::from_chars(s_.data() + pos_, s_.data() + pos_ + 4, cp, 16);
          if (r.ec != std::errc() || r.ptr != s_.data() + pos_ + 4) fail("bad \\u escape");
          pos_ += 4;
          append_utf8(out, cp);
          break;
        }
        default: fail(std::string("unknown escape '\\") + e + "'");
      }
    }
  }

  static void append_utf8(std::string& out, unsigned cp) {
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
  }

  std::string literal_string() {
    ++pos_;
    const std::size_t start = pos_;
    while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
    if (peek() != '\'') fail("unterminated literal string");
    std::string out(s_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  json number() {
    const std::size_t start = pos_;
    while (!eof() && (bare_key_char(peek()) || peek() == '+' || peek() == '.')) ++pos_;
    std::string tok;
    for (char c : s_.substr(start, pos_ - start)) {
      if (c != '_') tok += c;
    }
    if (tok.empty()) fail("expected a value");
    std::string_view body = tok;
    double sign = 1.0;
    if (body.front() == '+' || body.front() == '-') {
      sign = body.front() == '-' ? -1.0 : 1.0;
      body.remove_prefix(1);
    }
    if (body == "inf") return sign * std::numeric_limits<double>::infinity();
    if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      std::int64_t v = 0;
      const auto r = std::from_chars(body.data(), body.data() + body.size(), v);
      if (r.ec == std::errc() && r.ptr == body.data() + body.size()) return sign < 0 ? -v : v;
    } else {
      double v = 0.0;
      const auto r = std::from_chars(body.data(), body.data() + body.size(), v);
      if (r.ec == std::errc() && r.ptr == body.data() + body.size()) return sign * v;
    }
    fail("invalid value '" + tok + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace

nlohmann::json parse_toml(std::string_view text) { return Reader(text).run(); }

}  // namespace bitensor
