#include "leafattack/cli/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <set>

#include "leafattack/error.hpp"

namespace leafattack::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

class Parser {
 public:
  Parser(const std::string& text, const std::string& source) : s_(text), source_(source) {}

  ordered_json run() {
    ordered_json root = ordered_json::object();
    ordered_json* table = &root;
    while (true) {
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
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Config, source_ + ":" + std::to_string(line_) + ": " + what);
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }
  char take() {
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

  void skip_blank_lines() {
    while (!eof()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        take();
      } else {
        break;
      }
    }
  }

  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    while (!eof()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        take();
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected text after value");
    take();
  }

  std::string bare_or_quoted_key() {
    skip_spaces();
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start) fail("expected a key");
    return s_.substr(start, pos_ - start);
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> parts{bare_or_quoted_key()};
    skip_spaces();
    while (peek() == '.') {
      ++pos_;
      parts.push_back(bare_or_quoted_key());
      skip_spaces();
    }
    return parts;
  }

  ordered_json* header(ordered_json& root) {
    ++pos_;
    const bool array = peek() == '[';
    if (array) ++pos_;
    const auto parts = dotted_key();
    if (peek() != ']') fail("expected ']' to close table header");
    ++pos_;
    if (array) {
      if (peek() != ']') fail("expected ']]' to close array-of-tables header");
      ++pos_;
    }
    std::string path;
    for (const auto& p : parts) path += p + '\x1f';
    if (!array && !defined_tables_.insert(path).second) fail("table '" + parts.back() + "' defined twice");
    ordered_json* node = &root;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const bool last = i + 1 == parts.size();
      ordered_json& child = (*node)[parts[i]];
      if (last && array) {
        if (child.is_null()) child = ordered_json::array();
        if (!child.is_array()) fail("'" + parts[i] + "' is not an array of tables");
        child.push_back(ordered_json::object());
        return &child.back();
      }
      if (child.is_null()) child = ordered_json::object();
      if (child.is_array() && !child.empty() && child.back().is_object()) {
        node = &child.back();
        continue;
      }
      if (!child.is_object()) fail("'" + parts[i] + "' is already a value");
      node = &child;
    }
    return node;
  }

  void key_value(ordered_json& table) {
    const auto parts = dotted_key();
    if (peek() != '=') fail("expected '=' after key");
    ++pos_;
    skip_spaces();
    ordered_json* node = &table;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      ordered_json& child = (*node)[parts[i]];
      if (child.is_null()) child = ordered_json::object();
      if (!child.is_object()) fail("'" + parts[i] + "' is already a value");
      node = &child;
    }
    if (node->contains(parts.back())) fail("duplicate key '" + parts.back() + "'");
    (*node)[parts.back()] = value();
  }

  ordered_json value() {
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (c == '{') fail("inline tables are not supported");
    if (s_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      return true;
    }
    if (s_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      return false;
    }
    return number();
  }

  ordered_json array() {
    ++pos_;
    ordered_json arr = ordered_json::array();
    while (true) {
      skip_array_space();
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(value());
      skip_array_space();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  std::string basic_string() {
    ++pos_;
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = take();
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated escape");
      switch (const char e = take()) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'u': {
          if (pos_ + 4 > s_.size()) fail("short \\u escape");
          unsigned cp = 0;
          const auto res = std::from_chars(s_.data() + pos_, s_.data() + pos_ + 4, cp, 16);
          if (res.ptr != s_.data() + pos_ + 4) fail("bad \\u escape");
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
      out += static_cast<char>(0xc0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    } else {
      out += static_cast<char>(0xe0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
      out += static_cast<char>(0x80 | (cp & 0x3f));
    }
  }

  std::string literal_string() {
    ++pos_;
    const std::size_t end = s_.find_first_of("'\n", pos_);
    if (end == std::string::npos || s_[end] != '\'') fail("unterminated literal string");
    std::string out = s_.substr(pos_, end - pos_);
    pos_ = end + 1;
    return out;
  }

  ordered_json number() {
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                      peek() == '.' || peek() == '_')) {
      ++pos_;
    }
    std::string text;
    for (std::size_t i = start; i < pos_; ++i) {
      if (s_[i] != '_') text += s_[i];
    }
    if (text.empty()) fail("expected a value");
    const bool is_float = text.find_first_of(".eE") != std::string::npos || text == "inf" || text == "nan";
    const char* first = text.data() + (text.front() == '+' ? 1 : 0);
    const char* last = text.data() + text.size();
    if (!is_float) {
      long long v = 0;
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc{} || res.ptr != last) fail("invalid value '" + text + "'");
      return v;
    }
    double v = 0.0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) fail("invalid number '" + text + "'");
    return v;
  }

  const std::string& s_;
  const std::string& source_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::set<std::string> defined_tables_;
};

}  // namespace

nlohmann::ordered_json parse_toml(const std::string& text, const std::string& source) {
  return Parser(text, source).run();
}

}  // namespace leafattack::cli
