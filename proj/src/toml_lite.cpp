#include "hpsens/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "hpsens/error.hpp"

namespace hps {

namespace {

using Json = nlohmann::ordered_json;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Json parse() {
    Json root = Json::object();
    Json* current = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        current = &parse_header(root);
      } else {
        parse_key_value(*current);
      }
      expect_line_end();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::InvalidArgument, "TOML line " + std::to_string(line_) + ": " + what);
  }

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }
  char get() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_inline_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        get();
        continue;
      }
      break;
    }
  }

  // Whitespace, newlines and comments, as allowed inside arrays.
  void skip_any_space() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        get();
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  void expect_line_end() {
    skip_inline_space();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail(std::string("unexpected character '") + peek() + "'");
    get();
  }

  std::string parse_basic_string() {
    get();  // opening quote
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = get();
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("unterminated escape");
        const char e = get();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '\\': out += '\\'; break;
          case '"': out += '"'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string parse_simple_key() {
    skip_inline_space();
    if (peek() == '"') return parse_basic_string();
    std::string key;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
        key += c;
        ++pos_;
      } else {
        break;
      }
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::string> parse_dotted_key() {
    std::vector<std::string> parts{parse_simple_key()};
    skip_inline_space();
    while (peek() == '.') {
      ++pos_;
      parts.push_back(parse_simple_key());
      skip_inline_space();
    }
    return parts;
  }

  Json& descend(Json& node, const std::string& key) {
    Json* target = &node;
    if (target->is_array()) {
      if (target->empty()) fail("empty array of tables");
      target = &target->back();
    }
    if (!target->is_object()) fail("key '" + key + "' is not a table");
    if (!target->contains(key)) (*target)[key] = Json::object();
    Json& child = (*target)[key];
    if (child.is_array() && !child.empty() && child.back().is_object()) return child.back();
    return child;
  }

  Json& parse_header(Json& root) {
    get();
    const bool array_of_tables = peek() == '[';
    if (array_of_tables) get();
    auto path = parse_dotted_key();
    if (peek() != ']') fail("expected ']'");
    get();
    if (array_of_tables) {
      if (peek() != ']') fail("expected ']]'");
      get();
    }
    Json* node = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) node = &descend(*node, path[i]);
    const std::string& last = path.back();
    if (array_of_tables) {
      Json& arr = (*node)[last];
      if (arr.is_null()) arr = Json::array();
      if (!arr.is_array()) fail("'" + last + "' is not an array of tables");
      arr.push_back(Json::object());
      return arr.back();
    }
    Json& table = (*node)[last];
    if (table.is_null()) table = Json::object();
    if (!table.is_object()) fail("'" + last + "' redefined as a table");
    return table;
  }

  void parse_key_value(Json& table) {
    auto path = parse_dotted_key();
    skip_inline_space();
    if (peek() != '=') fail("expected '='");
    ++pos_;
    skip_inline_space();
    Json value = parse_value();
    Json* node = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      Json& child = (*node)[path[i]];
      if (child.is_null()) child = Json::object();
      if (!child.is_object()) fail("'" + path[i] + "' is not a table");
      node = &child;
    }
    if (node->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*node)[path.back()] = std::move(value);
  }

  Json parse_value() {
    const char c = peek();
    if (c == '"') {
      if (text_.substr(pos_, 3) == "\"\"\"") fail("multi-line strings are not supported");
      return parse_basic_string();
    }
    if (c == '\'') fail("literal strings are not supported");
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    return parse_scalar();
  }

  Json parse_array() {
    get();
    Json arr = Json::array();
    while (true) {
      skip_any_space();
      if (peek() == ']') {
        get();
        break;
      }
      arr.push_back(parse_value());
      skip_any_space();
      if (peek() == ',') {
        get();
        continue;
      }
      if (peek() == ']') {
        get();
        break;
      }
      fail("expected ',' or ']' in array");
    }
    return arr;
  }

  Json parse_inline_table() {
    get();
    Json table = Json::object();
    skip_inline_space();
    if (peek() == '}') {
      get();
      return table;
    }
    while (true) {
      parse_key_value(table);
      skip_inline_space();
      if (peek() == ',') {
        get();
        skip_inline_space();
        continue;
      }
      if (peek() == '}') {
        get();
        break;
      }
      fail("expected ',' or '}' in inline table");
    }
    return table;
  }

  Json parse_scalar() {
    std::string token;
    while (!eof()) {
      const char c = peek();
      if (c == ',' || c == ']' || c == '}' || c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#') break;
      token += c;
      ++pos_;
    }
    if (token.empty()) fail("expected a value");
    if (token == "true") return true;
    if (token == "false") return false;
    std::string digits;
    for (char c : token)
      if (c != '_') digits += c;
    std::string_view body = digits;
    const bool negative = !body.empty() && body.front() == '-';
    if (!body.empty() && (body.front() == '+' || body.front() == '-')) body.remove_prefix(1);
    if (body == "inf") return negative ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
    const bool is_float = body.find_first_of(".eE") != std::string_view::npos;
    if (!is_float) {
      std::int64_t v = 0;
      auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
      if (ec == std::errc() && end == body.data() + body.size()) return negative ? -v : v;
    } else {
      double v = 0;
      auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
      if (ec == std::errc() && end == body.data() + body.size()) return negative ? -v : v;
    }
    fail("cannot parse value '" + token + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace

nlohmann::ordered_json parse_toml_lite(std::string_view text) { return Parser(text).parse(); }

}  // namespace hps
