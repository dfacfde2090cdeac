#pragma once

#include <cctype>
#include <charconv>
#include <json.hpp>
#include <string>
#include <string_view>

#include "whitmod/errors.hpp"
#include "whitmod/io.hpp"

namespace whitmod {

// Minimal TOML-subset reader producing ordered JSON.  Supported: `key =
// value` pairs, `[section]` and `[a.b]` table headers, strings with basic
// escapes, integers, floats, booleans, single-line (possibly nested) arrays,
// and `#` comments.  Not supported: inline tables, multi-line strings or
// arrays, dates.  That subset covers every config this tool reads; JSON is
// accepted everywhere a config is, for anything fancier.

namespace detail_toml {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
  }
  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void skip_inline_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
};

inline bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

inline std::string parse_basic_string(Cursor& cur) {
  ++cur.pos;  // opening quote
  std::string out;
  while (true) {
    if (cur.done() || cur.peek() == '\n') cur.fail("unterminated string");
    char c = cur.text[cur.pos++];
    if (c == '"') return out;
    if (c == '\\') {
      if (cur.done()) cur.fail("unterminated escape");
      const char e = cur.text[cur.pos++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: cur.fail(std::string("unsupported escape '\\") + e + "'");
      }
    } else {
      out += c;
    }
  }
}

inline Json parse_value(Cursor& cur);

inline Json parse_array(Cursor& cur) {
  ++cur.pos;  // '['
  Json arr = Json::array();
  cur.skip_inline_ws();
  if (!cur.done() && cur.peek() == ']') {
    ++cur.pos;
    return arr;
  }
  while (true) {
    cur.skip_inline_ws();
    if (cur.done() || cur.peek() == '\n') cur.fail("unterminated array");
    arr.push_back(parse_value(cur));
    cur.skip_inline_ws();
    if (cur.done() || cur.peek() == '\n') cur.fail("unterminated array");
    const char c = cur.text[cur.pos++];
    if (c == ']') return arr;
    if (c != ',') cur.fail("expected ',' or ']' in array");
  }
}

inline Json parse_number(Cursor& cur) {
  const std::size_t start = cur.pos;
  while (!cur.done()) {
    const char c = cur.peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
        c == '.' || c == 'e' || c == 'E') {
      ++cur.pos;
    } else {
      break;
    }
  }
  std::string_view token = cur.text.substr(start, cur.pos - start);
  if (token.empty()) cur.fail("expected a value");
  // from_chars accepts a leading '-' but not '+'.
  const std::string_view parse_token =
      token.front() == '+' ? token.substr(1) : token;
  bool integral = true;
  for (std::size_t i = 0; i < token.size(); ++i) {
    const char c = token[i];
    if (c == '+' || c == '-') {
      if (i != 0) integral = false;
    } else if (!std::isdigit(static_cast<unsigned char>(c))) {
      integral = false;
    }
  }
  const char* first = parse_token.data();
  const char* last = parse_token.data() + parse_token.size();
  if (integral) {
    long long v = 0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
      cur.fail("bad integer '" + std::string(token) + "'");
    }
    return Json(v);
  }
  double v = 0.0;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    cur.fail("bad number '" + std::string(token) + "'");
  }
  return Json(v);
}

inline Json parse_value(Cursor& cur) {
  if (cur.done()) cur.fail("expected a value");
  const char c = cur.peek();
  if (c == '"') return Json(parse_basic_string(cur));
  if (c == '[') return parse_array(cur);
  if (cur.text.compare(cur.pos, 4, "true") == 0 &&
      (cur.pos + 4 >= cur.text.size() ||
       !is_bare_key_char(cur.text[cur.pos + 4]))) {
    cur.pos += 4;
    return Json(true);
  }
  if (cur.text.compare(cur.pos, 5, "false") == 0 &&
      (cur.pos + 5 >= cur.text.size() ||
       !is_bare_key_char(cur.text[cur.pos + 5]))) {
    cur.pos += 5;
    return Json(false);
  }
  return parse_number(cur);
}

// Strip a trailing comment, respecting '#' inside quoted strings.
inline std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (c == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace detail_toml

inline Json parse_toml(const std::string& text) {
  using namespace detail_toml;
  Json root = Json::object();
  Json* table = &root;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::size_t end = eol == std::string::npos ? text.size() : eol;
    std::string_view raw(text.data() + pos, end - pos);
    pos = end + 1;
    ++lineno;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) {
      if (eol == std::string::npos) break;
      continue;
    }

    Cursor cur{line, 0, lineno};
    if (line.front() == '[') {
      if (line.back() != ']') cur.fail("expected ']' closing the table header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) cur.fail("empty table name");
      table = &root;
      std::size_t start = 0;
      while (true) {
        const std::size_t dot = name.find('.', start);
        const std::string_view part =
            trim(name.substr(start, dot == std::string_view::npos
                                        ? std::string_view::npos
                                        : dot - start));
        if (part.empty()) cur.fail("empty table name component");
        for (const char c : part) {
          if (!is_bare_key_char(c)) {
            cur.fail("bad character in table name '" + std::string(part) + "'");
          }
        }
        Json& slot = (*table)[std::string(part)];
        if (slot.is_null()) slot = Json::object();
        if (!slot.is_object()) {
          cur.fail("table '" + std::string(part) + "' collides with a value");
        }
        table = &slot;
        if (dot == std::string_view::npos) break;
        start = dot + 1;
      }
      if (eol == std::string::npos) break;
      continue;
    }

    // key = value
    std::string key;
    if (cur.peek() == '"') {
      key = parse_basic_string(cur);
    } else {
      const std::size_t start = cur.pos;
      while (!cur.done() && is_bare_key_char(cur.peek())) ++cur.pos;
      key = std::string(line.substr(start, cur.pos - start));
    }
    if (key.empty()) cur.fail("expected a key");
    cur.skip_inline_ws();
    if (cur.done() || cur.peek() != '=') cur.fail("expected '=' after key");
    ++cur.pos;
    cur.skip_inline_ws();
    Json value = parse_value(cur);
    cur.skip_inline_ws();
    if (!cur.done()) cur.fail("unexpected trailing content after value");
    if (table->contains(key)) cur.fail("duplicate key '" + key + "'");
    (*table)[key] = std::move(value);
    if (eol == std::string::npos) break;
  }
  return root;
}

// Dispatch on file extension: .toml or .json.
inline Json load_config_text(const std::string& text,
                             const std::string& extension) {
  if (extension == ".toml") return parse_toml(text);
  if (extension == ".json") {
    try {
      return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("bad JSON config: ") + e.what());
    }
  }
  throw ConfigError("unsupported config extension '" + extension +
                    "' (use .toml or .json)");
}

inline Json load_config_file(const std::string& path) {
  const std::size_t dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  return load_config_text(read_text_file(path), ext);
}

}  // namespace whitmod
