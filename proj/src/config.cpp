#include "girder/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace girder {

namespace {

struct cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
};

void skip_inline_ws(cursor& c) {
  while (!c.done() && (c.peek() == ' ' || c.peek() == '\t' || c.peek() == '\r')) c.take();
}

void skip_comment(cursor& c) {
  if (!c.done() && c.peek() == '#')
    while (!c.done() && c.peek() != '\n') c.take();
}

// whitespace, comments and newlines between statements
void skip_blank(cursor& c) {
  for (;;) {
    skip_inline_ws(c);
    skip_comment(c);
    if (!c.done() && c.peek() == '\n') {
      c.take();
      continue;
    }
    return;
  }
}

void expect_line_end(cursor& c) {
  skip_inline_ws(c);
  skip_comment(c);
  if (c.done()) return;
  if (c.peek() == '\n') {
    c.take();
    return;
  }
  throw ConfigError(std::string("unexpected trailing characters starting with '") + c.peek() + "'", c.line);
}

bool key_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
}

std::string parse_key(cursor& c) {
  std::string key;
  while (!c.done() && key_char(c.peek())) key += c.take();
  if (key.empty()) throw ConfigError("expected a key", c.line);
  return key;
}

std::string parse_quoted(cursor& c) {
  c.take();  // opening quote
  std::string out;
  for (;;) {
    if (c.done() || c.peek() == '\n') throw ConfigError("unterminated string", c.line);
    char ch = c.take();
    if (ch == '"') return out;
    if (ch == '\\') {
      if (c.done()) throw ConfigError("unterminated escape", c.line);
      char esc = c.take();
      switch (esc) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: throw ConfigError(std::string("unknown escape \\") + esc, c.line);
      }
      continue;
    }
    out += ch;
  }
}

ConfigValue parse_value(cursor& c);

ConfigValue parse_array(cursor& c) {
  ConfigValue v;
  v.kind = ConfigValue::Kind::array;
  v.line = c.line;
  c.take();  // '['
  for (;;) {
    skip_blank(c);  // arrays may span lines
    if (c.done()) throw ConfigError("unterminated array", v.line);
    if (c.peek() == ']') {
      c.take();
      return v;
    }
    v.items.push_back(parse_value(c));
    skip_blank(c);
    if (c.done()) throw ConfigError("unterminated array", v.line);
    if (c.peek() == ',') {
      c.take();
      continue;
    }
    if (c.peek() == ']') {
      c.take();
      return v;
    }
    throw ConfigError("expected ',' or ']' in array", c.line);
  }
}

ConfigValue parse_value(cursor& c) {
  skip_inline_ws(c);
  if (c.done()) throw ConfigError("expected a value", c.line);
  char ch = c.peek();
  ConfigValue v;
  v.line = c.line;
  if (ch == '[') return parse_array(c);
  if (ch == '"') {
    v.kind = ConfigValue::Kind::string;
    v.str = parse_quoted(c);
    return v;
  }
  // bare token: boolean or number
  std::string tok;
  while (!c.done() && c.peek() != '\n' && c.peek() != ',' && c.peek() != ']' &&
         c.peek() != '#' && c.peek() != ' ' && c.peek() != '\t' && c.peek() != '\r')
    tok += c.take();
  if (tok == "true" || tok == "false") {
    v.kind = ConfigValue::Kind::boolean;
    v.boolean = tok == "true";
    return v;
  }
  char* end = nullptr;
  double num = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end == nullptr || *end != '\0')
    throw ConfigError("cannot parse value '" + tok + "'", v.line);
  v.kind = ConfigValue::Kind::number;
  v.number = num;
  return v;
}

ConfigValue* insert_entry(ConfigValue& table, const std::string& key, ConfigValue val, int line) {
  for (auto& [k, existing] : table.entries) {
    (void)existing;
    if (k == key) throw ConfigError("duplicate key '" + key + "'", line);
  }
  table.entries.emplace_back(key, std::move(val));
  return &table.entries.back().second;
}

ConfigValue* subtable(ConfigValue& table, const std::string& key, int line) {
  for (auto& [k, existing] : table.entries) {
    if (k != key) continue;
    if (!existing.is_table())
      throw ConfigError("key '" + key + "' is not a table", line);
    return &existing;
  }
  ConfigValue t;
  t.kind = ConfigValue::Kind::table;
  t.line = line;
  table.entries.emplace_back(key, std::move(t));
  return &table.entries.back().second;
}

}  // namespace

const ConfigValue* ConfigValue::find(const std::string& key) const {
  if (!is_table()) return nullptr;
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

const ConfigValue& ConfigValue::at(const std::string& key) const {
  const ConfigValue* v = find(key);
  if (v == nullptr) throw ConfigError("missing required field '" + key + "'", line);
  return *v;
}

double ConfigValue::as_number() const {
  if (kind != Kind::number) throw ConfigError("expected a number", line);
  return number;
}

std::string ConfigValue::as_string() const {
  if (kind != Kind::string) throw ConfigError("expected a string", line);
  return str;
}

bool ConfigValue::as_bool() const {
  if (kind != Kind::boolean) throw ConfigError("expected a boolean", line);
  return boolean;
}

const std::vector<ConfigValue>& ConfigValue::as_array() const {
  if (kind != Kind::array) throw ConfigError("expected an array", line);
  return items;
}

double ConfigValue::number_or(const std::string& key, double fallback) const {
  const ConfigValue* v = find(key);
  return v == nullptr ? fallback : v->as_number();
}

std::string ConfigValue::string_or(const std::string& key, const std::string& fallback) const {
  const ConfigValue* v = find(key);
  return v == nullptr ? fallback : v->as_string();
}

bool ConfigValue::bool_or(const std::string& key, bool fallback) const {
  const ConfigValue* v = find(key);
  return v == nullptr ? fallback : v->as_bool();
}

ConfigValue parse_config(const std::string& text) {
  ConfigValue root;
  root.kind = ConfigValue::Kind::table;
  root.line = 1;
  ConfigValue* current = &root;

  cursor c{text};
  for (;;) {
    skip_blank(c);
    if (c.done()) return root;
    int line = c.line;
    if (c.peek() == '[') {
      c.take();
      bool array_of_tables = !c.done() && c.peek() == '[';
      if (array_of_tables) c.take();
      skip_inline_ws(c);
      std::string key = parse_key(c);
      ConfigValue* target = &root;
      if (!array_of_tables) {
        skip_inline_ws(c);
        while (!c.done() && c.peek() == '.') {
          c.take();
          target = subtable(*target, key, line);
          skip_inline_ws(c);
          key = parse_key(c);
          skip_inline_ws(c);
        }
      } else {
        skip_inline_ws(c);
      }
      if (c.done() || c.take() != ']') throw ConfigError("expected ']'", line);
      if (array_of_tables) {
        if (c.done() || c.take() != ']') throw ConfigError("expected ']]'", line);
        ConfigValue* arr = nullptr;
        for (auto& [k, v] : target->entries)
          if (k == key) arr = &v;
        if (arr == nullptr) {
          ConfigValue a;
          a.kind = ConfigValue::Kind::array;
          a.line = line;
          arr = insert_entry(*target, key, std::move(a), line);
        } else if (!arr->is_array()) {
          throw ConfigError("key '" + key + "' is not an array of tables", line);
        }
        ConfigValue t;
        t.kind = ConfigValue::Kind::table;
        t.line = line;
        arr->items.push_back(std::move(t));
        current = &arr->items.back();
      } else {
        current = subtable(*target, key, line);
      }
      expect_line_end(c);
      continue;
    }
    std::string key = c.peek() == '"' ? parse_quoted(c) : parse_key(c);
    skip_inline_ws(c);
    if (c.done() || c.take() != '=') throw ConfigError("expected '=' after key '" + key + "'", line);
    ConfigValue val = parse_value(c);
    insert_entry(*current, key, std::move(val), line);
    expect_line_end(c);
  }
}

ConfigValue parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace girder
