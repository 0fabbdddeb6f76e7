#include "cvdyn/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cvdyn/errors.hpp"

namespace cvdyn::config {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

// Drops a trailing comment, ignoring '#' inside strings.
std::string_view strip_comment(std::string_view s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return s.substr(0, i);
    }
  }
  return s;
}

class ValueParser {
 public:
  ValueParser(std::string_view text, int line) : s_(text), line_(line) {}

  Entry parse_entry() {
    Entry entry;
    entry.line = line_;
    skip_space();
    if (peek() == '[') {
      ++pos_;
      entry.is_array = true;
      skip_space();
      while (peek() != ']') {
        entry.items.push_back(parse_scalar());
        skip_space();
        if (peek() == ',') {
          ++pos_;
          skip_space();
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
      ++pos_;
      if (!entry.items.empty()) {
        const auto kind = entry.items.front().kind;
        for (const auto& item : entry.items) {
          if (item.kind != kind) fail("mixed value types in array");
        }
      }
    } else {
      entry.items.push_back(parse_scalar());
    }
    skip_space();
    if (pos_ != s_.size()) fail("unexpected trailing characters");
    return entry;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(what, line_); }

  Scalar parse_scalar() {
    Scalar out;
    if (peek() == '"') {
      ++pos_;
      out.kind = Scalar::Kind::string;
      while (true) {
        if (pos_ >= s_.size()) fail("unterminated string");
        const char c = s_[pos_++];
        if (c == '"') break;
        if (c == '\\') {
          if (pos_ >= s_.size()) fail("unterminated string");
          const char e = s_[pos_++];
          switch (e) {
            case 'n': out.text += '\n'; break;
            case 't': out.text += '\t'; break;
            case '"': out.text += '"'; break;
            case '\\': out.text += '\\'; break;
            default: fail(std::string("unsupported escape \\") + e);
          }
        } else {
          out.text += c;
        }
      }
      return out;
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' &&
           !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
    const std::string token(s_.substr(start, pos_ - start));
    if (token.empty()) fail("missing value");
    if (token == "true" || token == "false") {
      out.kind = Scalar::Kind::boolean;
      out.boolean = token == "true";
      out.text = token;
      return out;
    }
    std::string digits;
    for (std::size_t i = 0; i < token.size(); ++i) {
      if (token[i] != '_') {
        digits += token[i];
      } else if (i == 0 || i + 1 == token.size() || !std::isdigit(static_cast<unsigned char>(token[i - 1])) ||
                 !std::isdigit(static_cast<unsigned char>(token[i + 1]))) {
        fail("misplaced '_' in number '" + token + "'");
      }
    }
    if (digits == "inf" || digits == "+inf" || digits == "-inf" || digits == "nan") {
      fail("non-finite number '" + token + "'");
    }
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(digits.c_str(), &end);
    if (end != digits.c_str() + digits.size() || digits.empty() || errno == ERANGE || !std::isfinite(value)) {
      fail("invalid value '" + token + "' (strings need double quotes)");
    }
    out.kind = Scalar::Kind::number;
    out.number = value;
    out.text = digits;
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

int bracket_balance(std::string_view s) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (!in_string && c == '[') {
      ++depth;
    } else if (!in_string && c == ']') {
      --depth;
    }
  }
  return depth;
}

const char* kind_name(Scalar::Kind kind) {
  switch (kind) {
    case Scalar::Kind::boolean: return "a boolean";
    case Scalar::Kind::number: return "a number";
    case Scalar::Kind::string: return "a string";
  }
  return "a value";
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Document Document::parse(std::string_view text) {
  Document doc;
  doc.source_ = std::string(text);
  std::string table;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.size() < 3 || line.back() != ']' || line[1] == '[') {
        throw ConfigError("malformed table header", line_no);
      }
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      std::size_t begin = 0;
      while (true) {
        const std::size_t dot = name.find('.', begin);
        if (!valid_key(name.substr(begin, dot == std::string_view::npos ? dot : dot - begin))) {
          throw ConfigError("invalid table name '" + std::string(name) + "'", line_no);
        }
        if (dot == std::string_view::npos) break;
        begin = dot + 1;
      }
      table = std::string(name);
      if (std::find(doc.tables_.begin(), doc.tables_.end(), table) != doc.tables_.end()) {
        throw ConfigError("table [" + table + "] defined twice", line_no);
      }
      doc.tables_.push_back(table);
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    // Copied: continuation lines below reuse the buffer `line` points into.
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'", line_no);
    std::string value(trim(line.substr(eq + 1)));
    const int start_line = line_no;
    while (bracket_balance(value) > 0) {
      if (!std::getline(in, raw)) throw ConfigError("unterminated array", start_line);
      ++line_no;
      value += ' ';
      value += std::string(trim(strip_comment(raw)));
    }
    const std::string full = table.empty() ? key : table + "." + key;
    if (doc.entries_.count(full)) throw ConfigError("duplicate key '" + full + "'", start_line);
    doc.entries_[full] = ValueParser(value, start_line).parse_entry();
    doc.order_.push_back(full);
  }
  return doc;
}

Document Document::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const Entry* Document::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  used_[key] = true;
  return &it->second;
}

const Entry& Document::require(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError("missing required key '" + key + "'");
  return *e;
}

bool Document::has(const std::string& key) const { return entries_.count(key) > 0; }

bool Document::has_table(const std::string& table) const {
  if (std::find(tables_.begin(), tables_.end(), table) != tables_.end()) return true;
  const std::string prefix = table + ".";
  return std::any_of(order_.begin(), order_.end(),
                     [&](const std::string& k) { return k.compare(0, prefix.size(), prefix) == 0; });
}

int Document::line_of(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

namespace {

const Scalar& single(const Entry& e, const std::string& key, Scalar::Kind kind) {
  if (e.is_array || e.items.size() != 1) throw ConfigError("'" + key + "' must be a single value", e.line);
  if (e.items.front().kind != kind) {
    throw ConfigError("'" + key + "' must be " + std::string(kind_name(kind)), e.line);
  }
  return e.items.front();
}

}  // namespace

double Document::number(const std::string& key) const {
  return single(require(key), key, Scalar::Kind::number).number;
}

std::optional<double> Document::optional_number(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) return std::nullopt;
  return single(*e, key, Scalar::Kind::number).number;
}

double Document::number_or(const std::string& key, double fallback) const {
  return optional_number(key).value_or(fallback);
}

long long Document::integer(const std::string& key) const {
  const Entry& e = require(key);
  const Scalar& s = single(e, key, Scalar::Kind::number);
  errno = 0;
  char* end = nullptr;
  const long long value = std::strtoll(s.text.c_str(), &end, 10);
  if (end != s.text.c_str() + s.text.size() || errno == ERANGE) {
    throw ConfigError("'" + key + "' must be an integer", e.line);
  }
  return value;
}

long long Document::integer_or(const std::string& key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::uint64_t Document::unsigned_or(const std::string& key, std::uint64_t fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  const Scalar& s = single(*e, key, Scalar::Kind::number);
  errno = 0;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(s.text.c_str(), &end, 10);
  if (s.text.empty() || s.text.front() == '-' || end != s.text.c_str() + s.text.size() || errno == ERANGE) {
    throw ConfigError("'" + key + "' must be a non-negative integer", e->line);
  }
  return value;
}

bool Document::boolean_or(const std::string& key, bool fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  return single(*e, key, Scalar::Kind::boolean).boolean;
}

std::string Document::string(const std::string& key) const {
  return single(require(key), key, Scalar::Kind::string).text;
}

std::string Document::string_or(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  return single(*e, key, Scalar::Kind::string).text;
}

std::vector<double> Document::numbers(const std::string& key) const {
  const Entry& e = require(key);
  std::vector<double> out;
  for (const auto& item : e.items) {
    if (item.kind != Scalar::Kind::number) throw ConfigError("'" + key + "' must hold numbers", e.line);
    out.push_back(item.number);
  }
  return out;
}

std::vector<std::string> Document::strings(const std::string& key) const {
  const Entry& e = require(key);
  std::vector<std::string> out;
  for (const auto& item : e.items) {
    if (item.kind != Scalar::Kind::string) throw ConfigError("'" + key + "' must hold strings", e.line);
    out.push_back(item.text);
  }
  return out;
}

std::vector<std::string> Document::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& key : order_) {
    if (!used_.count(key)) out.push_back(key);
  }
  return out;
}

std::uint64_t Document::hash() const { return fnv1a64(source_); }

}  // namespace cvdyn::config
