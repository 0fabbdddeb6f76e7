#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cvdyn::config {

// A small TOML subset: [table] and [table.sub] headers, key = value pairs,
// '#' comments. Values are strings ("..."), booleans, numbers (integers or
// floats, '_' separators allowed) and arrays of numbers or of strings, which
// may span several lines. Keys are addressed by their dotted path, e.g.
// "protocol.cycles".
struct Scalar {
  enum class Kind { boolean, number, string };
  Kind kind = Kind::number;
  bool boolean = false;
  double number = 0.0;
  std::string text;  // string value, or the literal spelling of a number
};

struct Entry {
  std::vector<Scalar> items;  // one item unless is_array
  bool is_array = false;
  int line = 0;
};

class Document {
 public:
  static Document parse(std::string_view text);
  /// Reads and parses a file; ConfigError if it cannot be opened.
  static Document load(const std::string& path);

  bool has(const std::string& key) const;
  /// True when any key lives under `table` (or the table header was given).
  bool has_table(const std::string& table) const;
  int line_of(const std::string& key) const;

  double number(const std::string& key) const;
  std::optional<double> optional_number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  long long integer_or(const std::string& key, long long fallback) const;
  std::uint64_t unsigned_or(const std::string& key, std::uint64_t fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;
  std::string string(const std::string& key) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  /// Array of numbers; a scalar number is accepted as a one-element list.
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::string> strings(const std::string& key) const;

  /// Keys never read through an accessor, in file order. Used to reject typos.
  std::vector<std::string> unused_keys() const;

  const std::string& source() const { return source_; }
  /// FNV-1a 64 of the source text.
  std::uint64_t hash() const;

 private:
  const Entry& require(const std::string& key) const;
  const Entry* find(const std::string& key) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  std::vector<std::string> tables_;
  mutable std::map<std::string, bool> used_;
};

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace cvdyn::config
