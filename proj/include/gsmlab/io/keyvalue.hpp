#pragma once

// Flat `key = value` files: one assignment per line, `#` starts a comment,
// values may be double-quoted. Keys must be unique.

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsmlab::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  // Throws on any key outside `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

// Locale-independent number parsing; the whole string must be consumed.
double parse_double(const std::string& text);
long long parse_int(const std::string& text);
std::vector<std::string> split_list(const std::string& text, char sep = ',');

}  // namespace gsmlab::io
