#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace omninav {

// Flat "key = value" config. '#' starts a comment, blank lines are skipped,
// later assignments win. Values keep inner whitespace; keys and values are
// trimmed at the edges.
class KeyValueConfig {
 public:
  static KeyValueConfig from_stream(std::istream& in);
  static KeyValueConfig from_file(const std::filesystem::path& file);

  bool has(const std::string& key) const;
  // Missing key (or unparseable value for the typed getters) throws
  // std::invalid_argument naming the key.
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;  // true/false, 1/0, on/off

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  void set(const std::string& key, const std::string& value);
  std::vector<std::string> keys() const;  // sorted

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace omninav
