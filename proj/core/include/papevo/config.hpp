#pragma once

#include <istream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace papevo {

/// Invalid, missing or unknown configuration keys.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// key=value text, one key per line, '#' starts a comment.
class Config {
 public:
  static Config parse(std::istream& is);
  static Config parse_string(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int_or(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key) const;
  /// Comma separated numbers.
  std::vector<double> get_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Throws ConfigError naming the first key not in `allowed`.
  void reject_unknown(const std::set<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Locale-independent number parsing ("inf" accepted).
double parse_number(const std::string& text);

}  // namespace papevo
