#include "papevo/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace papevo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_number(const std::string& text) {
  const std::string s = trim(text);
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  double x = 0.0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), x);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || std::isnan(x)) {
    throw ConfigError("not a number: '" + s + "'");
  }
  return x;
}

Config Config::parse(std::istream& is) {
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (c.values_.count(key)) throw ConfigError("duplicate key '" + key + "'");
    c.values_[key] = value;
  }
  return c;
}

Config Config::parse_string(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

Config Config::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  return parse(is);
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  try {
    return parse_number(get(key));
  } catch (const ConfigError& e) {
    if (!has(key)) throw;
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

double Config::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
  const double x = get_double(key);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError("key '" + key + "' must be an integer");
  return static_cast<int>(x);
}

int Config::get_int_or(const std::string& key, int fallback) const { return has(key) ? get_int(key) : fallback; }

bool Config::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("key '" + key + "' must be true or false");
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  if (out.empty()) throw ConfigError("key '" + key + "' must list at least one number");
  return out;
}

void Config::reject_unknown(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "'");
  }
}

}  // namespace papevo
