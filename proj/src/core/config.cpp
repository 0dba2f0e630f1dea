#include "core/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dtlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Err::Config, "cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw, section;
  int line_no = 0, order = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t cut = raw.find_first_of("#;");
    std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']', Err::Config,
              origin + ":" + std::to_string(line_no) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      require(valid_name(section), Err::Config,
              origin + ":" + std::to_string(line_no) + ": invalid section name '" + section + "'");
      continue;
    }
    const std::size_t eq = line.find('=');
    require(eq != std::string::npos, Err::Config,
            origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(valid_name(key), Err::Config,
            origin + ":" + std::to_string(line_no) + ": invalid key name '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    require(cfg.entries_.find(full) == cfg.entries_.end(), Err::Config,
            origin + ":" + std::to_string(line_no) + ": duplicate key '" + full + "'");
    cfg.entries_[full] = Entry{value, line_no, order++, false};
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

const Config::Entry* Config::find(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  it->second.used = true;
  return &it->second;
}

const Config::Entry& Config::need(const std::string& key) const {
  const Entry* e = find(key);
  require(e != nullptr, Err::Config, origin_ + ": missing required key '" + key + "'");
  return *e;
}

void Config::fail_key(const std::string& key, const std::string& what) const {
  auto it = entries_.find(key);
  const std::string loc =
      it == entries_.end() ? origin_ : origin_ + ":" + std::to_string(it->second.line);
  fail(Err::Config, loc + ": key '" + key + "' " + what);
}

std::string Config::get_string(const std::string& key) const { return need(key).value; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

double Config::get_double(const std::string& key) const {
  const Entry& e = need(key);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (errno != 0 || end == e.value.c_str() || *end != '\0')
    fail_key(key, "is not a number: '" + e.value + "'");
  return v;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  const Entry& e = need(key);
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(e.value.c_str(), &end, 10);
  if (errno != 0 || end == e.value.c_str() || *end != '\0')
    fail_key(key, "is not an integer: '" + e.value + "'");
  return v;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_uint(const std::string& key) const {
  const Entry& e = need(key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
  if (errno != 0 || end == e.value.c_str() || *end != '\0' || e.value.find('-') != std::string::npos)
    fail_key(key, "is not an unsigned integer: '" + e.value + "'");
  return v;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? get_uint(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = need(key).value;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail_key(key, "is not a boolean: '" + need(key).value + "'");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  const Entry& e = need(key);
  std::vector<double> out;
  std::istringstream ss(e.value);
  std::string tok;
  while (ss >> tok) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (errno != 0 || end == tok.c_str() || *end != '\0')
      fail_key(key, "has a non-numeric element: '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) fail_key(key, "is empty");
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key,
                                        const std::vector<double>& fallback) const {
  return has(key) ? get_doubles(key) : fallback;
}

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::pair<int, std::string>> tmp;
  for (const auto& [k, e] : entries_)
    if (!e.used) tmp.emplace_back(e.order, k);
  std::sort(tmp.begin(), tmp.end());
  std::vector<std::string> out;
  out.reserve(tmp.size());
  for (auto& [o, k] : tmp) out.push_back(k);
  return out;
}

int Config::line_of(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

}  // namespace dtlab
