#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace dtlab {

// Flat key-value configuration with [section] headers. Keys are exposed
// flattened as "section.key". '#' and ';' start comments. Getter calls mark
// keys as consumed; unconsumed keys are surfaced so scenarios can reject
// misspellings instead of silently ignoring them.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin = "<config>");

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Whitespace-separated list of numbers.
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  // Keys never touched by any getter, in file order.
  std::vector<std::string> unused_keys() const;
  const std::string& origin() const { return origin_; }
  int line_of(const std::string& key) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
    int order = 0;
    mutable bool used = false;
  };
  [[noreturn]] void fail_key(const std::string& key, const std::string& what) const;
  const Entry* find(const std::string& key) const;
  const Entry& need(const std::string& key) const;

  std::string origin_;
  std::map<std::string, Entry> entries_;
};

}  // namespace dtlab
