#pragma once

// Flat key-value configuration with [sections]. Lines are `key = value`;
// `#` starts a comment. Keys and sections are checked against a schema by the
// consumer, and every error carries the offending line number.

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

namespace bsq {

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& source, int line, const std::string& what);
  int line;
};

struct ConfigEntry {
  std::string value;
  int line = 0;
};

class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, std::string source = "<config>");
  static ConfigFile load(const std::string& path);

  const std::string& source() const { return source_; }
  bool has(const std::string& section, const std::string& key) const;
  const ConfigEntry* find(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         std::optional<std::string> fallback = std::nullopt) const;
  double get_double(const std::string& section, const std::string& key,
                    std::optional<double> fallback = std::nullopt) const;
  long long get_int(const std::string& section, const std::string& key,
                    std::optional<long long> fallback = std::nullopt) const;
  unsigned long long get_uint64(const std::string& section, const std::string& key,
                                std::optional<unsigned long long> fallback = std::nullopt) const;

  /// Throws ConfigError for any section or key outside `schema`.
  void require_known(const std::map<std::string, std::set<std::string>>& schema) const;

  /// Error anchored at the line of (section, key), or line 0 if absent.
  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& what) const;

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, ConfigEntry>> sections_;
  std::map<std::string, int> section_lines_;
};

}  // namespace bsq
