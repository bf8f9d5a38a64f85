#include "bsq/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace bsq {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_error(const std::string& source, int line, const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line << ": " << what;
  return msg.str();
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line_no, const std::string& what)
    : std::runtime_error(format_error(source, line_no, what)), line(line_no) {}

ConfigFile ConfigFile::parse(std::istream& in, std::string source) {
  ConfigFile cfg;
  cfg.source_ = std::move(source);
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(cfg.source_, line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(cfg.source_, line_no, "empty section name");
      if (cfg.section_lines_.count(section)) {
        throw ConfigError(cfg.source_, line_no, "duplicate section [" + section + "]");
      }
      cfg.section_lines_[section] = line_no;
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(cfg.source_, line_no, "expected `key = value`");
    if (section.empty()) throw ConfigError(cfg.source_, line_no, "key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(cfg.source_, line_no, "empty key");
    auto& keys = cfg.sections_[section];
    if (keys.count(key)) throw ConfigError(cfg.source_, line_no, "duplicate key `" + key + "`");
    keys[key] = {value, line_no};
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  return parse(in, path);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const ConfigEntry* ConfigFile::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

void ConfigFile::fail(const std::string& section, const std::string& key,
                      const std::string& what) const {
  const ConfigEntry* e = find(section, key);
  throw ConfigError(source_, e ? e->line : 0, "[" + section + "] " + key + ": " + what);
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   std::optional<std::string> fallback) const {
  if (const ConfigEntry* e = find(section, key)) return e->value;
  if (fallback) return *fallback;
  fail(section, key, "missing required key");
}

namespace {

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              std::optional<double> fallback) const {
  const ConfigEntry* e = find(section, key);
  if (!e) {
    if (fallback) return *fallback;
    fail(section, key, "missing required key");
  }
  double v = 0.0;
  if (!parse_number(e->value, v)) fail(section, key, "expected a number, got `" + e->value + "`");
  return v;
}

long long ConfigFile::get_int(const std::string& section, const std::string& key,
                              std::optional<long long> fallback) const {
  const ConfigEntry* e = find(section, key);
  if (!e) {
    if (fallback) return *fallback;
    fail(section, key, "missing required key");
  }
  long long v = 0;
  if (!parse_number(e->value, v)) fail(section, key, "expected an integer, got `" + e->value + "`");
  return v;
}

unsigned long long ConfigFile::get_uint64(const std::string& section, const std::string& key,
                                          std::optional<unsigned long long> fallback) const {
  const ConfigEntry* e = find(section, key);
  if (!e) {
    if (fallback) return *fallback;
    fail(section, key, "missing required key");
  }
  unsigned long long v = 0;
  if (!parse_number(e->value, v)) {
    fail(section, key, "expected an unsigned 64-bit integer, got `" + e->value + "`");
  }
  return v;
}

void ConfigFile::require_known(const std::map<std::string, std::set<std::string>>& schema) const {
  for (const auto& [section, keys] : sections_) {
    const auto s = schema.find(section);
    if (s == schema.end()) {
      throw ConfigError(source_, section_lines_.at(section), "unknown section [" + section + "]");
    }
    for (const auto& [key, entry] : keys) {
      if (!s->second.count(key)) {
        throw ConfigError(source_, entry.line, "unknown key `" + key + "` in [" + section + "]");
      }
    }
  }
}

}  // namespace bsq
