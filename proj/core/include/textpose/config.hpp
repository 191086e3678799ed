#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace textpose {

// Flat key/value configuration. Files use `key = value` lines, `#`
// comments, and optional `[section]` headers that prefix following keys
// as "section.key". Later assignments win, so command line overrides can
// be layered on top of a file by just calling set() afterwards.
class ConfigMap {
 public:
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Required variants throw ConfigError when the key is absent.
  std::string require_string(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }
  std::string summary() const;

 private:
  std::map<std::string, std::string> values_;
};

ConfigMap parse_config_text(const std::string& text);
ConfigMap load_config_file(const std::string& path);

}  // namespace textpose
