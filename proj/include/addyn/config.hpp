#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "addyn/model.hpp"

namespace addyn {

inline constexpr const char* kVersion = "0.1.0";

/// Parsed INI-style run configuration. Keys are stored flat as
/// "section.key"; every key must belong to a known section.
class RunConfig {
 public:
  RunConfig() = default;

  std::map<std::string, std::string> values;
  std::string base_dir = ".";  ///< relative table paths resolve against this

  bool has(const std::string& key) const { return values.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::optional<double> get_optional_double(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { values[key] = value; }

  /// FNV-1a 64-bit hash of the sorted "key=value" lines, as 16 hex digits.
  std::string hash() const;
};

/// Parses INI text; throws ConfigError on syntax errors or unknown keys.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Builds the model from the [model] section.
ModelSpec build_model(const RunConfig& config);

}  // namespace addyn
