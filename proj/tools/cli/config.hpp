#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "phm/mpemba.hpp"

namespace phm::cli {

struct ConfigIssue {
  std::string key;  // "section.key" or "section"
  std::string message;
};

/// Schema violations found while reading a config file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct ParsedConfig {
  ExperimentConfig config;
  /// Absolute paths of table files keyed by "section.key".
  std::map<std::string, std::string> files;
};

/// Reads the INI-style experiment config. Relative file paths are resolved
/// against `base_dir`. Throws ConfigError listing every violation.
ParsedConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ParsedConfig parse_config_file(const std::filesystem::path& path);

/// Canonical INI text that parse_config reads back to an equal config.
std::string echo_config(const ParsedConfig& parsed);

}  // namespace phm::cli
