#pragma once

#include <map>
#include <string>
#include <vector>

#include "mqcsim/experiments.hpp"

namespace mqcsim::cli {

/// Raw key-value view of a config file.
///
/// Grammar, one item per line:
///   # comment            (also ';')
///   [section]
///   key = value          (key is stored as "section.key")
/// Lists are comma separated; integer lists also accept start:stop:step
/// ranges with an inclusive stop. Later duplicates are an error.
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& source);
  static ConfigFile load(const std::string& path);

  /// Applies "section.key=value"; overrides may introduce keys absent from
  /// the file.
  void set(const std::string& assignment);

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) > 0; }
  [[nodiscard]] const std::string& raw(const std::string& key) const;
  /// "source:line" for a key read from the file, "--set" for overrides.
  [[nodiscard]] std::string where(const std::string& key) const;
  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }
  [[nodiscard]] const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

/// Fully resolved run configuration.
struct RunConfig {
  ExperimentConfig experiment;
  std::string output = "mqcsim-out";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Resolves defaults and checks types. Unknown keys, malformed values and
/// missing required keys throw Error(config) naming the key and location.
/// geometry.kind and geometry.sites are always required.
RunConfig resolve(const ConfigFile& file, const std::vector<std::string>& required = {});

/// Canonical text of a resolved config: every key, sections and keys in a
/// fixed order, full-precision numbers. Parsing it resolves to an equal
/// RunConfig.
std::string echo(const RunConfig& cfg);

/// Integer list with optional start:stop:step ranges, e.g. "0:10:2, 15".
std::vector<long> parse_long_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace mqcsim::cli
