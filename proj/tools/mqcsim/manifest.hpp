#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mqcsim::cli {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// ISO 8601 UTC timestamp with seconds.
std::string utc_now();

struct ManifestEntry {
  std::string name;
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct SeedStream {
  std::string purpose;
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
};

/// Record of one run. The manifest itself is written last, after every
/// listed file is closed, so its digests describe the final bytes.
struct RunManifest {
  std::string tool = "mqcsim";
  std::string version;
  std::string command;
  std::string config;  // canonical resolved config text
  std::uint64_t root_seed = 0;
  std::vector<SeedStream> streams;
  std::string started;
  std::string finished;
  std::vector<ManifestEntry> files;

  /// Hashes `dir / name` and appends it to the file list.
  void add_file(const std::filesystem::path& dir, const std::string& name);
  /// Writes manifest.json into `dir`.
  void write(const std::filesystem::path& dir) const;
};

}  // namespace mqcsim::cli
