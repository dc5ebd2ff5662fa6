#include "manifest.hpp"

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "mqcsim/error.hpp"

namespace mqcsim::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::invariant, "cannot reopen " + path.string() + " for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx, digest.data(), &length);
  EVP_MD_CTX_free(ctx);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> text{};
  std::strftime(text.data(), text.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return text.data();
}

void RunManifest::add_file(const std::filesystem::path& dir, const std::string& name) {
  const auto path = dir / name;
  files.push_back({name, std::filesystem::file_size(path), sha256_file(path)});
}

void RunManifest::write(const std::filesystem::path& dir) const {
  nlohmann::ordered_json j;
  j["tool"] = tool;
  j["version"] = version;
  j["command"] = command;
  j["config"] = config;
  j["seeds"]["root"] = root_seed;
  j["seeds"]["streams"] = nlohmann::ordered_json::array();
  for (const auto& s : streams) {
    j["seeds"]["streams"].push_back({{"purpose", s.purpose}, {"index", s.index}, {"seed", s.seed}});
  }
  j["started"] = started;
  j["finished"] = finished;
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : files) j["files"].push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorKind::invariant, "failed to write manifest.json");
}

}  // namespace mqcsim::cli
