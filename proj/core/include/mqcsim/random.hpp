#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mqcsim {

/// Derives an independent 64-bit stream seed from (root, purpose, index).
///
/// The label is hashed with FNV-1a and the three words are mixed through
/// SplitMix64 finalizers, so streams for different purposes or indices never
/// depend on how many other streams were drawn. Adding orientations or
/// realizations leaves existing streams untouched.
std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose, std::uint64_t index);

/// Random source with distribution conversions written out explicitly so the
/// drawn values are identical across standard-library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t root, std::string_view purpose, std::uint64_t index)
      : engine_(derive_seed(root, purpose, index)) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (no cached second value).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace mqcsim
