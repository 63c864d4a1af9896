#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace gkm {

/// splitmix64 finalizer; also the work-horse for key derivation and hashing.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2)));
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Splittable counter-based random stream (splitmix64 core).
///
/// Child streams are derived from the construction key alone, never from the
/// draw position, so derivations keyed by (base seed, algorithm name, repeat,
/// round, sample) produce identical values under any parallel schedule.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key), state_(key) {}

  /// Construction key; doubles as the stream fingerprint recorded in traces.
  std::uint64_t key() const { return key_; }

  RngStream child(std::uint64_t tag) const { return RngStream(hash_combine(key_, tag)); }
  RngStream child(std::string_view tag) const { return child(fnv1a(tag)); }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Lemire multiply-shift; bias < n / 2^64.
  std::int64_t uniform_int(std::int64_t n) {
    using u128 = unsigned __int128;
    return static_cast<std::int64_t>(
        (static_cast<u128>(next_u64()) * static_cast<u128>(n)) >> 64);
  }

  /// Standard normal via Box-Muller (two uniforms per call, no cached spare).
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(6.28318530717958647692 * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t state_;
};

}  // namespace gkm
