#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gevmle {

// splitmix64 finalizer; used to derive independent stream seeds.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for the stream addressed by `path` under `root`, e.g. {cell, replication}.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t root,
                                                  std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix64(root);
  for (auto p : path) s = mix64(s ^ mix64(p + 0x632BE59BD9B4E019ULL));
  return s;
}

/// Deterministic uniform source on the open interval (0, 1).
///
/// mt19937_64 output is fully specified by the standard; the conversion to
/// double is done here rather than through uniform_real_distribution so that
/// streams are identical across standard library implementations.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  double operator()() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gevmle
