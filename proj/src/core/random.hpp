#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mocu {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to mix seeds and stream coordinates.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent substream seed from a master seed and a path of
/// coordinates, e.g. (run, iteration, action). Order of coordinates matters.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t c : path) h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(master, path));
}

// Stream tags keep substreams of different purposes apart.
namespace stream {
inline constexpr std::uint64_t kTheta = 0x7468657461ULL;
inline constexpr std::uint64_t kOutcome = 0x6f7574636fULL;
inline constexpr std::uint64_t kEnvironment = 0x656e76ULL;
inline constexpr std::uint64_t kInitial = 0x696e6974ULL;
inline constexpr std::uint64_t kModel = 0x6d6f64656cULL;
inline constexpr std::uint64_t kFit = 0x666974ULL;
}  // namespace stream

}  // namespace mocu
