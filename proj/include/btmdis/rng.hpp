#pragma once

#include <cstdint>
#include <cstring>
#include <random>

#include <Eigen/Core>

namespace btm {

/// splitmix64 step, used to derive independent child seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  return mix64(mix64(mix64(mix64(base) ^ a) ^ b) ^ c);
}

/// Content hash of a column vector, for per-column RNG streams that follow
/// the column under permutation of the training set.
inline std::uint64_t hash_column(std::uint64_t base, const Eigen::VectorXd& v) {
  std::uint64_t h = mix64(base ^ 0x243f6a8885a308d3ULL);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::uint64_t bits;
    double d = v[i];
    std::memcpy(&bits, &d, sizeof(bits));
    h = mix64(h ^ bits);
  }
  return h;
}

using Rng = std::mt19937_64;

}  // namespace btm
