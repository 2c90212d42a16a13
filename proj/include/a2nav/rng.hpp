#pragma once

#include <cstdint>
#include <vector>

namespace a2nav {

// splitmix64 stream. Self-contained so datasets are reproducible
// bit-for-bit across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in [0, n). Modulo bias is negligible for desk-scale n.
  std::uint64_t uniform_int(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform_int(v.size()))];
  }

 private:
  std::uint64_t state_;
};

// Decorrelated per-item seed for parallel-safe dataset generation.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  return r.next_u64();
}

}  // namespace a2nav
