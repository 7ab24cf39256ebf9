#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace metaprior {

// SplitMix64 step (Steele, Lea & Flood mixing constants). Used only to
// derive child seeds; the draw engine is mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic child seed from a base seed plus up to three stream tags.
// Workers seeded through this are independent of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = base;
  s = splitmix64(s) ^ (a + 0x9e3779b97f4a7c15ULL);
  s = splitmix64(s) ^ (b + 0xbf58476d1ce4e5b9ULL);
  s = splitmix64(s) ^ (c + 0x94d049bb133111ebULL);
  return splitmix64(s);
}

// Seeded random source. Draw mapping is hand-rolled (53-bit uniforms,
// Box-Muller normals) so sequences are identical across standard-library
// implementations, which the reproducibility contracts rely on.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // standard normal; consumes exactly two engine draws
  double normal01() {
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double stddev) {
    return mean + stddev * normal01();
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace metaprior
