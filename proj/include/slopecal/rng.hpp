#ifndef SLOPECAL_RNG_HPP
#define SLOPECAL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace slopecal {

/// Seedable generator with a fixed cross-platform stream: mt19937_64 for the
/// raw bits, explicit mappings for uniforms and normals. std::uniform_real_
/// distribution and std::normal_distribution are implementation-defined, so
/// they are not used here; two builds with the same seed must produce the
/// same samples.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in (0, 1]; never returns 0 so log() is always safe.
  double uniform01() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller, caching the second draw of each pair.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer; used to derive independent per-replicate seeds from
/// (base seed, replicate index) without correlated low bits.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace slopecal

#endif  // SLOPECAL_RNG_HPP
