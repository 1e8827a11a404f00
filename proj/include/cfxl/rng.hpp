#ifndef CFXL_RNG_HPP
#define CFXL_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cfxl {

// splitmix64 output function (Vigna). Used both as the seed/stream mixer and
// as the stable non-cryptographic hash for per-trial seed derivation; pure
// integer arithmetic, so results are identical on every platform.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derives an independent substream seed from (seed, tag).
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

// Deterministic random source. std::mt19937_64 has a fully specified output
// sequence; the uniform/gaussian mappings below avoid std::*_distribution,
// whose output is implementation-defined and would break cross-platform
// reproducibility of seeded channels.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly symmetric complex normal CN(0, 1): unit total variance.
  std::complex<double> cgauss() {
    const double re = gauss();
    const double im = gauss();
    return {re * 0.7071067811865475244, im * 0.7071067811865475244};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cfxl

#endif  // CFXL_RNG_HPP
