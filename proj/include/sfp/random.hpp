#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

namespace sfp {

/// Anything that hands out uniform draws on (0,1). Every sampler in the
/// library is written against this concept so tests can script the stream.
template <class G>
concept UniformSource = requires(G& g) {
  { g.uniform() } -> std::convertible_to<double>;
};

/// Smallest uniform value ever returned; keeps -log(u) finite.
inline constexpr double kMinUniform = 0x1p-64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Seeded 64-bit Mersenne Twister. The engine's output sequence is fixed by
/// the standard, and all transforms below are written out explicitly, so a
/// given seed yields the same draws on every conforming toolchain.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed)
      : seed_(seed), engine_(detail::splitmix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform on (0,1) with 53-bit resolution.
  double uniform() {
    const double u = static_cast<double>(engine_() >> 11) * 0x1p-53;
    return u < kMinUniform ? kMinUniform : u;
  }

  /// Independent stream for parallel or per-item work: seed XOR index.
  RandomSource derive(std::uint64_t stream) const {
    return RandomSource(seed_ ^ stream);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// -log(u): a unit-mean exponential draw.
template <UniformSource G>
double unit_exponential(G& rng) {
  return -std::log(static_cast<double>(rng.uniform()));
}

/// Two independent standard normals (Box-Muller, two uniforms consumed).
template <UniformSource G>
std::pair<double, double> standard_normal_pair(G& rng) {
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(angle), r * std::sin(angle)};
}

}  // namespace sfp
