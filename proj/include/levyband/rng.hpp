#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string_view>

namespace levyband {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state)
{
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s)
{
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

} // namespace detail

//! A value-type handle into a hierarchy of reproducible random streams.
//! Substreams are derived by index or by name, so e.g. the stream of Monte
//! Carlo repetition r is seed.child(r), and its bootstrap weights come from
//! seed.child(r).child("mb"). Derivation is pure; the same path always yields
//! the same engine regardless of thread scheduling.
struct SeedStream {
  std::uint64_t state = 0;

  [[nodiscard]] SeedStream child(std::uint64_t index) const
  {
    std::uint64_t s = state ^ (0x9E3779B97F4A7C15ull * (index + 1));
    return SeedStream{detail::splitmix64(s)};
  }

  [[nodiscard]] SeedStream child(std::string_view name) const
  {
    std::uint64_t s = state ^ detail::fnv1a64(name);
    return SeedStream{detail::splitmix64(s)};
  }

  [[nodiscard]] std::mt19937_64 engine() const
  {
    std::uint64_t s = state;
    const std::uint32_t a = static_cast<std::uint32_t>(detail::splitmix64(s));
    const std::uint32_t b = static_cast<std::uint32_t>(detail::splitmix64(s));
    const std::uint32_t c = static_cast<std::uint32_t>(detail::splitmix64(s));
    const std::uint32_t d = static_cast<std::uint32_t>(detail::splitmix64(s));
    std::seed_seq seq{a, b, c, d};
    return std::mt19937_64(seq);
  }
};

//! Uniform draw on [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& g)
{
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

//! Standard normal via the Marsaglia polar method.
inline double normal_draw(std::mt19937_64& g)
{
  for (;;) {
    const double u = 2.0 * uniform01(g) - 1.0;
    const double v = 2.0 * uniform01(g) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

//! Laplace(0, scale) by inverse CDF.
inline double laplace_draw(std::mt19937_64& g, double scale)
{
  const double u = uniform01(g) - 0.5;
  return (u < 0.0 ? scale : -scale) * std::log1p(-2.0 * std::abs(u));
}

//! Gamma(shape, scale) via Marsaglia-Tsang; shapes below 1 use the boost
//! X = Gamma(shape+1) * U^{1/shape}. Draws that underflow double precision
//! are floored at the smallest normal value, keeping the support positive.
inline double gamma_draw(std::mt19937_64& g, double shape, double scale)
{
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("gamma_draw: shape and scale must be positive");
  double log_boost = 0.0;
  bool boosted = false;
  if (shape < 1.0) {
    // stay in log space: U^{1/shape} underflows long before the product does
    const double u = uniform01(g);
    log_boost = std::log(u <= 0.0 ? std::numeric_limits<double>::min() : u) / shape;
    boosted = true;
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal_draw(g);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(g);
    if (u < 1.0 - 0.0331 * x * x * x * x ||
        std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      const double value = boosted ? std::exp(std::log(d * v * scale) + log_boost)
                                   : d * v * scale;
      return value > 0.0 ? value : std::numeric_limits<double>::min();
    }
  }
}

//! Poisson(mean) by Knuth's product method, splitting large means into
//! additive chunks so the running product never underflows.
inline std::uint64_t poisson_draw(std::mt19937_64& g, double mean)
{
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson_draw: mean must be >= 0");
  std::uint64_t total = 0;
  while (mean > 30.0) {
    double chunk = 30.0;
    const double limit = std::exp(-chunk);
    double p = 1.0;
    std::uint64_t k = 0;
    do {
      ++k;
      p *= uniform01(g);
    } while (p > limit);
    total += k - 1;
    mean -= chunk;
  }
  const double limit = std::exp(-mean);
  double p = 1.0;
  std::uint64_t k = 0;
  do {
    ++k;
    p *= uniform01(g);
  } while (p > limit);
  return total + k - 1;
}

} // namespace levyband
