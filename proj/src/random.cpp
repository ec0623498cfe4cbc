#include "oids/random.hpp"

#include <cmath>
#include <numbers>

namespace oids {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t state = base + index * 0x9E3779B97F4A7C15ULL;
  return splitmix64(state);
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::index(std::size_t n) {
  auto i = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

std::size_t Rng::categorical(std::span<const double> probs) {
  const double u = uniform01();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return last_positive;
}

}  // namespace oids
