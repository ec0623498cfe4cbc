#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace oids {

// One step of the SplitMix64 generator: advances `state` and returns the
// mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed of repetition `index` derived from `base`: the (index+1)-th output of
// a SplitMix64 stream started at `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Random stream used by every simulation component.
//
// The engine is MT19937-64 (std::mt19937_64), whose output sequence is fixed
// by the C++ standard. Variates are built by hand rather than through the
// <random> distributions, which are implementation-defined:
//   uniform01  = (engine() >> 11) * 2^-53            in [0, 1)
//   normal     = Box-Muller cosine branch on two uniforms, no caching
//   index(n)   = floor(uniform01 * n)
//   categorical = inverse CDF on one uniform
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  double normal();
  std::size_t index(std::size_t n);
  // `probs` need not be exactly normalized; the last positive entry absorbs
  // rounding slack.
  std::size_t categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
};

}  // namespace oids
