#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace negtopic {

/// Seeded random source with a fixed, portable output stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The std:: distribution adaptors are implementation-defined, so
/// every distribution used by the project is implemented here on top of raw
/// 64-bit draws:
///   uniform()   53 high bits scaled to [0, 1)
///   below(n)    rejection sampling on 64-bit draws, unbiased
///   normal()    Marsaglia polar method (no cached second value)
///   gamma(a)    Marsaglia-Tsang squeeze; a < 1 boosted via U^(1/a)
///   poisson(m)  Knuth product method for m < 30, Hoermann PTRS otherwise
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  uint64_t below(uint64_t n);
  double normal();
  double gamma(double shape);
  uint32_t poisson(double mean);
  std::vector<double> dirichlet(std::span<const double> alpha);
  // Index drawn proportionally to non-negative weights.
  size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

uint64_t splitmix64(uint64_t x);
uint64_t fnv1a64(std::string_view bytes);

/// Per-stage seed: splitmix64(seed ^ fnv1a64(label)).
uint64_t derive_seed(uint64_t seed, std::string_view label);

}  // namespace negtopic
