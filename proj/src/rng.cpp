#include "medstream/rng.hpp"

#include "medstream/normal.hpp"

namespace medstream {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t substream) {
  std::uint64_t key = seed + 0x9E3779B97F4A7C15ULL * (substream + 1);
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(key)),
                    static_cast<std::uint32_t>(splitmix64(key) >> 32),
                    static_cast<std::uint32_t>(splitmix64(key)),
                    static_cast<std::uint32_t>(splitmix64(key) >> 32),
                    static_cast<std::uint32_t>(splitmix64(key)),
                    static_cast<std::uint32_t>(splitmix64(key) >> 32)};
  gen_.seed(seq);
}

double RngStream::uniform() {
  // 53-bit mantissa centered inside (0,1): never returns an endpoint, so the
  // quantile inversion stays finite.
  return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_quantile(uniform()); }

double RngStream::bernoulli(double p) { return uniform() < p ? 1.0 : 0.0; }

}  // namespace medstream
