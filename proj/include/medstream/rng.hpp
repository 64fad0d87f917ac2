#ifndef MEDSTREAM_RNG_HPP
#define MEDSTREAM_RNG_HPP

#include <cstdint>
#include <random>

namespace medstream {

// SplitMix64 step (Steele, Lea & Flood 2014). Used to key independent
// substreams off one master seed.
std::uint64_t splitmix64(std::uint64_t& state);

// One reproducible random stream. Substream s of master seed m always yields
// the same draws, regardless of which thread runs it or how many other
// substreams exist, so Monte Carlo replications parallelize deterministically.
// Normal variates use quantile inversion rather than the standard library's
// unspecified algorithm, keeping streams identical across toolchains.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t substream);

  // Uniform on the open interval (0,1).
  double uniform();

  // Standard normal by inversion of the uniform.
  double normal();

  // 0.0 or 1.0 with success probability p.
  double bernoulli(double p);

 private:
  std::mt19937_64 gen_;
};

}  // namespace medstream

#endif  // MEDSTREAM_RNG_HPP
