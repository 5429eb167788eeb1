#pragma once

#include <cmath>
#include <cstdint>

namespace cccn {

// SplitMix64. Chosen over std::mt19937 + <random> distributions because the
// standard leaves distribution output unspecified across implementations and
// every experiment here must replay bit-identically from its seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). n = 0 is treated as 1.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Exponential inter-arrival with the given rate (events per unit time).
  double exponential(double rate) {
    double u = uniform();
    return -std::log1p(-u) / rate;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Derives an independent sub-stream; used to give every node, gateway and
  // purpose its own seed so insertion order elsewhere cannot perturb draws.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    Rng r(seed ^ (0x6c62272e07bb0142ULL + stream * 0x100000001b3ULL));
    r.next();
    return r.next();
  }

 private:
  std::uint64_t state_;
};

}  // namespace cccn
