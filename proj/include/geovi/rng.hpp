#pragma once

#include <cstdint>
#include <vector>

#include "geovi/vec.hpp"

namespace geovi {

// Deterministic 64-bit generator (xoshiro256** seeded through splitmix64)
// with derived streams.  Streams make parallel sampling reproducible: worker
// i uses rng.fork(i) and the result is independent of scheduling and thread
// count.  Gaussian variates use Box-Muller on the generator's uniforms, so
// sequences are bit-exact for a fixed seed on any platform with IEEE doubles.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    // Child generator with its own state, a pure function of (seed, stream).
    Rng fork(std::uint64_t stream) const;

    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform();

    // Standard normal via Box-Muller; the pair partner is cached.
    double normal();
    Vec normal_vec(std::size_t n);

    // Poisson count by summing exponential arrivals (exact, O(lambda)).
    long poisson(double lambda);

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace geovi
