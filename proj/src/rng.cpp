#include "geovi/rng.hpp"

#include <cmath>

#include "geovi/errors.hpp"

namespace geovi {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& s : s_) s = splitmix64(x);
    // xoshiro must not start in the all-zero state.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

Rng Rng::fork(std::uint64_t stream) const {
    std::uint64_t x = stream + 0x6A09E667F3BCC909ull;
    std::uint64_t h = splitmix64(x);
    return Rng(seed_ ^ h);
}

std::uint64_t Rng::next_u64() {
    // xoshiro256**
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    // u1 in (0,1] so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

Vec Rng::normal_vec(std::size_t n) {
    Vec v(n);
    for (auto& x : v) x = normal();
    return v;
}

long Rng::poisson(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw DomainError("poisson: lambda must be finite and >= 0");
    if (lambda == 0.0) return 0;
    // Count exponential arrivals until the budget is spent; avoids the
    // exp(-lambda) underflow of the product form for large rates.
    double acc = 0.0;
    long k = -1;
    while (acc <= lambda) {
        acc += -std::log(1.0 - uniform());
        ++k;
    }
    return k;
}

}  // namespace geovi
