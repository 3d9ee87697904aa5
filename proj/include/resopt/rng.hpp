#pragma once

// Seedable, splittable random source shared by every module.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distributions are implementation-defined, so the
// mappings to doubles and bounded integers live here:
//   uniform01()      = (next() >> 11) * 2^-53
//   below(n)         = next() % n after rejecting the biased tail; masks for powers of two
//   split(stream)    = new engine seeded with splitmix64(seed + stream * golden)
// which makes every generated artifact bit-identical across platforms.

#include <cstdint>
#include <random>
#include <stdexcept>

namespace resopt {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0) throw std::invalid_argument("Rng::below: empty range");
        if ((n & (n - 1)) == 0) return next() & (n - 1);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    /// Independent child stream; the parent state is not advanced.
    Rng split(std::uint64_t stream) const
    {
        return Rng(splitmix64(seed_ + 0x9e3779b97f4a7c15ULL * (stream + 1)));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace resopt
