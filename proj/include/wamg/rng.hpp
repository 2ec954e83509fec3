#ifndef WAMG_RNG_HPP
#define WAMG_RNG_HPP

#include <cstdint>
#include <vector>

namespace wamg {

// xoshiro256++ generator (Blackman & Vigna). Used instead of <random> engines
// so that streams are bit-reproducible across platforms and standard-library
// implementations.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        // splitmix64 seeding, as recommended by the xoshiro authors
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 bits of mantissa.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

/// Random vector with entries in [lo, hi).
inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed,
                                         double lo = -1.0, double hi = 1.0) {
    Xoshiro256pp rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.next_double(lo, hi);
    return v;
}

} // namespace wamg

#endif
