#pragma once

// Counter-based deterministic random numbers. Every draw is a pure function
// of (seed, stream ids, counter), so results do not depend on evaluation
// order or thread count.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace f4 {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Mixes up to three stream identifiers into one word. Chained splitmix keeps
// distinct (seed, a, b, c) tuples statistically independent.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                  std::uint64_t c = 0) {
    std::uint64_t x = splitmix64(seed);
    x = splitmix64(x ^ a);
    x = splitmix64(x ^ b);
    x = splitmix64(x ^ c);
    return x;
}

// Uniform in (0, 1]: never returns 0, safe under log().
inline double uniform_from_bits(std::uint64_t bits) {
    return (double((bits >> 11) + 1)) * 0x1.0p-53;
}

// One standard normal draw for a given counter key (Box-Muller, first leg).
inline double normal_from_counter(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                  std::uint64_t c) {
    const double u1 = uniform_from_bits(counter_hash(seed, a, b, c));
    const double u2 = uniform_from_bits(counter_hash(seed, a, b, c ^ 0x5851f42d4c957f2dULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Small sequential generator for data/model synthesis (not the noise path).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x6a09e667f3bcc908ULL)) {}

    std::uint64_t next() { return state_ = splitmix64(state_); }
    double uniform() { return uniform_from_bits(next()); }                   // (0,1]
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() {
        const double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + int(next() % std::uint64_t(hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

}  // namespace f4
