#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace stirap {

/// Name of the PRNG stack, recorded in run metadata. All randomness in the
/// simulator flows through splitmix64 seed derivation into xoshiro256**
/// streams, with uniform and Gaussian variates generated by the fixed
/// recipes below. Identical seeds therefore give bit-identical draws on any
/// platform, independent of the standard library.
inline constexpr const char* kPrngAlgorithm = "splitmix64-chain+xoshiro256**/v1";

constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a stream seed from a master seed and an ordered path of indices
/// (realization, pass, source id, ...). Order-sensitive:
/// derive_seed(m, {a, b}) != derive_seed(m, {b, a}) in general.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t state = master;
    std::uint64_t out = splitmix64_next(state);
    for (std::uint64_t p : path) {
        state = out ^ (p + 0x9e3779b97f4a7c15ULL);
        out = splitmix64_next(state);
    }
    return out;
}

/// xoshiro256** stream seeded via splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 mantissa bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Zero-mean Gaussian via Box-Muller (pairwise, deterministic draw order).
    double gaussian(double sigma);

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace stirap
