#ifndef KRAICHNAN_RNG_HPP
#define KRAICHNAN_RNG_HPP

#include <cmath>
#include <cstdint>

namespace kraichnan {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used both to expand a
// 64-bit seed into generator state and as the substream derivation PRF.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seed -> stream contract: the stream for (seed, index) is the xoshiro256++
// stream seeded from derive_stream(seed, index). Distinct indices give
// independent streams; nesting (e.g. per-realization then per-segment) is the
// documented composition. Parallel samplers must use disjoint (seed, index)
// pairs; there is no hidden shared state.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = index;
    std::uint64_t mixed = splitmix64(s);
    s = seed ^ mixed;
    return splitmix64(s);
}

// xoshiro256++ (Blackman, Vigna 2019). Chosen over std engines/distributions
// so that a given (binary, seed) reproduces bit-identical streams; the std
// normal distribution is implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
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

    // Uniform on [0,1), 53-bit resolution.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; never 0, safe under log().
    double uniform_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller; pairs cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

    // Fair coin in {0,1}.
    int bernoulli() { return int(next_u64() >> 63); }

    // Rademacher +/-1.
    double sign() { return bernoulli() ? 1.0 : -1.0; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kraichnan

#endif
