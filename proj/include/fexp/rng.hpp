#ifndef FEXP_RNG_HPP
#define FEXP_RNG_HPP

#include <cmath>
#include <cstdint>

namespace fexp {

/// splitmix64 finalizer. Used both as a tiny generator for seeding and as a
/// mixing function when deriving independent streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Stream derivation: seed_for(master, tag, index) feeds the master seed,
/// a purpose tag, and a stream index through three splitmix64 rounds.
/// Distinct (tag, index) pairs give statistically independent streams, and
/// the construction is documented so experiments are reproducible bit for
/// bit regardless of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = a ^ (tag * 0xD1342543DE82EF95ull + 0x2545F4914F6CDD1Dull);
    std::uint64_t b = splitmix64(s);
    s = b ^ (index * 0xDA942042E4DD58B5ull + 0xC2B2AE3D27D4EB4Full);
    return splitmix64(s);
}

/// xoshiro256++ (Blackman & Vigna, public domain reference implementation).
/// Draw sequences are portable across standard libraries, unlike the std
/// distribution adapters.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1], safe as a log argument.
    double uniform01_open_low() { return 1.0 - uniform01(); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

/// Standard normal sampler, Box-Muller with a cached spare. Deterministic
/// draw sequence for a given engine state.
class NormalSampler {
public:
    explicit NormalSampler(Xoshiro256pp& rng) : rng_(rng) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.uniform01_open_low();
        const double u2 = rng_.uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    Xoshiro256pp& rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace fexp

#endif  // FEXP_RNG_HPP
