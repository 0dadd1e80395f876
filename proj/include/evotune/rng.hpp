#pragma once

#include <cstdint>

namespace evotune {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer. Every piece of seeded randomness and every node hash
// in the project goes through this mixer, so benchmark files, strategies and
// traces are bit-exact across platforms and implementations.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

// Chains a value into a hash state. Not commutative.
constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept {
    return mix64(h ^ (v + kGolden));
}

// splitmix64 stream. One mix per draw, trivially copyable, no hidden state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        state_ += kGolden;
        return mix64(state_);
    }

    // Uniform in [0, 1) with 53 significant bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n). Plain modulo; the bias is negligible for the small n
    // used here and keeps the draw sequence trivially reproducible.
    std::uint64_t next_below(std::uint64_t n) noexcept {
        return n == 0 ? 0 : next_u64() % n;
    }

    double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_double();
    }

private:
    std::uint64_t state_;
};

// Deterministic seed derivation for independent streams, e.g. one stream per
// (master seed, generation, individual) triple.
constexpr std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b) noexcept {
    return hash_combine(a, b);
}

constexpr std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
    return hash_combine(hash_combine(a, b), c);
}

} // namespace evotune
