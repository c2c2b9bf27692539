#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "normclust/rational.hpp"

namespace normclust {

/// Deterministic splittable RNG (splitmix64 core).
///
/// A run is seeded by a 64-bit master seed. Every module / shard derives its
/// own stream via `split(label)`, so the draws consumed by one component never
/// shift another component's stream, and worker counts cannot change results.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Child stream keyed by a label; independent of draws made on `this`.
    Rng split(const std::string& label) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
        for (unsigned char c : label) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        std::uint64_t z = state_ ^ h;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

    Rng split(const std::string& label, std::uint64_t index) const {
        return split(label + "#" + std::to_string(index));
    }

    /// Uniform integer in [0, bound), bound > 0. Rejection sampling, unbiased.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) return 0;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        for (;;) {
            std::uint64_t v = next_u64();
            if (v < limit) return v % bound;
        }
    }

    /// Exact uniform rational in [0, 1) with denominator 2^64.
    Rat next_unit() {
        Rat num = rat_u64(next_u64());
        Rat den = rat_u64(1);
        mpz_mul_2exp(den.get_num().get_mpz_t(), den.get_num().get_mpz_t(), 64);
        return num / den;
    }

    /// Index drawn with probability weights[i] / sum(weights). Zero-total
    /// weights are the caller's responsibility.
    std::size_t next_weighted(const std::vector<Rat>& weights, const Rat& total) {
        Rat target = next_unit() * total;
        Rat acc = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (target < acc) return i;
        }
        // Only reachable when trailing weights are zero.
        for (std::size_t i = weights.size(); i-- > 0;)
            if (weights[i] > 0) return i;
        return 0;
    }

private:
    std::uint64_t state_;
};

}  // namespace normclust
