#pragma once

#include <cstdint>

#include "nrals/rational.hpp"

namespace nrals {

// Deterministic splitmix64-based generator. Kept self-contained so that
// traces are byte-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // Rejection sampling to avoid modulo bias.
        std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
        std::uint64_t r;
        do {
            r = next();
        } while (r >= limit);
        return r % n;
    }

    // Exact Bernoulli draw: true with probability p (0 <= p <= 1).
    bool bernoulli(const Rational& p) {
        // true iff r < p * 2^64, computed over the integers.
        mpz_class threshold = p.get_num();
        threshold <<= 64;
        threshold /= p.get_den();
        mpz_class r(0);
        std::uint64_t x = next();
        mpz_import(r.get_mpz_t(), 1, 1, sizeof(x), 0, 0, &x);
        return r < threshold;
    }

    // Uniform rational in [lo, hi] on a grid of `grid` steps (grid >= 1).
    Rational uniform_rational(const Rational& lo, const Rational& hi,
                              std::uint64_t grid = 1024) {
        std::uint64_t k = below(grid + 1);
        Rational t(static_cast<unsigned long>(k), static_cast<unsigned long>(grid));
        Rational v = lo + t * (hi - lo);
        v.canonicalize();
        return v;
    }

private:
    std::uint64_t state_;
};

} // namespace nrals
