#pragma once

#include <cstdint>
#include <random>

#include "mmwcs/types.hpp"

namespace mmwcs {

// Seedable random source. Child streams come from counter-based splitting so
// that a stream depends only on (seed, stream id), never on draw order.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    Rng derive(std::uint64_t stream) const;

    double uniform();
    double normal();
    // CN(0, variance): real and imaginary parts N(0, variance/2)
    cplx complex_normal(double variance);
    std::uint64_t below(std::uint64_t n);

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace mmwcs
