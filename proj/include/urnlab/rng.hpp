#pragma once

#include <cstdint>
#include <random>

namespace urnlab {

// Seeded generator wrapper. Uniform doubles are built from raw 64-bit
// draws rather than std::uniform_real_distribution, so identical seeds
// give identical streams on every platform and toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 gen_;
};

}  // namespace urnlab
