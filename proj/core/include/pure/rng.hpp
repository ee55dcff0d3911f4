#pragma once

#include <cstddef>
#include <cstdint>

#include "pure/matrix.hpp"

namespace pure {

struct RngSeed {
    std::uint64_t value = 42;
    bool operator==(const RngSeed&) const = default;
};

/// PCG32 (XSH-RR output, 64-bit LCG state) as published by O'Neill.
///
/// The stream id selects the LCG increment, so (seed, stream) pairs give
/// independent sequences. Seeding follows pcg32_srandom_r exactly, so the
/// reference vectors from the PCG distribution apply.
class Pcg32 {
public:
    Pcg32(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint32_t next_u32() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double next_double() noexcept;
    /// Uniform integer on [0, bound), bias-free (rejection sampling).
    std::uint32_t bounded(std::uint32_t bound) noexcept;

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 0;
};

/// Standard normal variates via the Box-Muller transform on Pcg32 output.
class GaussianSampler {
public:
    explicit GaussianSampler(RngSeed seed, std::uint64_t stream = 0) noexcept : rng_(seed.value, stream) {}

    double next() noexcept;
    Pcg32& engine() noexcept { return rng_; }

private:
    Pcg32 rng_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// rows x cols matrix of i.i.d. N(0, 1) entries, filled row by row from
/// GaussianSampler(seed, stream).
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, RngSeed seed, std::uint64_t stream = 0);

}  // namespace pure
