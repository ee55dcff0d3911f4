#include "pure/rng.hpp"

#include <cmath>
#include <numbers>

#include "pure/error.hpp"

namespace pure {

namespace {
constexpr std::uint64_t kPcgMultiplier = 6364136223846793005ULL;
}

Pcg32::Pcg32(std::uint64_t seed, std::uint64_t stream) noexcept : inc_((stream << 1U) | 1U)
{
    next_u32();
    state_ += seed;
    next_u32();
}

std::uint32_t Pcg32::next_u32() noexcept
{
    const std::uint64_t old = state_;
    state_ = old * kPcgMultiplier + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18U) ^ old) >> 27U);
    const auto rot = static_cast<std::uint32_t>(old >> 59U);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31U));
}

double Pcg32::next_double() noexcept
{
    const std::uint64_t hi = next_u32() >> 5U;  // 27 bits
    const std::uint64_t lo = next_u32() >> 6U;  // 26 bits
    return static_cast<double>((hi << 26U) | lo) * 0x1.0p-53;
}

std::uint32_t Pcg32::bounded(std::uint32_t bound) noexcept
{
    const std::uint32_t threshold = (-bound) % bound;
    for (;;) {
        const std::uint32_t r = next_u32();
        if (r >= threshold)
            return r % bound;
    }
}

double GaussianSampler::next() noexcept
{
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // 1 - u lies in (0, 1], keeping the log finite
    const double u1 = 1.0 - rng_.next_double();
    const double u2 = rng_.next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(theta);
    has_cached_ = true;
    return radius * std::cos(theta);
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, RngSeed seed, std::uint64_t stream)
{
    if (rows == 0 || cols == 0)
        fail(ErrorCode::InvalidArgument, "gaussian_matrix needs rows, cols >= 1");
    GaussianSampler sampler(seed, stream);
    Matrix out(rows, cols);
    for (auto& v : out.data())
        v = sampler.next();
    return out;
}

}  // namespace pure
