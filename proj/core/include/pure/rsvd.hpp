#pragma once

#include <cstddef>
#include <cstdint>

#include "pure/linalg.hpp"
#include "pure/rng.hpp"

namespace pure {

/// Parameters of the randomized SVD.
///
/// The sketch has exactly `sketch_width` Gaussian columns; the basis Q has
/// the same number of columns (no separate oversampling knob).
struct RsvdConfig {
    std::size_t sketch_width = 8;
    std::size_t power_iters = 2;
    std::size_t target_rank = 1;
    RngSeed seed{};
    /// PCG stream id; batch code sets it to the instance index.
    std::uint64_t stream = 0;
};

/// Throws InvalidConfig unless 1 <= target_rank <= sketch_width <= min(rows, cols).
void validate(const RsvdConfig& cfg, std::size_t rows, std::size_t cols);

/// Orthonormal basis Q (rows x sketch_width) approximating the range of `a`.
///
/// Y = A * Omega with Omega ~ N(0, 1)^(cols x r), then `power_iters` rounds of
/// subspace iteration Q <- orth(A * orth(A^T Q)). Directions the sketch
/// cannot supply (rank(A) < r) are filled by basis completion, so Q always
/// has r orthonormal columns and QQ^T A = A whenever rank(A) <= r.
Matrix randomized_range_finder(const Matrix& a, const RsvdConfig& cfg);

/// Truncated SVD of `a` via Q from the range finder and an exact SVD of the
/// small matrix B = Q^T A. Returns target_rank triplets.
///
/// Throws ZeroMatrix if |A|_F <= 1e-30 and InvalidConfig for bad shapes.
SvdResult rsvd(const Matrix& a, const RsvdConfig& cfg);

}  // namespace pure
