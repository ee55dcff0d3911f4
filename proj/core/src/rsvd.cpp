#include "pure/rsvd.hpp"

#include <algorithm>
#include <string>

#include "pure/error.hpp"

namespace pure {

void validate(const RsvdConfig& cfg, std::size_t rows, std::size_t cols)
{
    const std::size_t limit = std::min(rows, cols);
    if (cfg.target_rank < 1)
        fail(ErrorCode::InvalidConfig, "target rank must be >= 1");
    if (cfg.sketch_width < cfg.target_rank)
        fail(ErrorCode::InvalidConfig, "target rank " + std::to_string(cfg.target_rank) + " exceeds sketch width " +
                                           std::to_string(cfg.sketch_width));
    if (cfg.sketch_width > limit)
        fail(ErrorCode::InvalidConfig, "sketch width " + std::to_string(cfg.sketch_width) +
                                           " exceeds min(rows, cols) = " + std::to_string(limit));
}

Matrix randomized_range_finder(const Matrix& a, const RsvdConfig& cfg)
{
    validate(cfg, a.rows(), a.cols());
    const Matrix omega = gaussian_matrix(a.cols(), cfg.sketch_width, cfg.seed, cfg.stream);
    Matrix q = orthonormalize_completing(a * omega);
    for (std::size_t it = 0; it < cfg.power_iters; ++it) {
        const Matrix w = orthonormalize_completing(multiply_tn(a, q));
        q = orthonormalize_completing(a * w);
    }
    return q;
}

SvdResult rsvd(const Matrix& a, const RsvdConfig& cfg)
{
    if (a.empty() || frobenius_norm(a) <= 1e-30)
        fail(ErrorCode::ZeroMatrix, "rsvd of a zero matrix");
    validate(cfg, a.rows(), a.cols());

    const Matrix q = randomized_range_finder(a, cfg);
    const Matrix b = multiply_tn(q, a);
    SvdResult small = exact_svd(b);

    const std::size_t t = cfg.target_rank;
    SvdResult res;
    res.u = q * small.u.left_cols(t);
    res.sigma.assign(small.sigma.begin(), small.sigma.begin() + static_cast<std::ptrdiff_t>(t));
    res.v = small.v.left_cols(t);
    return res;
}

}  // namespace pure
