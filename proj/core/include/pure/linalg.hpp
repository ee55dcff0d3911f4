#pragma once

#include <cstddef>

#include "pure/matrix.hpp"

namespace pure {

/// Thin singular value decomposition A ~ U diag(sigma) V^T.
///
/// sigma is non-increasing and non-negative. U is m x t and V is n x t with
/// orthonormal columns. Each column of V is signed so that its
/// largest-magnitude entry is positive (first one wins on ties), with the
/// matching column of U flipped alongside.
struct SvdResult {
    Matrix u;
    Vector sigma;
    Matrix v;

    std::size_t rank() const noexcept { return sigma.size(); }
    /// U diag(sigma) V^T using the first `terms` triplets (all by default).
    Matrix reconstruct(std::size_t terms = static_cast<std::size_t>(-1)) const;
};

struct JacobiOptions {
    /// A column pair counts as orthogonal once |a_i . a_j| <= tol * |a_i| |a_j|.
    double tolerance = 1e-14;
    int max_sweeps = 60;
};

/// Orthonormal basis for the column span of `a` (rows >= cols) via
/// modified Gram-Schmidt with one re-orthogonalisation pass.
///
/// Throws RankDeficient when a column's remaining norm falls below 1e-12
/// (relative to its original norm) and InvalidArgument when rows < cols.
Matrix qr_orthonormalize(const Matrix& a);

/// Like qr_orthonormalize, but a column that collapses into the span of
/// the previous ones is replaced by the standard basis vector with the
/// largest component outside that span. The result always has a.cols()
/// orthonormal columns whose span contains the span of `a`.
Matrix orthonormalize_completing(const Matrix& a);

/// Full thin SVD (t = min(rows, cols)) by one-sided Jacobi rotations.
///
/// Throws InvalidArgument on an empty input, NonFinite on NaN/Inf entries
/// and NoConvergence when the sweep cap is reached.
SvdResult exact_svd(const Matrix& a, const JacobiOptions& opts = {});

/// Singular values whose magnitude exceeds max(m, n) * eps * sigma_max.
std::size_t numerical_rank(const Vector& sigma, std::size_t rows, std::size_t cols) noexcept;

/// Flip the columns of v (and of u, when it has columns) so that each
/// column of v has a positive largest-magnitude entry.
void normalize_signs(Matrix& u, Matrix& v);

}  // namespace pure
