#include "pure/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pure/error.hpp"

namespace pure {

namespace {

constexpr double kCollapseTolerance = 1e-12;
constexpr double kEps = std::numeric_limits<double>::epsilon();

using Columns = std::vector<Vector>;

Columns to_columns(const Matrix& a)
{
    Columns cols(a.cols(), Vector(a.rows()));
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto row = a.row(r);
        for (std::size_t c = 0; c < a.cols(); ++c)
            cols[c][r] = row[c];
    }
    return cols;
}

Matrix from_columns(const Columns& cols, std::size_t rows)
{
    Matrix out(rows, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        out.set_col(c, cols[c]);
    return out;
}

void project_out(Vector& v, const Columns& basis, std::size_t count)
{
    for (std::size_t i = 0; i < count; ++i) {
        const double h = dot(basis[i], v);
        for (std::size_t r = 0; r < v.size(); ++r)
            v[r] -= h * basis[i][r];
    }
}

// Two passes of modified Gram-Schmidt; returns the remaining norm.
double orthogonalize_twice(Vector& v, const Columns& basis, std::size_t count)
{
    project_out(v, basis, count);
    project_out(v, basis, count);
    return norm2(v);
}

// Standard basis vector with the largest component outside span(basis[0..count)).
Vector completion_vector(const Columns& basis, std::size_t count, std::size_t dim)
{
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t k = 0; k < dim; ++k) {
        // |e_k - P e_k|^2 = 1 - sum_i q_i[k]^2
        double captured = 0.0;
        for (std::size_t i = 0; i < count; ++i)
            captured += basis[i][k] * basis[i][k];
        const double residual = 1.0 - captured;
        if (residual > best_norm + 1e-12) {
            best_norm = residual;
            best = k;
        }
    }
    Vector e(dim, 0.0);
    e[best] = 1.0;
    const double r = orthogonalize_twice(e, basis, count);
    for (auto& x : e)
        x /= r;
    return e;
}

Matrix orthonormalize(const Matrix& a, bool complete)
{
    if (a.rows() < a.cols())
        fail(ErrorCode::InvalidArgument, "orthonormalisation needs rows >= cols, got " + std::to_string(a.rows()) +
                                             "x" + std::to_string(a.cols()));
    Columns q = to_columns(a);
    for (std::size_t j = 0; j < q.size(); ++j) {
        const double original = norm2(q[j]);
        const double remaining = original > 0.0 ? orthogonalize_twice(q[j], q, j) : 0.0;
        if (original == 0.0 || remaining < kCollapseTolerance * original) {
            if (!complete)
                fail(ErrorCode::RankDeficient, "column " + std::to_string(j) + " is linearly dependent");
            q[j] = completion_vector(q, j, a.rows());
            continue;
        }
        for (auto& x : q[j])
            x /= remaining;
    }
    return from_columns(q, a.rows());
}

// One-sided Jacobi on a matrix with rows >= cols. Returns U (m x n, columns
// scaled by sigma), sigma and V before sorting.
struct JacobiOutput {
    Columns w;
    Columns v;
};

JacobiOutput one_sided_jacobi(const Matrix& a, const JacobiOptions& opts)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    JacobiOutput out{to_columns(a), {}};
    out.v.assign(n, Vector(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        out.v[i][i] = 1.0;

    // rounding in an m-term dot product is ~sqrt(m) eps; don't ask for less
    const double tol = std::max(opts.tolerance, std::sqrt(static_cast<double>(m)) * kEps);

    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                auto& wi = out.w[i];
                auto& wj = out.w[j];
                const double alpha = dot(wi, wi);
                const double beta = dot(wj, wj);
                const double gamma = dot(wi, wj);
                if (alpha == 0.0 || beta == 0.0)
                    continue;
                if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta))
                    continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                double t = 0.0;
                if (std::abs(zeta) > 1e150)
                    t = 0.5 / zeta;
                else
                    t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t r = 0; r < m; ++r) {
                    const double x = wi[r];
                    const double y = wj[r];
                    wi[r] = c * x - s * y;
                    wj[r] = s * x + c * y;
                }
                auto& vi = out.v[i];
                auto& vj = out.v[j];
                for (std::size_t r = 0; r < n; ++r) {
                    const double x = vi[r];
                    const double y = vj[r];
                    vi[r] = c * x - s * y;
                    vj[r] = s * x + c * y;
                }
            }
        }
        if (!rotated)
            return out;
    }
    fail(ErrorCode::NoConvergence, "Jacobi SVD did not converge in " + std::to_string(opts.max_sweeps) + " sweeps");
}

SvdResult svd_tall(const Matrix& a, const JacobiOptions& opts)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    auto [w, v] = one_sided_jacobi(a, opts);

    Vector sigma(n);
    for (std::size_t j = 0; j < n; ++j)
        sigma[j] = norm2(w[j]);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

    SvdResult res;
    res.sigma.resize(n);
    Columns u_cols(n);
    Columns v_cols(n);
    for (std::size_t k = 0; k < n; ++k) {
        res.sigma[k] = sigma[order[k]];
        u_cols[k] = std::move(w[order[k]]);
        v_cols[k] = std::move(v[order[k]]);
    }

    const std::size_t rank = numerical_rank(res.sigma, m, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (k < rank) {
            for (auto& x : u_cols[k])
                x /= res.sigma[k];
        } else {
            // direction is noise or undefined: replace by an orthonormal completion
            u_cols[k] = completion_vector(u_cols, k, m);
        }
    }

    res.u = from_columns(u_cols, m);
    res.v = from_columns(v_cols, n);
    return res;
}

}  // namespace

Matrix SvdResult::reconstruct(std::size_t terms) const
{
    terms = std::min(terms, sigma.size());
    Matrix out(u.rows(), v.rows());
    for (std::size_t k = 0; k < terms; ++k) {
        const double s = sigma[k];
        for (std::size_t i = 0; i < u.rows(); ++i) {
            const double ui = u(i, k) * s;
            auto dst = out.row(i);
            for (std::size_t j = 0; j < v.rows(); ++j)
                dst[j] += ui * v(j, k);
        }
    }
    return out;
}

Matrix qr_orthonormalize(const Matrix& a)
{
    return orthonormalize(a, false);
}

Matrix orthonormalize_completing(const Matrix& a)
{
    return orthonormalize(a, true);
}

std::size_t numerical_rank(const Vector& sigma, std::size_t rows, std::size_t cols) noexcept
{
    if (sigma.empty() || sigma.front() <= 0.0)
        return 0;
    const double tol = static_cast<double>(std::max(rows, cols)) * kEps * sigma.front();
    std::size_t rank = 0;
    for (double s : sigma)
        if (s > tol)
            ++rank;
    return rank;
}

void normalize_signs(Matrix& u, Matrix& v)
{
    for (std::size_t k = 0; k < v.cols(); ++k) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t r = 0; r < v.rows(); ++r) {
            const double mag = std::abs(v(r, k));
            if (mag > best) {
                best = mag;
                arg = r;
            }
        }
        if (v(arg, k) >= 0.0)
            continue;
        for (std::size_t r = 0; r < v.rows(); ++r)
            v(r, k) = -v(r, k);
        if (k < u.cols())
            for (std::size_t r = 0; r < u.rows(); ++r)
                u(r, k) = -u(r, k);
    }
}

SvdResult exact_svd(const Matrix& a, const JacobiOptions& opts)
{
    if (a.empty())
        fail(ErrorCode::InvalidArgument, "exact_svd of an empty matrix");
    for (double x : a.data())
        if (!std::isfinite(x))
            fail(ErrorCode::NonFinite, "exact_svd input has non-finite entries");

    SvdResult res;
    if (a.rows() >= a.cols()) {
        res = svd_tall(a, opts);
    } else {
        // A^T = U' S V'^T  =>  A = V' S U'^T
        SvdResult t = svd_tall(a.transpose(), opts);
        res.u = std::move(t.v);
        res.sigma = std::move(t.sigma);
        res.v = std::move(t.u);
    }
    normalize_signs(res.u, res.v);
    return res;
}

}  // namespace pure
