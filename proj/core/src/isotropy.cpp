#include "pure/isotropy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pure/error.hpp"
#include "pure/linalg.hpp"

namespace pure {

namespace {

constexpr double kZeroRowNorm = 1e-12;

// Neumaier-compensated running sum; keeps the accumulated error independent
// of how many pairs are added.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Rows rescaled by a power of two (exact) so squared norms cannot overflow,
// with their squared norms. Cosines are then dot / sqrt(|x|^2 |y|^2), which is
// exactly 1 for identical rows.
struct ScaledRows {
    Matrix rows;
    Vector sq_norms;

    double cosine(std::size_t a, std::size_t b) const
    {
        return dot(rows.row(a), rows.row(b)) / std::sqrt(sq_norms[a] * sq_norms[b]);
    }
};

ScaledRows scaled_rows(const Matrix& x, std::size_t instance)
{
    ScaledRows out{x, Vector(x.rows())};
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto row = out.rows.row(r);
        if (norm2(row) < kZeroRowNorm)
            fail(ErrorCode::ZeroRow, "instance " + std::to_string(instance) + " row " + std::to_string(r) +
                                         " has (near) zero norm");
        double peak = 0.0;
        for (double v : row)
            peak = std::max(peak, std::abs(v));
        int exponent = 0;
        std::frexp(peak, &exponent);
        for (auto& v : row)
            v = std::ldexp(v, -exponent);
        out.sq_norms[r] = dot(row, row);
    }
    return out;
}

// Scaled tokens of the whole corpus with the owning instance per row.
struct TokenPool {
    ScaledRows tokens;
    std::vector<std::size_t> owner;
};

TokenPool build_pool(std::span<const Matrix> corpus)
{
    if (corpus.size() < 2)
        fail(ErrorCode::TooFewInstances, "cross-instance statistics need at least 2 instances");
    std::vector<Matrix> blocks;
    blocks.reserve(corpus.size());
    TokenPool pool;
    Vector sq_norms;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].rows() == 0)
            fail(ErrorCode::TooFewRows, "instance " + std::to_string(i) + " has no tokens");
        ScaledRows scaled = scaled_rows(corpus[i], i);
        blocks.push_back(std::move(scaled.rows));
        sq_norms.insert(sq_norms.end(), scaled.sq_norms.begin(), scaled.sq_norms.end());
        pool.owner.insert(pool.owner.end(), corpus[i].rows(), i);
    }
    pool.tokens = {vstack(blocks), std::move(sq_norms)};
    return pool;
}

// Calls visit(a, b) for each sampled (or every) cross-instance pair and returns the pair count.
template <typename Visit>
std::size_t for_each_pair(const TokenPool& pool, std::size_t n_pairs, RngSeed seed, Visit&& visit)
{
    const std::size_t total = pool.tokens.rows.rows();
    if (n_pairs == kAllPairs) {
        std::size_t count = 0;
        for (std::size_t a = 0; a < total; ++a)
            for (std::size_t b = a + 1; b < total; ++b)
                if (pool.owner[a] != pool.owner[b]) {
                    visit(a, b);
                    ++count;
                }
        return count;
    }
    if (total > 0xffffffffULL)
        fail(ErrorCode::InvalidArgument, "too many tokens for pair sampling");
    Pcg32 rng(seed.value, 0);
    const auto bound = static_cast<std::uint32_t>(total);
    for (std::size_t k = 0; k < n_pairs; ++k) {
        std::size_t a = 0;
        std::size_t b = 0;
        do {
            a = rng.bounded(bound);
            b = rng.bounded(bound);
        } while (pool.owner[a] == pool.owner[b]);
        visit(a, b);
    }
    return n_pairs;
}

}  // namespace

double intra_set_similarity(const Matrix& x)
{
    if (x.rows() < 2)
        fail(ErrorCode::TooFewRows, "intra-set similarity needs at least 2 rows");
    const ScaledRows scaled = scaled_rows(x, 0);
    CompensatedSum sum;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = i + 1; j < x.rows(); ++j) {
            sum.add(scaled.cosine(i, j));
            ++pairs;
        }
    return sum.value() / static_cast<double>(pairs);
}

double anisotropy_baseline(std::span<const Matrix> corpus, std::size_t n_pairs, RngSeed seed)
{
    const TokenPool pool = build_pool(corpus);
    CompensatedSum sum;
    const std::size_t count = for_each_pair(pool, n_pairs, seed, [&](std::size_t a, std::size_t b) {
        sum.add(pool.tokens.cosine(a, b));
    });
    return sum.value() / static_cast<double>(count);
}

Vector dimension_dominance(std::span<const Matrix> corpus, std::size_t n_pairs, RngSeed seed)
{
    const TokenPool pool = build_pool(corpus);
    const std::size_t d = pool.tokens.rows.cols();
    std::vector<CompensatedSum> sums(d);
    const std::size_t count = for_each_pair(pool, n_pairs, seed, [&](std::size_t a, std::size_t b) {
        auto x = pool.tokens.rows.row(a);
        auto y = pool.tokens.rows.row(b);
        const double inv = 1.0 / std::sqrt(pool.tokens.sq_norms[a] * pool.tokens.sq_norms[b]);
        for (std::size_t j = 0; j < d; ++j)
            sums[j].add(x[j] * y[j] * inv);
    });
    Vector out(d);
    for (std::size_t j = 0; j < d; ++j)
        out[j] = sums[j].value() / static_cast<double>(count);
    return out;
}

Vector pc_variance_shares(const Matrix& x)
{
    if (x.rows() < 2)
        fail(ErrorCode::TooFewRows, "variance shares need at least 2 rows");
    if (frobenius_norm(x) == 0.0)
        fail(ErrorCode::ZeroMatrix, "variance shares of a zero matrix");
    const SvdResult svd = exact_svd(x);
    Vector shares(svd.sigma.size());
    CompensatedSum total;
    for (std::size_t i = 0; i < shares.size(); ++i) {
        shares[i] = svd.sigma[i] * svd.sigma[i];
        total.add(shares[i]);
    }
    const double t = total.value();
    for (auto& s : shares)
        s /= t;
    return shares;
}

IsotropyReport isotropy_report(std::span<const Matrix> corpus, std::size_t n_pairs, RngSeed seed)
{
    IsotropyReport rep;
    if (corpus.size() < 2)
        fail(ErrorCode::TooFewInstances, "isotropy report needs at least 2 instances");
    CompensatedSum intra;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        try {
            intra.add(intra_set_similarity(corpus[i]));
        } catch (const Error& e) {
            throw e.with_instance(i);
        }
    }
    rep.unadjusted = intra.value() / static_cast<double>(corpus.size());
    rep.anisotropy_estimate = anisotropy_baseline(corpus, n_pairs, seed);
    rep.adjusted = rep.unadjusted - rep.anisotropy_estimate;
    rep.pc_variance_shares = pc_variance_shares(vstack(corpus));
    rep.dim_dominance = dimension_dominance(corpus, n_pairs, seed);
    return rep;
}

}  // namespace pure
