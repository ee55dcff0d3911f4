#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pure/error.hpp"
#include "pure/linalg.hpp"
#include "pure/purify.hpp"
#include "test_util.hpp"

using namespace pure;
using test::random_matrix;

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::InvalidArgument;
}

void expect_matrix_near(const Matrix& a, const Matrix& b, double tol)
{
    ASSERT_EQ(a.rows(), b.rows());
    ASSERT_EQ(a.cols(), b.cols());
    EXPECT_LE(max_abs_diff(a, b), tol);
}

void expect_vector_near(const Vector& a, const Vector& b, double tol)
{
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_NEAR(a[i], b[i], tol) << "index " << i;
}

// Large shared rank-1 component plus small noise.
Matrix low_rank_dominant(std::size_t n, std::size_t d, std::uint64_t seed)
{
    const Matrix base = random_matrix(n, 1, seed) * random_matrix(1, d, seed + 1) * 10.0;
    return base + random_matrix(n, d, seed + 2) * 0.05;
}

Matrix permute_rows(const Matrix& x, std::uint64_t seed)
{
    std::vector<std::size_t> order(x.rows());
    std::iota(order.begin(), order.end(), 0);
    Pcg32 rng(seed, 1);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.bounded(static_cast<std::uint32_t>(i))]);
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
        std::copy_n(x.row(order[r]).begin(), x.cols(), out.row(r).begin());
    return out;
}

}  // namespace

// ---- component removal -------------------------------------------------

TEST(RemoveTopComponents, AxisAlignedExample)
{
    for (auto backend : {Backend::Exact, Backend::Randomized}) {
        const auto out = remove_top_components(Matrix{{3, 0}, {0, 2}, {0, 0}}, 1, backend);
        expect_matrix_near(out.residual, Matrix{{0, 0}, {0, 2}, {0, 0}}, 1e-12);
        ASSERT_EQ(out.removed.size(), 1U);
        EXPECT_NEAR(out.removed[0].sigma, 3.0, 1e-12);
    }
}

TEST(RemoveTopComponents, RankOneAnnihilated)
{
    for (auto backend : {Backend::Exact, Backend::Randomized}) {
        const auto out = remove_top_components(Matrix{{1, 2}, {2, 4}}, 1, backend);
        expect_matrix_near(out.residual, Matrix(2, 2, 0.0), 1e-12);
    }
}

TEST(RemoveTopComponents, MatchesOracleOnSixByFour)
{
    const Matrix x = random_matrix(6, 4, 64);
    const auto out = remove_top_components(x, 2, Backend::Exact);
    const Matrix oracle = rank1_residual_oracle(x, 2);
    EXPECT_LT(test::relative_frobenius(out.residual, oracle), 1e-8);
}

TEST(RemoveTopComponents, EquivalentToResidualSumOnManyShapes)
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t n = 3 + seed % 30;
        const std::size_t d = 3 + (seed * 11) % 62;
        const Matrix x = random_matrix(n, d, 10'000 + seed);
        for (std::size_t k : {1, 2, 3}) {
            const auto out = remove_top_components(x, k, Backend::Exact);
            EXPECT_LT(test::residual_error(out.residual, rank1_residual_oracle(x, k), x), 1e-8)
                << n << "x" << d << " k=" << k;
        }
    }
}

TEST(RemoveTopComponents, SignInvariance)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix x = random_matrix(9, 7, 1234 + seed);
        const auto svd = exact_svd(x);
        for (std::size_t k : {1, 2, 3}) {
            Matrix plus = x;
            Matrix minus = x;
            for (std::size_t i = 0; i < k; ++i) {
                Vector v = svd.v.col(i);
                const Vector p = multiply(plus, v);
                for (std::size_t r = 0; r < x.rows(); ++r)
                    for (std::size_t c = 0; c < x.cols(); ++c)
                        plus(r, c) -= p[r] * v[c];
                for (auto& e : v)
                    e = -e;
                const Vector m = multiply(minus, v);
                for (std::size_t r = 0; r < x.rows(); ++r)
                    for (std::size_t c = 0; c < x.cols(); ++c)
                        minus(r, c) -= m[r] * v[c];
            }
            EXPECT_LT(max_abs_diff(plus, minus), 1e-12);
            EXPECT_LT(max_abs_diff(plus, remove_top_components(x, k, Backend::Exact).residual), 1e-10);
        }
    }
}

TEST(RemoveTopComponents, ProjectionNulling)
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Matrix x = random_matrix(4 + seed % 12, 4 + seed % 20, 50'000 + seed);
        for (auto backend : {Backend::Exact, Backend::Randomized}) {
            RsvdConfig cfg;
            cfg.seed = RngSeed{seed};
            const auto out = remove_top_components(x, 1 + seed % 3, backend, cfg);
            for (const auto& comp : out.removed)
                for (std::size_t r = 0; r < x.rows(); ++r) {
                    const auto row = out.residual.row(r);
                    EXPECT_LE(std::abs(dot(row, comp.direction)), 1e-6 * (norm2(row) + 1.0));
                }
        }
    }
}

TEST(RemoveTopComponents, EnergyAccounting)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Matrix x = random_matrix(5 + seed % 20, 3 + seed % 15, 80'000 + seed);
        const auto out = remove_top_components(x, 1 + seed % 3, Backend::Exact);
        double removed = 0.0;
        for (const auto& c : out.removed)
            removed += c.sigma * c.sigma;
        const double total = std::pow(frobenius_norm(x), 2);
        EXPECT_NEAR(total, std::pow(frobenius_norm(out.residual), 2) + removed, 1e-6 * total);
    }
}

TEST(RemoveTopComponents, ResidualTopSingularValueIsOldSecond)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Matrix x = random_matrix(6 + seed % 10, 4 + seed % 9, 90'000 + seed);
        const auto before = exact_svd(x).sigma;
        const auto after = exact_svd(remove_top_components(x, 1, Backend::Exact).residual).sigma;
        EXPECT_NEAR(after[0], before[1], 1e-8 * before[0]);
    }
}

TEST(RemoveTopComponents, RankBelowKRecordsFewerRemovals)
{
    const Matrix x = random_matrix(8, 1, 3) * random_matrix(1, 6, 4);  // rank 1
    const auto out = remove_top_components(x, 3, Backend::Exact);
    EXPECT_EQ(out.removed.size(), 1U);
    EXPECT_LT(frobenius_norm(out.residual), 1e-10 * frobenius_norm(x));
}

TEST(RemoveTopComponents, InvalidK)
{
    EXPECT_EQ(code_of([] { remove_top_components(Matrix(3, 2, 1.0), 3, Backend::Exact); }), ErrorCode::InvalidK);
}

TEST(Rank1ResidualOracle, Examples)
{
    const Matrix x = random_matrix(5, 4, 5);
    EXPECT_LT(max_abs_diff(rank1_residual_oracle(x, 0), x), 1e-10);
    expect_matrix_near(rank1_residual_oracle(Matrix{{3, 0}, {0, 2}, {0, 0}}, 1), Matrix{{0, 0}, {0, 2}, {0, 0}},
                       1e-12);
    expect_matrix_near(rank1_residual_oracle(Matrix{{1, 2}, {2, 4}}, 1), Matrix(2, 2, 0.0), 1e-12);
}

// ---- pooling -------------------------------------------------------------

TEST(PfsaPool, IdenticalRowsAreFixedPoint)
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Matrix v = random_matrix(1, 8, seed);
        const std::size_t n = 1 + seed % 9;
        Matrix x(n, 8);
        for (std::size_t r = 0; r < n; ++r)
            std::copy_n(v.row(0).begin(), 8, x.row(r).begin());
        const double alpha = 0.25 * static_cast<double>(seed % 9);
        expect_vector_near(pfsa_pool(x, alpha), row_mean(v), 1e-12);
    }
}

TEST(PfsaPool, AlphaZeroIsMean)
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Matrix x = random_matrix(1 + seed % 15, 2 + seed % 12, 200 + seed);
        const Vector pooled = pfsa_pool(x, 0.0);
        const Vector mean = mean_pool(x);
        EXPECT_EQ(pooled, mean);
    }
}

TEST(PfsaPool, PermutationInvariant)
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Matrix x = random_matrix(2 + seed % 15, 2 + seed % 12, 400 + seed);
        expect_vector_near(pfsa_pool(x, 1.5), pfsa_pool(permute_rows(x, seed), 1.5), 1e-12);
    }
}

TEST(PfsaPool, ContextIsConvexCombination)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Matrix x = random_matrix(2 + seed % 10, 3 + seed % 6, 600 + seed);
        const Vector c = pfsa_context(x);
        // inside the bounding box of the rows, the cheap necessary condition
        for (std::size_t j = 0; j < x.cols(); ++j) {
            double lo = x(0, j);
            double hi = x(0, j);
            for (std::size_t r = 1; r < x.rows(); ++r) {
                lo = std::min(lo, x(r, j));
                hi = std::max(hi, x(r, j));
            }
            EXPECT_GE(c[j], lo - 1e-12);
            EXPECT_LE(c[j], hi + 1e-12);
        }
        const Vector pooled = pfsa_pool(x, 1.5);
        const Vector mean = mean_pool(x);
        for (std::size_t j = 0; j < x.cols(); ++j)
            EXPECT_NEAR(pooled[j], -0.5 * mean[j] + 1.5 * c[j], 1e-12);
    }
}

TEST(PfsaPool, SingleRowAndZeroRows)
{
    const Matrix one{{1.0, -2.0, 3.0}};
    expect_vector_near(pfsa_pool(one, 1.5), Vector{1.0, -2.0, 3.0}, 1e-15);
    const Matrix zeros(4, 3, 0.0);
    expect_vector_near(pfsa_pool(zeros, 1.5), Vector(3, 0.0), 0.0);
}

// ---- pipeline ------------------------------------------------------------

TEST(PurifyInstance, RankOneMeanOnlyPoolsToZero)
{
    PurifyConfig cfg;
    cfg.pooling = Pooling::MeanOnly;
    const Matrix x = random_matrix(6, 1, 1) * random_matrix(1, 5, 2);
    const auto out = purify_instance(x, cfg);
    for (double v : out.pooled)
        EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(PurifyInstance, NoRemovalMeanOnlyIsRowMean)
{
    PurifyConfig cfg;
    cfg.remove_k = 0;
    cfg.pooling = Pooling::MeanOnly;
    const Matrix x = random_matrix(7, 5, 3);
    EXPECT_EQ(purify_instance(x, cfg).pooled, mean_pool(x));
    EXPECT_EQ(purify_instance(x, cfg).shortfall, 0U);
}

TEST(PurifyInstance, BackendsAgreeOnLowRankDominantInput)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix x = low_rank_dominant(10, 16, 1000 + seed);
        PurifyConfig exact;
        exact.backend = Backend::Exact;
        PurifyConfig randomized;
        randomized.backend = Backend::Randomized;
        randomized.rsvd.sketch_width = 8;
        randomized.rsvd.power_iters = 2;
        randomized.rsvd.seed = RngSeed{seed};
        const auto a = purify_instance(x, exact);
        const auto b = purify_instance(x, randomized);
        expect_vector_near(a.pooled, b.pooled, 1e-6);
    }
}

TEST(PurifyInstance, ShortInstanceSkipsRemoval)
{
    PurifyConfig cfg;
    const Matrix x{{1.0, 2.0, 3.0}};
    const auto out = purify_instance(x, cfg);
    EXPECT_EQ(out.tokens, x);
    EXPECT_TRUE(out.removed.empty());
    EXPECT_EQ(out.shortfall, 1U);
}

TEST(PurifyInstance, KAboveTokenCountIsClampedWithShortfall)
{
    PurifyConfig cfg;
    cfg.remove_k = 3;
    cfg.backend = Backend::Exact;
    const auto out = purify_instance(random_matrix(2, 6, 8), cfg);
    EXPECT_EQ(out.removed.size(), 2U);
    EXPECT_EQ(out.shortfall, 1U);
}

TEST(PurifyInstance, Errors)
{
    PurifyConfig cfg;
    cfg.remove_k = 5;
    EXPECT_EQ(code_of([&] { purify_instance(random_matrix(8, 4, 1), cfg); }), ErrorCode::InvalidK);
    cfg.remove_k = 1;
    cfg.alpha = std::nan("");
    EXPECT_EQ(code_of([&] { purify_instance(random_matrix(8, 4, 1), cfg); }), ErrorCode::InvalidConfig);
    cfg.alpha = -1.0;
    EXPECT_EQ(code_of([&] { purify_instance(random_matrix(8, 4, 1), cfg); }), ErrorCode::InvalidConfig);
}

TEST(PurifyBatch, EmptyAndSingleton)
{
    PurifyConfig cfg;
    EXPECT_TRUE(purify_batch(InstanceBatch{}, cfg).empty());

    const Matrix x = random_matrix(6, 5, 2);
    const auto batch = InstanceBatch::from_instances({x});
    const auto out = purify_batch(batch, cfg);
    ASSERT_EQ(out.size(), 1U);
    EXPECT_EQ(out[0].pooled, purify_instance(x, cfg).pooled);
}

TEST(PurifyBatch, BitIdenticalAcrossThreadCounts)
{
    std::vector<Matrix> instances;
    for (std::uint64_t i = 0; i < 64; ++i)
        instances.push_back(random_matrix(3 + i % 14, 12, 3000 + i));
    const auto batch = InstanceBatch::from_instances(instances);
    PurifyConfig cfg;
    const auto serial = purify_batch(batch, cfg, 1);
    for (unsigned threads : {2U, 4U, 7U, 0U}) {
        const auto parallel = purify_batch(batch, cfg, threads);
        ASSERT_EQ(parallel.size(), serial.size());
        for (std::size_t i = 0; i < serial.size(); ++i) {
            EXPECT_EQ(parallel[i].pooled, serial[i].pooled);
            EXPECT_EQ(parallel[i].tokens, serial[i].tokens);
        }
    }
}

TEST(PurifyBatch, ReportsLowestFailingInstance)
{
    std::vector<Matrix> instances;
    for (std::uint64_t i = 0; i < 10; ++i)
        instances.push_back(random_matrix(4, 3, 10 + i));
    auto batch = InstanceBatch::from_instances(instances);
    batch.tokens(4 * 7 + 1, 2) = std::nan("");
    batch.tokens(4 * 3, 0) = std::numeric_limits<double>::infinity();
    PurifyConfig cfg;
    for (unsigned threads : {1U, 4U}) {
        try {
            purify_batch(batch, cfg, threads);
            FAIL() << "expected failure";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::NonFinite);
            ASSERT_TRUE(e.instance_index().has_value());
            EXPECT_EQ(*e.instance_index(), 3U);
        }
    }
}

TEST(StackPooled, RowsFollowInstances)
{
    std::vector<Matrix> instances{random_matrix(3, 4, 1), random_matrix(5, 4, 2)};
    PurifyConfig cfg;
    const auto out = purify_batch(InstanceBatch::from_instances(instances), cfg);
    const Matrix stacked = stack_pooled(out, 4);
    ASSERT_EQ(stacked.rows(), 2U);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            EXPECT_EQ(stacked(i, j), out[i].pooled[j]);
}
