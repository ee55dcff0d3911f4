#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "pure/error.hpp"
#include "pure/linalg.hpp"
#include "pure/rsvd.hpp"
#include "test_util.hpp"

using namespace pure;
using test::orthonormality_error;
using test::random_matrix;

namespace {

RsvdConfig make_cfg(std::size_t r, std::size_t q, std::size_t t, std::uint64_t seed = 42)
{
    RsvdConfig cfg;
    cfg.sketch_width = r;
    cfg.power_iters = q;
    cfg.target_rank = t;
    cfg.seed = RngSeed{seed};
    return cfg;
}

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;  // sentinel, never expected below
}

}  // namespace

TEST(RangeFinder, CapturesExactRankThree)
{
    const Matrix a = random_matrix(20, 3, 1) * random_matrix(3, 12, 2);
    const Matrix q = randomized_range_finder(a, make_cfg(8, 0, 1));
    ASSERT_EQ(q.rows(), 20U);
    ASSERT_EQ(q.cols(), 8U);
    EXPECT_LT(orthonormality_error(q), 1e-10);
    EXPECT_LT(frobenius_norm(a - q * multiply_tn(q, a)) / frobenius_norm(a), 1e-10);
}

TEST(RangeFinder, ResidualNeverExceedsInput)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix a = random_matrix(16, 12, 40 + seed);
        for (std::size_t q_iters : {0, 1, 2}) {
            const Matrix q = randomized_range_finder(a, make_cfg(4, q_iters, 1, seed));
            EXPECT_LE(frobenius_norm(a - q * multiply_tn(q, a)), frobenius_norm(a));
        }
    }
}

TEST(RangeFinder, BitIdenticalOnRepeat)
{
    const Matrix a = random_matrix(24, 16, 3);
    EXPECT_EQ(randomized_range_finder(a, make_cfg(8, 2, 1)), randomized_range_finder(a, make_cfg(8, 2, 1)));
}

TEST(Rsvd, AxisAlignedRankOne)
{
    const Matrix a{{5, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    const auto res = rsvd(a, make_cfg(2, 0, 1));
    ASSERT_EQ(res.sigma.size(), 1U);
    EXPECT_NEAR(res.sigma[0], 5.0, 1e-10);
    EXPECT_NEAR(std::abs(res.v(0, 0)), 1.0, 1e-10);
    EXPECT_NEAR(res.v(1, 0), 0.0, 1e-10);
    EXPECT_NEAR(res.v(2, 0), 0.0, 1e-10);
}

TEST(Rsvd, RecoversPlantedSpectrum)
{
    const std::vector<double> spectrum{1.0, 0.5, 0.25, 0.125};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix a = test::planted_spectrum(20, 12, spectrum, 77 + seed);
        const auto res = rsvd(a, make_cfg(4, 2, 4, seed));
        ASSERT_EQ(res.sigma.size(), 4U);
        for (std::size_t i = 0; i < 4; ++i)
            EXPECT_NEAR(res.sigma[i], spectrum[i], 1e-8 * spectrum[i]);
        EXPECT_LT(orthonormality_error(res.u), 1e-8);
        EXPECT_LT(orthonormality_error(res.v), 1e-8);
    }
}

TEST(Rsvd, DenseFullRankTopValueWithinTwoPercent)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix a = random_matrix(24, 16, 300 + seed);
        const double exact = exact_svd(a).sigma[0];
        const double approx = rsvd(a, make_cfg(8, 2, 1, seed)).sigma[0];
        EXPECT_LT(std::abs(approx - exact) / exact, 2e-2) << "seed " << seed;
    }
}

TEST(Rsvd, NeverExceedsExactSingularValues)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t rows = 6 + seed % 20;
        const std::size_t cols = 5 + (seed * 3) % 17;
        const Matrix a = random_matrix(rows, cols, 700 + seed);
        const std::size_t r = std::min<std::size_t>(std::min(rows, cols), 5);
        const auto exact = exact_svd(a).sigma;
        const auto approx = rsvd(a, make_cfg(r, seed % 3, r, seed)).sigma;
        for (std::size_t i = 0; i < approx.size(); ++i)
            EXPECT_LE(approx[i], exact[i] + 1e-8);
    }
}

TEST(Rsvd, PowerIterationsReduceErrorOnAverage)
{
    const Matrix a = random_matrix(24, 16, 2024);
    const double exact = exact_svd(a).sigma[0];
    double err_q0 = 0.0;
    double err_q2 = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        err_q0 += std::abs(rsvd(a, make_cfg(8, 0, 1, seed)).sigma[0] - exact) / exact;
        err_q2 += std::abs(rsvd(a, make_cfg(8, 2, 1, seed)).sigma[0] - exact) / exact;
    }
    EXPECT_LE(err_q2, err_q0);
}

TEST(Rsvd, DeterministicAcrossThreads)
{
    const Matrix a = random_matrix(32, 20, 5);
    const auto cfg = make_cfg(8, 2, 3);
    const auto reference = rsvd(a, cfg);
    std::vector<SvdResult> results(8);
    {
        std::vector<std::jthread> workers;
        for (std::size_t i = 0; i < results.size(); ++i)
            workers.emplace_back([&, i] { results[i] = rsvd(a, cfg); });
    }
    for (const auto& r : results) {
        EXPECT_EQ(r.sigma, reference.sigma);
        EXPECT_EQ(r.u, reference.u);
        EXPECT_EQ(r.v, reference.v);
    }
}

TEST(Rsvd, StreamChangesSketch)
{
    const Matrix a = random_matrix(24, 16, 9);
    auto c0 = make_cfg(2, 0, 1);
    auto c1 = c0;
    c1.stream = 1;
    EXPECT_NE(randomized_range_finder(a, c0), randomized_range_finder(a, c1));
}

TEST(Rsvd, Errors)
{
    const Matrix a = random_matrix(6, 4, 1);
    EXPECT_EQ(code_of([&] { rsvd(a, make_cfg(5, 0, 1)); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([&] { rsvd(a, make_cfg(2, 0, 3)); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([&] { rsvd(a, make_cfg(2, 0, 0)); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([&] { rsvd(Matrix(6, 4, 0.0), make_cfg(2, 0, 1)); }), ErrorCode::ZeroMatrix);
}
