#include <gtest/gtest.h>

#include <cmath>

#include "pure/error.hpp"
#include "pure/harness.hpp"
#include "pure/isotropy.hpp"
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

SynthConfig small_cfg(std::uint64_t seed)
{
    SynthConfig cfg;
    cfg.n_instances = 60;
    cfg.tokens_per_instance = 12;
    cfg.seed = RngSeed{seed};
    return cfg;
}

// Independent nearest-centroid flip count: per-class means, squared
// distances, smaller label wins ties.
double brute_force_flip_rate(const Matrix& clean, const Matrix& perturbed, const std::vector<int>& labels)
{
    Vector c0(clean.cols(), 0.0);
    Vector c1(clean.cols(), 0.0);
    double n0 = 0.0;
    double n1 = 0.0;
    for (std::size_t i = 0; i < clean.rows(); ++i) {
        auto& c = labels[i] == 0 ? c0 : c1;
        (labels[i] == 0 ? n0 : n1) += 1.0;
        for (std::size_t j = 0; j < clean.cols(); ++j)
            c[j] += clean(i, j);
    }
    for (auto& v : c0)
        v /= n0;
    for (auto& v : c1)
        v /= n1;
    auto classify = [&](std::span<const double> x) {
        double d0 = 0.0;
        double d1 = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            d0 += (x[j] - c0[j]) * (x[j] - c0[j]);
            d1 += (x[j] - c1[j]) * (x[j] - c1[j]);
        }
        return d1 < d0 ? 1 : 0;
    };
    int flips = 0;
    for (std::size_t i = 0; i < clean.rows(); ++i)
        flips += classify(clean.row(i)) != classify(perturbed.row(i)) ? 1 : 0;
    return flips / static_cast<double>(clean.rows());
}

}  // namespace

TEST(SynthBatch, DominantDirectionCarriesMostVariance)
{
    SynthConfig cfg;
    cfg.dominant_scale = 10.0;
    cfg.dim = 8;
    const auto batch = synth_batch(cfg);
    EXPECT_GT(pc_variance_shares(batch.tokens)[0], 0.5);
    const auto v = exact_svd(batch.tokens).v;
    EXPECT_GT(std::abs(v(0, 0)), 0.99);
}

TEST(SynthBatch, DeterministicAndLabelled)
{
    const auto a = synth_batch(small_cfg(3));
    const auto b = synth_batch(small_cfg(3));
    EXPECT_EQ(a.tokens, b.tokens);
    EXPECT_EQ(a.spans, b.spans);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_NE(a.tokens, synth_batch(small_cfg(4)).tokens);
    ASSERT_EQ(a.size(), 60U);
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_EQ(a.labels[i], static_cast<int>(i % 2));
    a.validate();
}

TEST(SynthBatch, NoSeparationGivesChanceAccuracy)
{
    SynthConfig cfg;
    cfg.class_separation = 0.0;
    cfg.n_instances = 2000;
    const auto batch = synth_batch(cfg);
    PurifyConfig pcfg;
    pcfg.remove_k = 0;
    pcfg.pooling = Pooling::MeanOnly;
    const Matrix pooled = stack_pooled(purify_batch(batch, pcfg), cfg.dim);

    // fit on the first half, score on the second
    const std::size_t half = batch.size() / 2;
    const std::vector<int> train_labels(batch.labels.begin(), batch.labels.begin() + half);
    const auto probe = CentroidProbe::fit(pooled.row_block(0, half), train_labels);
    std::size_t hits = 0;
    for (std::size_t i = half; i < batch.size(); ++i)
        hits += probe.predict(pooled.row(i)) == batch.labels[i] ? 1 : 0;
    EXPECT_NEAR(static_cast<double>(hits) / static_cast<double>(batch.size() - half), 0.5, 0.05);
}

TEST(SynthBatch, InvalidConfigs)
{
    auto cfg = small_cfg(1);
    cfg.dominant_scale = 1.0;
    EXPECT_EQ(code_of([&] { synth_batch(cfg); }), ErrorCode::InvalidConfig);
    cfg = small_cfg(1);
    cfg.class_separation = -1.0;
    EXPECT_EQ(code_of([&] { synth_batch(cfg); }), ErrorCode::InvalidConfig);
    cfg = small_cfg(1);
    cfg.dim = 1;
    EXPECT_EQ(code_of([&] { synth_batch(cfg); }), ErrorCode::InvalidConfig);
}

TEST(DirectionalPerturb, Examples)
{
    const Matrix x = random_matrix(5, 3, 1);
    const Vector e1{1.0, 0.0, 0.0};
    EXPECT_EQ(directional_perturb(x, e1, 0.0), x);
    const Matrix shifted = directional_perturb(x, e1, 1.0);
    for (std::size_t r = 0; r < 5; ++r) {
        EXPECT_DOUBLE_EQ(shifted(r, 0), x(r, 0) + 1.0);
        EXPECT_EQ(shifted(r, 1), x(r, 1));
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix m = random_matrix(3 + seed, 6, seed);
        const Matrix g = random_matrix(1, 6, seed + 99);
        Vector dir(g.data().begin(), g.data().end());
        const double norm = norm2(dir);
        for (auto& v : dir)
            v /= norm;
        const double eps = 0.1 + static_cast<double>(seed);
        const double moved = frobenius_norm(directional_perturb(m, dir, eps) - m);
        EXPECT_NEAR(moved, eps * std::sqrt(static_cast<double>(m.rows())), 1e-9 * (1.0 + eps));
    }
    EXPECT_EQ(code_of([&] { directional_perturb(x, Vector{1.0, 1.0, 0.0}, 1.0); }), ErrorCode::NotUnitDirection);
}

TEST(ProbeFlipRate, IdenticalIsZero)
{
    const Matrix v = random_matrix(20, 4, 2);
    std::vector<int> labels(20);
    for (std::size_t i = 0; i < 20; ++i)
        labels[i] = static_cast<int>(i % 2);
    EXPECT_EQ(probe_flip_rate(v, v, labels), 0.0);
}

TEST(ProbeFlipRate, ReflectionThroughMidpointFlipsEverything)
{
    Matrix v{{-2.0, 0.3}, {-1.5, -0.7}, {1.0, 0.2}, {2.5, -0.1}};
    const std::vector<int> labels{0, 0, 1, 1};
    // centroids at x = -1.75 and x = 1.75; reflect x through 0
    Matrix reflected = v;
    for (std::size_t r = 0; r < 4; ++r)
        reflected(r, 0) = -v(r, 0);
    EXPECT_EQ(probe_flip_rate(v, reflected, labels), 1.0);
}

TEST(ProbeFlipRate, MatchesBruteForceOracle)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix clean = random_matrix(50, 6, 100 + seed);
        const Matrix perturbed = clean + random_matrix(50, 6, 200 + seed) * 0.8;
        std::vector<int> labels(50);
        for (std::size_t i = 0; i < 50; ++i)
            labels[i] = static_cast<int>((i * 7 + seed) % 2);
        EXPECT_EQ(probe_flip_rate(clean, perturbed, labels), brute_force_flip_rate(clean, perturbed, labels));
    }
}

TEST(ProbeFlipRate, MissingClass)
{
    const Matrix v = random_matrix(4, 2, 1);
    const std::vector<int> labels{1, 1, 1, 1};
    EXPECT_EQ(code_of([&] { probe_flip_rate(v, v, labels); }), ErrorCode::MissingClass);
}

TEST(RunExperiment, ZeroEpsilonFlipsNothing)
{
    const auto rep = run_experiment(small_cfg(5), PurifyConfig{}, 0.0);
    EXPECT_EQ(rep.flip_rate_baseline, 0.0);
    EXPECT_EQ(rep.flip_rate_purified, 0.0);
}

TEST(RunExperiment, DeterministicReport)
{
    const auto a = run_experiment(small_cfg(6), PurifyConfig{}, 2.0);
    const auto b = run_experiment(small_cfg(6), PurifyConfig{}, 2.0);
    EXPECT_EQ(a.flip_rate_baseline, b.flip_rate_baseline);
    EXPECT_EQ(a.flip_rate_purified, b.flip_rate_purified);
    EXPECT_GE(a.flip_rate_baseline, 0.0);
    EXPECT_LE(a.flip_rate_baseline, 1.0);
}

TEST(RunExperiment, RandomDirectionSmallEpsilonRarelyFlips)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto rep = run_experiment(small_cfg(seed), PurifyConfig{}, 0.1, DirectionMode::Random);
        EXPECT_LT(rep.flip_rate_baseline, 0.1);
        EXPECT_LT(rep.flip_rate_purified, 0.1);
    }
}

TEST(RunExperiment, PerturbationAlongRemovedDirectionIsNulled)
{
    const auto batch = synth_batch(small_cfg(8));
    for (std::size_t i = 0; i < 10; ++i) {
        const Matrix x = batch.instance(i);
        const auto removal = remove_top_components(x, 1, Backend::Exact);
        const auto& v = removal.removed[0].direction;
        const Matrix shifted = directional_perturb(x, v, 5.0);
        // removing the same v from the shifted tokens
        const Matrix proj = shifted * Matrix(v.size(), 1, v);
        const Matrix nulled = shifted - proj * Matrix(1, v.size(), v);
        for (std::size_t r = 0; r < nulled.rows(); ++r)
            EXPECT_LE(std::abs(dot(nulled.row(r), v)), 1e-6 * (norm2(nulled.row(r)) + 1.0));
        EXPECT_LT(max_abs_diff(nulled, removal.residual), 1e-9);
    }
}
