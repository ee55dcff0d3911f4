#include "pure/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pure/error.hpp"
#include "pure/linalg.hpp"

namespace pure {

namespace {

// Stream ids keep the synthetic draws apart from the sketch streams, which
// are indexed by instance.
constexpr std::uint64_t kDirectionStream = 0x5eed'd1ec'0000'0001ULL;
constexpr std::uint64_t kCorpusStream = 0x5eed'd1ec'0000'0002ULL;
constexpr std::uint64_t kBatchStream = 0x5eed'd1ec'0000'0003ULL;

Matrix pooled_vectors(const InstanceBatch& batch, const PurifyConfig& cfg)
{
    return stack_pooled(purify_batch(batch, cfg), batch.dim());
}

}  // namespace

void validate(const SynthConfig& cfg)
{
    if (cfg.n_instances == 0 || cfg.tokens_per_instance == 0)
        fail(ErrorCode::InvalidConfig, "instance and token counts must be positive");
    if (cfg.dim < 2)
        fail(ErrorCode::InvalidConfig, "dim must be >= 2");
    if (!(cfg.dominant_scale > 1.0) || !std::isfinite(cfg.dominant_scale))
        fail(ErrorCode::InvalidConfig, "dominant_scale must be > 1");
    if (!(cfg.class_separation >= 0.0) || !std::isfinite(cfg.class_separation))
        fail(ErrorCode::InvalidConfig, "class_separation must be >= 0");
}

InstanceBatch synth_batch(const SynthConfig& cfg)
{
    validate(cfg);
    GaussianSampler gauss(cfg.seed, kBatchStream);
    InstanceBatch batch;
    const std::size_t total = cfg.n_instances * cfg.tokens_per_instance;
    batch.tokens = Matrix(total, cfg.dim);
    for (std::size_t i = 0; i < cfg.n_instances; ++i) {
        const int label = static_cast<int>(i % 2);
        const double mean = (label == 0 ? -0.5 : 0.5) * cfg.class_separation;
        const std::size_t start = i * cfg.tokens_per_instance;
        for (std::size_t t = 0; t < cfg.tokens_per_instance; ++t) {
            auto row = batch.tokens.row(start + t);
            row[0] = cfg.dominant_scale * gauss.next();
            for (std::size_t j = 1; j < cfg.dim; ++j)
                row[j] = gauss.next();
            row[1] += mean;
        }
        batch.spans.push_back({start, cfg.tokens_per_instance});
        batch.labels.push_back(label);
    }
    return batch;
}

std::vector<Matrix> synth_shared_direction_corpus(std::size_t n_instances, std::size_t tokens, std::size_t dim,
                                                  double weight, RngSeed seed)
{
    if (n_instances == 0 || tokens == 0 || dim == 0)
        fail(ErrorCode::InvalidArgument, "corpus dimensions must be positive");
    GaussianSampler gauss(seed, kCorpusStream);
    Vector common(dim);
    for (auto& c : common)
        c = gauss.next();
    const double norm = norm2(common);
    for (auto& c : common)
        c /= norm;

    const double noise_scale = (1.0 - weight) / std::sqrt(static_cast<double>(dim));
    std::vector<Matrix> corpus;
    corpus.reserve(n_instances);
    for (std::size_t i = 0; i < n_instances; ++i) {
        Matrix m(tokens, dim);
        for (std::size_t t = 0; t < tokens; ++t) {
            auto row = m.row(t);
            for (std::size_t j = 0; j < dim; ++j)
                row[j] = weight * common[j] + noise_scale * gauss.next();
        }
        corpus.push_back(std::move(m));
    }
    return corpus;
}

Matrix directional_perturb(const Matrix& x, std::span<const double> direction, double epsilon)
{
    if (direction.size() != x.cols())
        fail(ErrorCode::ShapeMismatch, "direction length differs from embedding dimension");
    if (std::abs(norm2(direction) - 1.0) > 1e-9)
        fail(ErrorCode::NotUnitDirection, "perturbation direction must have unit norm");
    Matrix out = x;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < row.size(); ++c)
            row[c] += epsilon * direction[c];
    }
    return out;
}

CentroidProbe CentroidProbe::fit(const Matrix& vectors, std::span<const int> labels)
{
    if (labels.size() != vectors.rows())
        fail(ErrorCode::ShapeMismatch, "one label per vector required");
    CentroidProbe probe;
    probe.classes.assign(labels.begin(), labels.end());
    std::sort(probe.classes.begin(), probe.classes.end());
    probe.classes.erase(std::unique(probe.classes.begin(), probe.classes.end()), probe.classes.end());
    if (probe.classes.size() < 2)
        fail(ErrorCode::MissingClass, "nearest-centroid probe needs at least two classes");

    std::vector<std::size_t> counts(probe.classes.size(), 0);
    probe.centroids.assign(probe.classes.size(), Vector(vectors.cols(), 0.0));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto k = static_cast<std::size_t>(
            std::lower_bound(probe.classes.begin(), probe.classes.end(), labels[i]) - probe.classes.begin());
        ++counts[k];
        auto row = vectors.row(i);
        for (std::size_t c = 0; c < row.size(); ++c)
            probe.centroids[k][c] += row[c];
    }
    for (std::size_t k = 0; k < counts.size(); ++k)
        for (auto& v : probe.centroids[k])
            v /= static_cast<double>(counts[k]);
    return probe;
}

int CentroidProbe::predict(std::span<const double> x) const
{
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centroids.size(); ++k) {
        double d = 0.0;
        for (std::size_t c = 0; c < x.size(); ++c) {
            const double diff = x[c] - centroids[k][c];
            d += diff * diff;
        }
        if (d < best_dist) {
            best_dist = d;
            best = k;
        }
    }
    return classes[best];
}

double probe_flip_rate(const Matrix& clean, const Matrix& perturbed, std::span<const int> labels)
{
    if (clean.rows() != perturbed.rows() || clean.cols() != perturbed.cols())
        fail(ErrorCode::ShapeMismatch, "clean and perturbed vectors differ in shape");
    const CentroidProbe probe = CentroidProbe::fit(clean, labels);
    std::size_t flips = 0;
    for (std::size_t i = 0; i < clean.rows(); ++i)
        if (probe.predict(clean.row(i)) != probe.predict(perturbed.row(i)))
            ++flips;
    return static_cast<double>(flips) / static_cast<double>(clean.rows());
}

RobustnessReport run_experiment(const SynthConfig& cfg, const PurifyConfig& purify_cfg, double epsilon,
                                DirectionMode mode)
{
    if (!std::isfinite(epsilon))
        fail(ErrorCode::InvalidConfig, "epsilon must be finite");
    const InstanceBatch batch = synth_batch(cfg);

    Vector direction;
    if (mode == DirectionMode::TopPC) {
        direction = exact_svd(batch.tokens).v.col(0);
    } else {
        const Matrix g = gaussian_matrix(1, cfg.dim, cfg.seed, kDirectionStream);
        direction.assign(g.data().begin(), g.data().end());
        const double norm = norm2(direction);
        for (auto& v : direction)
            v /= norm;
    }

    InstanceBatch perturbed = batch;
    perturbed.tokens = directional_perturb(batch.tokens, direction, epsilon);

    PurifyConfig baseline_cfg = purify_cfg;
    baseline_cfg.remove_k = 0;

    RobustnessReport rep;
    rep.epsilon = epsilon;
    rep.direction_mode = mode;
    rep.flip_rate_baseline = probe_flip_rate(pooled_vectors(batch, baseline_cfg),
                                             pooled_vectors(perturbed, baseline_cfg), batch.labels);
    rep.flip_rate_purified =
        probe_flip_rate(pooled_vectors(batch, purify_cfg), pooled_vectors(perturbed, purify_cfg), batch.labels);
    return rep;
}

}  // namespace pure
