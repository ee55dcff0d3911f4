#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pure/batch.hpp"
#include "pure/purify.hpp"
#include "pure/rng.hpp"

namespace pure {

/// Two-class synthetic token clouds with one dominant shared direction.
struct SynthConfig {
    std::size_t n_instances = 200;
    std::size_t tokens_per_instance = 16;
    std::size_t dim = 8;
    /// Standard deviation of each token's coordinate along e1.
    double dominant_scale = 10.0;
    /// Class means sit at +-(class_separation / 2) e2.
    double class_separation = 1.0;
    RngSeed seed{};
};

enum class DirectionMode { TopPC, Random };

struct RobustnessReport {
    double flip_rate_baseline = 0.0;
    double flip_rate_purified = 0.0;
    double epsilon = 0.0;
    DirectionMode direction_mode = DirectionMode::TopPC;
};

/// Throws InvalidConfig unless dominant_scale > 1, class_separation >= 0,
/// dim >= 2 and the counts are positive.
void validate(const SynthConfig& cfg);

/// Instance i has label i % 2. Every token is
///   (+-sep/2) e2 + a e1 + noise,  a ~ N(0, dominant_scale^2),
/// with unit Gaussian noise on every coordinate except e1.
InstanceBatch synth_batch(const SynthConfig& cfg);

/// Corpus whose tokens are weight * c + (1 - weight) * z, with c a unit
/// vector shared by the whole corpus and z ~ N(0, I / dim).
std::vector<Matrix> synth_shared_direction_corpus(std::size_t n_instances, std::size_t tokens, std::size_t dim,
                                                  double weight, RngSeed seed);

/// Adds epsilon * direction to every row. Throws NotUnitDirection unless
/// |direction| = 1 within 1e-9.
Matrix directional_perturb(const Matrix& x, std::span<const double> direction, double epsilon);

/// Nearest-centroid predictions (ties go to the smaller label).
struct CentroidProbe {
    std::vector<int> classes;
    std::vector<Vector> centroids;

    /// Throws MissingClass when fewer than two distinct labels are present.
    static CentroidProbe fit(const Matrix& vectors, std::span<const int> labels);
    int predict(std::span<const double> x) const;
};

/// Fraction of rows whose nearest-centroid class changes between the clean
/// and perturbed vectors; centroids are fitted on the clean vectors.
double probe_flip_rate(const Matrix& clean, const Matrix& perturbed, std::span<const int> labels);

/// Pools each instance with remove_k = 0 (baseline) and with purify_cfg,
/// perturbs raw tokens by epsilon along the batch top PC (or a seeded random
/// unit direction) and reports both flip rates.
RobustnessReport run_experiment(const SynthConfig& cfg, const PurifyConfig& purify_cfg, double epsilon,
                                DirectionMode mode = DirectionMode::TopPC);

}  // namespace pure
