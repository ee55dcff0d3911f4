#pragma once

#include <cstddef>
#include <vector>

#include "pure/batch.hpp"
#include "pure/linalg.hpp"
#include "pure/rsvd.hpp"

namespace pure {

enum class Backend { Exact, Randomized };
enum class Pooling { PfsaThenMean, MeanOnly };

struct PurifyConfig {
    std::size_t remove_k = 1;
    double alpha = 1.5;
    Backend backend = Backend::Randomized;
    /// sketch_width, power_iters and seed are used by the randomized backend;
    /// target_rank is always taken from remove_k.
    RsvdConfig rsvd{};
    /// Instances with fewer rows skip component removal.
    std::size_t min_tokens_for_removal = 2;
    Pooling pooling = Pooling::PfsaThenMean;
    /// Subtract the column mean before extracting components (ablation only).
    bool center_first = false;
};

/// Throws InvalidConfig for a non-finite or negative alpha.
void validate(const PurifyConfig& cfg);

struct RemovedComponent {
    double sigma = 0.0;
    Vector direction;  // unit right singular vector
};

struct Removal {
    Matrix residual;
    std::vector<RemovedComponent> removed;
};

struct PurifiedInstance {
    Matrix tokens;
    Vector pooled;
    std::vector<RemovedComponent> removed;
    /// Components asked for but not removed because the instance was short
    /// or its numerical rank was below remove_k.
    std::size_t shortfall = 0;
};

/// X - sum_i (X v_i) v_i^T over the top-k right singular vectors of X itself.
///
/// All k directions come from one decomposition. Fewer than k are removed
/// when the numerical rank of X is below k. With the randomized backend the
/// sketch width is clamped to min(n, d) for small instances. Throws InvalidK
/// if k > min(n, d).
Removal remove_top_components(const Matrix& x, std::size_t k, Backend backend, const RsvdConfig& rsvd_cfg = {},
                              bool center_first = false);

/// Brute-force residual sum_{i > k} sigma_i u_i v_i^T from a full exact SVD.
Matrix rank1_residual_oracle(const Matrix& x, std::size_t k);

/// Parameter-free global attention followed by mean pooling.
///
/// Rows are L2-normalised (zero rows stay zero), a global query g is the mean
/// of the normalised rows, scores are (x_i . g) / sqrt(d) and
/// c = sum softmax(s)_i x_i. Each token moves to x_i + alpha (c - x_i), and
/// the result is the row mean: (1 - alpha) mean(X) + alpha c.
Vector pfsa_pool(const Matrix& x, double alpha);

/// Softmax attention context c used by pfsa_pool.
Vector pfsa_context(const Matrix& x);

Vector mean_pool(const Matrix& x);

PurifiedInstance purify_instance(const Matrix& x, const PurifyConfig& cfg);

/// purify_instance over every instance of the batch. Instance i draws its
/// random sketch from PCG stream i of cfg.rsvd.seed, so output is the same
/// for every thread count. threads == 0 uses the hardware concurrency.
///
/// On failure, rethrows the error of the lowest failing instance index.
std::vector<PurifiedInstance> purify_batch(const InstanceBatch& batch, const PurifyConfig& cfg,
                                           unsigned threads = 1);

/// Pooled vectors of a batch as an (instances x d) matrix.
Matrix stack_pooled(const std::vector<PurifiedInstance>& instances, std::size_t dim);

}  // namespace pure
