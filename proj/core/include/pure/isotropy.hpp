#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pure/matrix.hpp"
#include "pure/rng.hpp"

namespace pure {

/// Pass as n_pairs to evaluate every cross-instance token pair instead of sampling.
inline constexpr std::size_t kAllPairs = 0;
inline constexpr std::size_t kDefaultPairs = 10000;

struct IsotropyReport {
    double unadjusted = 0.0;           // mean intra-instance similarity
    double anisotropy_estimate = 0.0;  // cross-instance baseline
    double adjusted = 0.0;             // unadjusted - anisotropy_estimate
    Vector pc_variance_shares;
    Vector dim_dominance;
};

/// Mean cosine similarity over all row pairs i < j.
/// Throws TooFewRows for n < 2 and ZeroRow for a row with norm < 1e-12.
double intra_set_similarity(const Matrix& x);

/// Mean cosine similarity between tokens of different instances.
///
/// Pairs are drawn uniformly from all ordered cross-instance token pairs
/// (two uniform token draws, rejecting same-instance pairs), so the
/// estimate is unbiased for the exhaustive mean. n_pairs == kAllPairs
/// computes the exhaustive mean directly.
double anisotropy_baseline(std::span<const Matrix> corpus, std::size_t n_pairs = kDefaultPairs, RngSeed seed = {});

/// Per-dimension share of the cross-instance cosine: entry j is the mean of
/// x_j y_j / (|x| |y|) over the same pairs anisotropy_baseline uses, so the
/// entries sum to the baseline.
Vector dimension_dominance(std::span<const Matrix> corpus, std::size_t n_pairs = kDefaultPairs, RngSeed seed = {});

/// sigma_i^2 / sum_j sigma_j^2 from the exact SVD of x.
Vector pc_variance_shares(const Matrix& x);

/// Mean intra-instance similarity, cross-instance baseline and their
/// difference, plus the PC shares of the stacked corpus.
IsotropyReport isotropy_report(std::span<const Matrix> corpus, std::size_t n_pairs = kDefaultPairs, RngSeed seed = {});

}  // namespace pure
