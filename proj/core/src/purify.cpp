#include "pure/purify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "pure/error.hpp"

namespace pure {

void validate(const PurifyConfig& cfg)
{
    if (!std::isfinite(cfg.alpha) || cfg.alpha < 0.0)
        fail(ErrorCode::InvalidConfig, "alpha must be finite and >= 0");
    if (cfg.backend == Backend::Randomized && cfg.rsvd.sketch_width < 1)
        fail(ErrorCode::InvalidConfig, "sketch width must be >= 1");
}

Removal remove_top_components(const Matrix& x, std::size_t k, Backend backend, const RsvdConfig& rsvd_cfg,
                              bool center_first)
{
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n == 0 || d == 0)
        fail(ErrorCode::InvalidArgument, "component removal needs a non-empty matrix");
    if (k > std::min(n, d))
        fail(ErrorCode::InvalidK, "k = " + std::to_string(k) + " exceeds min(n, d) = " + std::to_string(std::min(n, d)));

    Removal out;
    out.residual = x;
    if (center_first) {
        const Vector mean = row_mean(x);
        for (std::size_t r = 0; r < n; ++r) {
            auto row = out.residual.row(r);
            for (std::size_t c = 0; c < d; ++c)
                row[c] -= mean[c];
        }
    }
    if (k == 0 || frobenius_norm(out.residual) <= 1e-30)
        return out;

    SvdResult svd;
    if (backend == Backend::Exact) {
        svd = exact_svd(out.residual);
    } else {
        RsvdConfig cfg = rsvd_cfg;
        cfg.sketch_width = std::max(k, std::min(cfg.sketch_width, std::min(n, d)));
        cfg.target_rank = k;
        svd = rsvd(out.residual, cfg);
    }

    const std::size_t effective = std::min(k, numerical_rank(svd.sigma, n, d));
    if (effective == 0)
        return out;

    const Matrix directions = svd.v.left_cols(effective);
    const Matrix projections = out.residual * directions;  // n x effective
    out.residual = out.residual - projections * directions.transpose();

    out.removed.reserve(effective);
    for (std::size_t i = 0; i < effective; ++i)
        out.removed.push_back({svd.sigma[i], directions.col(i)});
    return out;
}

Matrix rank1_residual_oracle(const Matrix& x, std::size_t k)
{
    if (k > std::min(x.rows(), x.cols()))
        fail(ErrorCode::InvalidK, "k exceeds min(n, d)");
    const SvdResult svd = exact_svd(x);
    Matrix out(x.rows(), x.cols());
    for (std::size_t t = k; t < svd.rank(); ++t) {
        const double s = svd.sigma[t];
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const double ui = svd.u(i, t) * s;
            auto dst = out.row(i);
            for (std::size_t j = 0; j < x.cols(); ++j)
                dst[j] += ui * svd.v(j, t);
        }
    }
    return out;
}

Vector mean_pool(const Matrix& x)
{
    if (x.rows() == 0)
        fail(ErrorCode::InvalidArgument, "pooling needs at least one row");
    return row_mean(x);
}

Vector pfsa_context(const Matrix& x)
{
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n == 0)
        fail(ErrorCode::InvalidArgument, "pooling needs at least one row");

    Matrix normalized = x;
    for (std::size_t r = 0; r < n; ++r) {
        auto row = normalized.row(r);
        const double norm = norm2(row);
        if (norm > 0.0)
            for (auto& v : row)
                v /= norm;
    }
    const Vector query = row_mean(normalized);

    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    Vector scores(n);
    for (std::size_t r = 0; r < n; ++r)
        scores[r] = dot(normalized.row(r), query) * scale;
    const double top = *std::max_element(scores.begin(), scores.end());
    double total = 0.0;
    for (auto& s : scores) {
        s = std::exp(s - top);
        total += s;
    }

    Vector context(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const double w = scores[r] / total;
        auto row = x.row(r);
        for (std::size_t c = 0; c < d; ++c)
            context[c] += w * row[c];
    }
    return context;
}

Vector pfsa_pool(const Matrix& x, double alpha)
{
    const Vector mean = mean_pool(x);
    const Vector context = pfsa_context(x);
    Vector out(mean.size());
    for (std::size_t c = 0; c < out.size(); ++c)
        out[c] = (1.0 - alpha) * mean[c] + alpha * context[c];
    return out;
}

PurifiedInstance purify_instance(const Matrix& x, const PurifyConfig& cfg)
{
    validate(cfg);
    if (x.rows() == 0 || x.cols() == 0)
        fail(ErrorCode::InvalidArgument, "instance has no tokens");
    if (cfg.remove_k > x.cols())
        fail(ErrorCode::InvalidK, "remove_k = " + std::to_string(cfg.remove_k) + " exceeds embedding dimension " +
                                      std::to_string(x.cols()));

    PurifiedInstance out;
    if (x.rows() >= cfg.min_tokens_for_removal && cfg.remove_k > 0) {
        const std::size_t k = std::min(cfg.remove_k, std::min(x.rows(), x.cols()));
        Removal removal = remove_top_components(x, k, cfg.backend, cfg.rsvd, cfg.center_first);
        out.tokens = std::move(removal.residual);
        out.removed = std::move(removal.removed);
    } else {
        out.tokens = x;
    }
    out.shortfall = cfg.remove_k - out.removed.size();
    out.pooled = cfg.pooling == Pooling::MeanOnly ? mean_pool(out.tokens) : pfsa_pool(out.tokens, cfg.alpha);
    return out;
}

std::vector<PurifiedInstance> purify_batch(const InstanceBatch& batch, const PurifyConfig& cfg, unsigned threads)
{
    validate(cfg);
    batch.validate();
    const std::size_t count = batch.size();
    std::vector<PurifiedInstance> out(count);
    std::vector<std::exception_ptr> errors(count);
    if (count == 0)
        return out;

    auto run_one = [&](std::size_t i) {
        try {
            PurifyConfig local = cfg;
            local.rsvd.stream = i;
            out[i] = purify_instance(batch.instance(i), local);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    if (threads == 0)
        threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));

    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i)
            run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++)
                    run_one(i);
            });
    }

    for (std::size_t i = 0; i < count; ++i) {
        if (!errors[i])
            continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const Error& e) {
            throw e.with_instance(i);
        }
    }
    return out;
}

Matrix stack_pooled(const std::vector<PurifiedInstance>& instances, std::size_t dim)
{
    Matrix out(instances.size(), dim);
    for (std::size_t i = 0; i < instances.size(); ++i)
        std::copy(instances[i].pooled.begin(), instances[i].pooled.end(), out.row(i).begin());
    return out;
}

}  // namespace pure
