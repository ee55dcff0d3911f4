// Command-line front end: purify, svd, isotropy, metrics, synth-bench.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error, 3 numerical failure.

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

#include <CLI11.hpp>

#include "pure/config.hpp"
#include "pure/error.hpp"
#include "pure/io.hpp"
#include "pure/isotropy.hpp"
#include "pure/metrics.hpp"
#include "pure/npy.hpp"
#include "pure/purify.hpp"
#include "pure/report.hpp"
#include "pure/rsvd.hpp"

namespace {

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kNumerical = 3 };

// PURE_LOG=quiet|info|debug; affects stderr chatter only.
enum class LogLevel { Quiet, Info, Debug };

LogLevel log_level()
{
    const char* env = std::getenv("PURE_LOG");
    if (!env)
        return LogLevel::Info;
    const std::string_view v(env);
    if (v == "quiet" || v == "off" || v == "error")
        return LogLevel::Quiet;
    if (v == "debug" || v == "trace")
        return LogLevel::Debug;
    return LogLevel::Info;
}

void log(LogLevel level, const std::string& msg)
{
    static const LogLevel threshold = log_level();
    if (threshold != LogLevel::Quiet && level <= threshold)
        std::cerr << "[pure] " << msg << "\n";
}

int exit_code(pure::ErrorCategory c)
{
    switch (c) {
    case pure::ErrorCategory::Io: return kIo;
    case pure::ErrorCategory::Numerical: return kNumerical;
    case pure::ErrorCategory::Validation: return kValidation;
    }
    return kValidation;
}

struct PurifyOptions {
    std::string embeddings;
    std::string meta;
    std::size_t k = 1;
    double alpha = 1.5;
    std::string backend = "rsvd";
    std::size_t r = 8;
    std::size_t q = 2;
    std::uint64_t seed = 42;
    std::string pooling = "pfsa";
    std::size_t min_tokens = 2;
    bool center_first = false;
    std::string out = "pooled.npy";
    std::string report = "report.json";
    std::string tokens_out;
    std::string config;
    unsigned threads = 1;
    bool f32 = false;
};

pure::PurifyConfig to_purify_config(const PurifyOptions& o)
{
    pure::PurifyConfig cfg;
    cfg.remove_k = o.k;
    cfg.alpha = o.alpha;
    cfg.backend = pure::parse_backend(o.backend);
    cfg.rsvd.sketch_width = o.r;
    cfg.rsvd.power_iters = o.q;
    cfg.rsvd.seed = pure::RngSeed{o.seed};
    cfg.rsvd.target_rank = std::max<std::size_t>(1, o.k);
    cfg.pooling = pure::parse_pooling(o.pooling);
    cfg.min_tokens_for_removal = o.min_tokens;
    cfg.center_first = o.center_first;
    pure::validate(cfg);
    return cfg;
}

void run_purify(PurifyOptions o)
{
    pure::PurifyConfig cfg;
    if (!o.config.empty()) {
        // flags given on the command line are ignored when a config file is used
        const pure::RunConfig run = pure::load_run_config(o.config);
        cfg = run.purify;
        if (o.embeddings.empty())
            o.embeddings = run.paths.embeddings.string();
        if (o.meta.empty())
            o.meta = run.paths.meta.string();
        if (!run.paths.out.empty())
            o.out = run.paths.out.string();
        if (!run.paths.report.empty())
            o.report = run.paths.report.string();
    } else {
        cfg = to_purify_config(o);
    }
    if (o.embeddings.empty() || o.meta.empty())
        pure::fail(pure::ErrorCode::BadConfig, "--embeddings and --meta are required");

    const pure::InstanceBatch batch = pure::read_instances(o.embeddings, o.meta);
    log(LogLevel::Info, "purifying " + std::to_string(batch.size()) + " instances, d = " + std::to_string(batch.dim()));
    const auto out = pure::purify_batch(batch, cfg, o.threads);

    const auto precision = o.f32 ? pure::NpyPrecision::Float32 : pure::NpyPrecision::Float64;
    pure::write_npy(pure::stack_pooled(out, batch.dim()), o.out, precision);
    if (!o.tokens_out.empty()) {
        std::vector<pure::Matrix> tokens;
        tokens.reserve(out.size());
        for (const auto& inst : out)
            tokens.push_back(inst.tokens);
        pure::write_npy(pure::vstack(tokens), o.tokens_out, precision);
    }
    if (!o.report.empty())
        pure::write_text_file(o.report, pure::purify_report_json(cfg, batch, out));
    log(LogLevel::Debug, "wrote " + o.out);
}

struct SvdOptions {
    std::string input;
    std::size_t rank = 1;
    std::string backend = "exact";
    std::size_t r = 8;
    std::size_t q = 2;
    std::uint64_t seed = 42;
    std::string out_sigma = "s.npy";
    std::string out_v = "V.npy";
    std::string out_u;
};

void run_svd(const SvdOptions& o)
{
    const pure::Matrix a = pure::read_npy(o.input);
    if (o.rank < 1 || o.rank > std::min(a.rows(), a.cols()))
        pure::fail(pure::ErrorCode::InvalidConfig, "--rank must lie in [1, min(rows, cols)]");
    pure::SvdResult svd;
    if (pure::parse_backend(o.backend) == pure::Backend::Exact) {
        svd = pure::exact_svd(a);
    } else {
        pure::RsvdConfig cfg;
        cfg.sketch_width = o.r;
        cfg.power_iters = o.q;
        cfg.target_rank = o.rank;
        cfg.seed = pure::RngSeed{o.seed};
        svd = pure::rsvd(a, cfg);
    }
    pure::Vector sigma(svd.sigma.begin(), svd.sigma.begin() + static_cast<std::ptrdiff_t>(o.rank));
    pure::write_npy_vector(sigma, o.out_sigma);
    pure::write_npy(svd.v.left_cols(o.rank), o.out_v);
    if (!o.out_u.empty())
        pure::write_npy(svd.u.left_cols(o.rank), o.out_u);
}

struct IsotropyOptions {
    std::string embeddings;
    std::string meta;
    std::size_t pairs = pure::kDefaultPairs;
    std::uint64_t seed = 42;
    std::string out = "iso.json";
    std::size_t k = 0;
    std::string backend = "rsvd";
    std::size_t r = 8;
    std::size_t q = 2;
};

void run_isotropy(const IsotropyOptions& o)
{
    const pure::InstanceBatch batch = pure::read_instances(o.embeddings, o.meta);
    std::vector<pure::Matrix> corpus;
    corpus.reserve(batch.size());

    pure::PurifyConfig cfg;
    const bool purify = o.k > 0;
    if (purify) {
        cfg.remove_k = o.k;
        cfg.backend = pure::parse_backend(o.backend);
        cfg.rsvd.sketch_width = o.r;
        cfg.rsvd.power_iters = o.q;
        cfg.rsvd.seed = pure::RngSeed{o.seed};
        cfg.pooling = pure::Pooling::MeanOnly;
        for (auto& inst : pure::purify_batch(batch, cfg))
            corpus.push_back(std::move(inst.tokens));
    } else {
        for (std::size_t i = 0; i < batch.size(); ++i)
            corpus.push_back(batch.instance(i));
    }
    const auto rep = pure::isotropy_report(corpus, o.pairs, pure::RngSeed{o.seed});
    pure::write_text_file(o.out, pure::isotropy_json(rep, o.pairs, pure::RngSeed{o.seed}, corpus.size(),
                                                     purify ? &cfg : nullptr));
}

struct MetricsOptions {
    std::string records;
    std::string out = "metrics.json";
    bool successful_only = false;
};

void run_metrics(const MetricsOptions& o)
{
    const auto records = pure::read_attack_records(o.records);
    const auto mode = o.successful_only ? pure::QueryAverage::SuccessfulOnly : pure::QueryAverage::AllAttacked;
    pure::write_text_file(o.out, pure::metrics_json(pure::compute_metrics(records, mode), mode));
}

struct BenchOptions {
    std::string config;
    std::string out = "robustness.json";
};

void run_bench(const BenchOptions& o)
{
    const pure::RunConfig cfg = o.config.empty() ? pure::RunConfig{} : pure::load_run_config(o.config);
    pure::validate(cfg);
    std::vector<pure::BenchRun> runs;
    for (std::size_t i = 0; i < cfg.bench.n_seeds; ++i) {
        pure::SynthConfig synth = cfg.synth;
        synth.seed.value = cfg.synth.seed.value + i;
        for (auto mode : cfg.bench.modes) {
            runs.push_back({synth.seed.value, pure::run_experiment(synth, cfg.purify, cfg.bench.epsilon, mode)});
            log(LogLevel::Debug, "seed " + std::to_string(synth.seed.value) + " " +
                                     std::string(pure::to_string(mode)) + " done");
        }
    }
    pure::write_text_file(o.out, pure::bench_json(cfg, runs));
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Instance-level embedding purification: principal component removal, "
                 "parameter-free attention pooling, isotropy and robustness metrics"};
    app.require_subcommand(1);

    PurifyOptions purify;
    auto* p = app.add_subcommand("purify", "Remove top principal components per instance and pool");
    p->add_option("--embeddings", purify.embeddings, "Stacked token embeddings (.npy)");
    p->add_option("--meta", purify.meta, "Instance metadata (.jsonl)");
    p->add_option("--k", purify.k, "Components to remove per instance")->capture_default_str();
    p->add_option("--alpha", purify.alpha, "Attention pooling scale")->capture_default_str();
    p->add_option("--backend", purify.backend, "exact | rsvd")->capture_default_str();
    p->add_option("--r", purify.r, "Sketch width (Gaussian vectors)")->capture_default_str();
    p->add_option("--q", purify.q, "Power iterations")->capture_default_str();
    p->add_option("--seed", purify.seed, "RNG seed")->capture_default_str();
    p->add_option("--pooling", purify.pooling, "pfsa | mean")->capture_default_str();
    p->add_option("--min-tokens", purify.min_tokens, "Skip removal below this many tokens")->capture_default_str();
    p->add_flag("--center-first", purify.center_first, "Mean-centre each instance before removal");
    p->add_option("--out", purify.out, "Pooled vectors (.npy)")->capture_default_str();
    p->add_option("--report", purify.report, "JSON run report")->capture_default_str();
    p->add_option("--tokens-out", purify.tokens_out, "Also write purified token rows (.npy)");
    p->add_option("--config", purify.config, "TOML run config");
    p->add_option("--threads", purify.threads, "Worker threads (0 = all cores)")->capture_default_str();
    p->add_flag("--f32", purify.f32, "Write float32 output");

    SvdOptions svd;
    auto* s = app.add_subcommand("svd", "Top singular triplets of a matrix");
    s->add_option("--input", svd.input, "Input matrix (.npy)")->required();
    s->add_option("--rank", svd.rank, "Triplets to keep")->capture_default_str();
    s->add_option("--backend", svd.backend, "exact | rsvd")->capture_default_str();
    s->add_option("--r", svd.r, "Sketch width")->capture_default_str();
    s->add_option("--q", svd.q, "Power iterations")->capture_default_str();
    s->add_option("--seed", svd.seed, "RNG seed")->capture_default_str();
    s->add_option("--out-sigma", svd.out_sigma, "Singular values (.npy, 1-D)")->capture_default_str();
    s->add_option("--out-v", svd.out_v, "Right singular vectors (.npy, cols x rank)")->capture_default_str();
    s->add_option("--out-u", svd.out_u, "Left singular vectors (.npy, rows x rank)");

    IsotropyOptions iso;
    auto* i = app.add_subcommand("isotropy", "Intra-instance similarity, anisotropy baseline and PC shares");
    i->add_option("--embeddings", iso.embeddings, "Stacked token embeddings (.npy)")->required();
    i->add_option("--meta", iso.meta, "Instance metadata (.jsonl)")->required();
    i->add_option("--pairs", iso.pairs, "Sampled cross-instance pairs (0 = all)")->capture_default_str();
    i->add_option("--seed", iso.seed, "RNG seed")->capture_default_str();
    i->add_option("--out", iso.out, "JSON report")->capture_default_str();
    i->add_option("--k", iso.k, "Purify with k components first (0 = raw)")->capture_default_str();
    i->add_option("--backend", iso.backend, "exact | rsvd (with --k)")->capture_default_str();
    i->add_option("--r", iso.r, "Sketch width (with --k)")->capture_default_str();
    i->add_option("--q", iso.q, "Power iterations (with --k)")->capture_default_str();

    MetricsOptions met;
    auto* m = app.add_subcommand("metrics", "Acc/Aua/Asr/AvgQ/Pdr/Apdr from attack records");
    m->add_option("--records", met.records, "Attack records (.jsonl)")->required();
    m->add_option("--out", met.out, "JSON report")->capture_default_str();
    m->add_flag("--avgq-successful-only", met.successful_only, "Average queries over successful attacks only");

    BenchOptions bench;
    auto* b = app.add_subcommand("synth-bench", "Synthetic perturbation robustness experiment");
    b->add_option("--config", bench.config, "TOML config");
    b->add_option("--out", bench.out, "JSON report")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*p)
            run_purify(purify);
        else if (*s)
            run_svd(svd);
        else if (*i)
            run_isotropy(iso);
        else if (*m)
            run_metrics(met);
        else if (*b)
            run_bench(bench);
    } catch (const pure::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
    return kOk;
}
