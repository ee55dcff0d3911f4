#include "pure/config.hpp"

#include <set>

#include <toml.hpp>

#include "pure/error.hpp"
#include "pure/io.hpp"

namespace pure {

namespace {

[[noreturn]] void bad(const std::string& what)
{
    fail(ErrorCode::BadConfig, what);
}

void reject_unknown(const toml::table& table, std::string_view section, std::set<std::string_view> allowed)
{
    for (const auto& [key, value] : table)
        if (!allowed.contains(key.str()))
            bad("unknown key '" + std::string(key.str()) + "' in [" + std::string(section) + "]");
}

template <typename T>
void read_into(const toml::table& t, std::string_view section, std::string_view key, T& dst)
{
    const toml::node* node = t.get(key);
    if (!node)
        return;
    const auto where = "[" + std::string(section) + "]." + std::string(key);
    if constexpr (std::is_same_v<T, bool>) {
        if (auto v = node->value_exact<bool>())
            dst = *v;
        else
            bad(where + " must be a boolean");
    } else if constexpr (std::is_same_v<T, double>) {
        // integers are accepted where floats are expected
        if (auto v = node->value<double>())
            dst = *v;
        else
            bad(where + " must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (auto v = node->value_exact<std::string>())
            dst = *v;
        else
            bad(where + " must be a string");
    } else {
        auto v = node->value_exact<std::int64_t>();
        if (!v || *v < 0)
            bad(where + " must be a non-negative integer");
        dst = static_cast<T>(*v);
    }
}

const toml::table* section(const toml::table& root, std::string_view name)
{
    const toml::node* node = root.get(name);
    if (!node)
        return nullptr;
    if (!node->is_table())
        bad("[" + std::string(name) + "] must be a table");
    return node->as_table();
}

}  // namespace

std::string_view to_string(Backend b) noexcept
{
    return b == Backend::Exact ? "exact" : "rsvd";
}

std::string_view to_string(Pooling p) noexcept
{
    return p == Pooling::MeanOnly ? "mean" : "pfsa";
}

std::string_view to_string(DirectionMode m) noexcept
{
    return m == DirectionMode::TopPC ? "top_pc" : "random";
}

Backend parse_backend(std::string_view s)
{
    if (s == "exact")
        return Backend::Exact;
    if (s == "rsvd")
        return Backend::Randomized;
    fail(ErrorCode::BadConfig, "backend must be 'exact' or 'rsvd', got '" + std::string(s) + "'");
}

Pooling parse_pooling(std::string_view s)
{
    if (s == "pfsa")
        return Pooling::PfsaThenMean;
    if (s == "mean")
        return Pooling::MeanOnly;
    fail(ErrorCode::BadConfig, "pooling must be 'pfsa' or 'mean', got '" + std::string(s) + "'");
}

DirectionMode parse_direction_mode(std::string_view s)
{
    if (s == "top_pc")
        return DirectionMode::TopPC;
    if (s == "random")
        return DirectionMode::Random;
    fail(ErrorCode::BadConfig, "direction mode must be 'top_pc' or 'random', got '" + std::string(s) + "'");
}

RunConfig parse_run_config(std::string_view toml_text)
{
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        bad(std::string("TOML parse error: ") + std::string(e.description()));
    }
    reject_unknown(root, "root", {"purify", "synth", "bench", "paths"});

    RunConfig cfg;
    if (const auto* t = section(root, "purify")) {
        reject_unknown(*t, "purify", {"k", "alpha", "backend", "r", "q", "seed", "pooling", "min_tokens", "center_first"});
        auto& p = cfg.purify;
        read_into(*t, "purify", "k", p.remove_k);
        read_into(*t, "purify", "alpha", p.alpha);
        std::string backend(to_string(p.backend));
        read_into(*t, "purify", "backend", backend);
        p.backend = parse_backend(backend);
        read_into(*t, "purify", "r", p.rsvd.sketch_width);
        read_into(*t, "purify", "q", p.rsvd.power_iters);
        read_into(*t, "purify", "seed", p.rsvd.seed.value);
        std::string pooling(to_string(p.pooling));
        read_into(*t, "purify", "pooling", pooling);
        p.pooling = parse_pooling(pooling);
        read_into(*t, "purify", "min_tokens", p.min_tokens_for_removal);
        read_into(*t, "purify", "center_first", p.center_first);
    }
    if (const auto* t = section(root, "synth")) {
        reject_unknown(*t, "synth",
                       {"n_instances", "tokens_per_instance", "dim", "dominant_scale", "class_separation", "seed"});
        auto& s = cfg.synth;
        read_into(*t, "synth", "n_instances", s.n_instances);
        read_into(*t, "synth", "tokens_per_instance", s.tokens_per_instance);
        read_into(*t, "synth", "dim", s.dim);
        read_into(*t, "synth", "dominant_scale", s.dominant_scale);
        read_into(*t, "synth", "class_separation", s.class_separation);
        read_into(*t, "synth", "seed", s.seed.value);
    }
    if (const auto* t = section(root, "bench")) {
        reject_unknown(*t, "bench", {"epsilon", "seeds", "modes"});
        read_into(*t, "bench", "epsilon", cfg.bench.epsilon);
        read_into(*t, "bench", "seeds", cfg.bench.n_seeds);
        if (const toml::node* modes = t->get("modes")) {
            const auto* arr = modes->as_array();
            if (!arr)
                bad("[bench].modes must be an array of strings");
            cfg.bench.modes.clear();
            for (const auto& m : *arr) {
                auto v = m.value_exact<std::string>();
                if (!v)
                    bad("[bench].modes must be an array of strings");
                cfg.bench.modes.push_back(parse_direction_mode(*v));
            }
        }
    }
    if (const auto* t = section(root, "paths")) {
        reject_unknown(*t, "paths", {"embeddings", "meta", "out", "report"});
        std::string s;
        auto read_path = [&](std::string_view key, std::filesystem::path& dst) {
            s.clear();
            read_into(*t, "paths", key, s);
            if (!s.empty())
                dst = s;
        };
        read_path("embeddings", cfg.paths.embeddings);
        read_path("meta", cfg.paths.meta);
        read_path("out", cfg.paths.out);
        read_path("report", cfg.paths.report);
    }
    cfg.purify.rsvd.target_rank = std::max<std::size_t>(1, cfg.purify.remove_k);
    validate(cfg);
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    return parse_run_config(read_text_file(path));
}

void validate(const RunConfig& cfg)
{
    validate(cfg.purify);
    validate(cfg.synth);
    if (!std::isfinite(cfg.bench.epsilon) || cfg.bench.epsilon < 0.0)
        fail(ErrorCode::InvalidConfig, "epsilon must be finite and >= 0");
    if (cfg.bench.n_seeds == 0)
        fail(ErrorCode::InvalidConfig, "bench needs at least one seed");
    if (cfg.bench.modes.empty())
        fail(ErrorCode::InvalidConfig, "bench needs at least one direction mode");
    if (cfg.purify.remove_k > cfg.synth.dim)
        fail(ErrorCode::InvalidConfig, "purify k exceeds synth dim");
}

}  // namespace pure
