#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pure/harness.hpp"
#include "pure/purify.hpp"

namespace pure {

struct BenchSettings {
    double epsilon = 2.0;
    /// Runs use synth seeds seed, seed + 1, ..., seed + n_seeds - 1.
    std::size_t n_seeds = 20;
    std::vector<DirectionMode> modes{DirectionMode::TopPC, DirectionMode::Random};
};

struct RunPaths {
    std::filesystem::path embeddings;
    std::filesystem::path meta;
    std::filesystem::path out;
    std::filesystem::path report;
};

/// Everything a CLI run can be configured with.
///
/// TOML layout:
///   [purify] k alpha backend("exact"|"rsvd") r q seed pooling("pfsa"|"mean")
///            min_tokens center_first
///   [synth]  n_instances tokens_per_instance dim dominant_scale
///            class_separation seed
///   [bench]  epsilon seeds modes(["top_pc", "random"])
///   [paths]  embeddings meta out report
/// Unknown tables or keys and wrongly typed values raise BadConfig.
struct RunConfig {
    PurifyConfig purify;
    SynthConfig synth;
    BenchSettings bench;
    RunPaths paths;
};

RunConfig parse_run_config(std::string_view toml_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Validates all sections; throws InvalidConfig.
void validate(const RunConfig& cfg);

std::string_view to_string(Backend b) noexcept;
std::string_view to_string(Pooling p) noexcept;
std::string_view to_string(DirectionMode m) noexcept;
Backend parse_backend(std::string_view s);
Pooling parse_pooling(std::string_view s);
DirectionMode parse_direction_mode(std::string_view s);

}  // namespace pure
