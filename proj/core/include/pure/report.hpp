#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pure/config.hpp"
#include "pure/isotropy.hpp"
#include "pure/metrics.hpp"
#include "pure/purify.hpp"

namespace pure {

// JSON documents written by the CLI. Output is deterministic: fixed key
// order, no timestamps, doubles printed round-trip exact.

/// {"acc", "attacks": {name: {"aua", "asr", "avgq", "pdr"}}, "apdr"} with
/// values rounded to two decimals.
std::string metrics_json(const MetricsReport& rep, QueryAverage mode);

std::string isotropy_json(const IsotropyReport& rep, std::size_t n_pairs, RngSeed seed, std::size_t instances,
                          const PurifyConfig* purified_with);

std::string purify_report_json(const PurifyConfig& cfg, const InstanceBatch& batch,
                               const std::vector<PurifiedInstance>& out);

struct BenchRun {
    std::uint64_t seed = 0;
    RobustnessReport report;
};

std::string bench_json(const RunConfig& cfg, const std::vector<BenchRun>& runs);

}  // namespace pure
