#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pure/matrix.hpp"

namespace pure {

struct Span {
    std::size_t start = 0;
    std::size_t length = 0;
    bool operator==(const Span&) const = default;
};

/// All instances' token rows stacked into one matrix, plus per-instance spans.
///
/// Spans must cover [0, tokens.rows()) without overlap, each with length >= 1.
/// `ids` and `labels` are either empty or have one entry per instance.
struct InstanceBatch {
    Matrix tokens;
    std::vector<Span> spans;
    std::vector<std::string> ids;
    std::vector<int> labels;

    std::size_t size() const noexcept { return spans.size(); }
    std::size_t dim() const noexcept { return tokens.cols(); }
    Matrix instance(std::size_t i) const { return tokens.row_block(spans[i].start, spans[i].length); }

    /// Throws OverlappingOffsets, OutOfRange, DuplicateId or ShapeMismatch.
    void validate() const;

    static InstanceBatch from_instances(const std::vector<Matrix>& instances, std::vector<int> labels = {});
};

}  // namespace pure
