#include "pure/batch.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "pure/error.hpp"

namespace pure {

void InstanceBatch::validate() const
{
    if (!ids.empty() && ids.size() != spans.size())
        fail(ErrorCode::ShapeMismatch, "ids count differs from instance count");
    if (!labels.empty() && labels.size() != spans.size())
        fail(ErrorCode::ShapeMismatch, "labels count differs from instance count");

    for (std::size_t i = 0; i < spans.size(); ++i) {
        const auto& s = spans[i];
        if (s.length == 0)
            fail(ErrorCode::OutOfRange, "instance " + std::to_string(i) + " has zero length");
        if (s.start + s.length > tokens.rows())
            fail(ErrorCode::OutOfRange, "instance " + std::to_string(i) + " spans rows [" + std::to_string(s.start) +
                                            ", " + std::to_string(s.start + s.length) + ") of " +
                                            std::to_string(tokens.rows()));
    }

    std::vector<std::size_t> order(spans.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return spans[a].start < spans[b].start; });
    std::size_t covered = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& s = spans[order[k]];
        if (s.start < covered)
            fail(ErrorCode::OverlappingOffsets, "instance " + std::to_string(order[k]) + " overlaps instance " +
                                                    std::to_string(order[k - 1]));
        if (s.start > covered)
            fail(ErrorCode::OutOfRange, "rows [" + std::to_string(covered) + ", " + std::to_string(s.start) +
                                            ") belong to no instance");
        covered = s.start + s.length;
    }
    if (covered != tokens.rows())
        fail(ErrorCode::OutOfRange, "rows from " + std::to_string(covered) + " belong to no instance");

    std::unordered_set<std::string> seen;
    for (const auto& id : ids)
        if (!seen.insert(id).second)
            fail(ErrorCode::DuplicateId, "duplicate id '" + id + "'");
}

InstanceBatch InstanceBatch::from_instances(const std::vector<Matrix>& instances, std::vector<int> labels)
{
    InstanceBatch b;
    b.tokens = vstack(instances);
    std::size_t start = 0;
    for (const auto& m : instances) {
        b.spans.push_back({start, m.rows()});
        start += m.rows();
    }
    b.labels = std::move(labels);
    b.validate();
    return b;
}

}  // namespace pure
