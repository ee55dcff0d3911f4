#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pure/batch.hpp"
#include "pure/metrics.hpp"

namespace pure {

/// Builds a batch from an embeddings matrix and JSONL metadata, one object
/// per instance: {"id": ..., "start": s, "length": n, "label": optional int}.
///
/// Rows not referenced by any instance (padding) are dropped and the kept
/// rows are re-stacked in metadata order, so the returned batch always
/// partitions its token matrix. Throws OverlappingOffsets, OutOfRange,
/// DuplicateId and MalformedInput.
InstanceBatch make_instances(const Matrix& embeddings, std::string_view meta_jsonl);
InstanceBatch read_instances(const std::filesystem::path& embeddings_path, const std::filesystem::path& meta_path);

/// One AttackRecord per non-blank line:
/// {"example_id", "originally_correct", "attack_succeeded"?, "queries_used", "attack_name"}.
std::vector<AttackRecord> parse_attack_records(std::string_view jsonl);
std::vector<AttackRecord> read_attack_records(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace pure
