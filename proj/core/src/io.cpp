#include "pure/io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "pure/error.hpp"
#include "pure/npy.hpp"

namespace pure {

namespace {

using nlohmann::json;

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn)
{
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos)
            continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.is_object())
            fail(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": expected a JSON object");
        try {
            fn(obj, line_no);
        } catch (const json::exception& e) {
            fail(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::size_t get_count(const json& obj, const char* key, std::size_t line_no)
{
    if (!obj.contains(key))
        fail(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": missing '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        fail(ErrorCode::MalformedInput,
             "line " + std::to_string(line_no) + ": '" + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

std::string get_id(const json& obj, const char* key, std::size_t line_no)
{
    if (!obj.contains(key))
        fail(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": missing '" + key + "'");
    const auto& v = obj.at(key);
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number_integer())
        return std::to_string(v.get<long long>());
    fail(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": '" + key + "' must be a string or integer");
}

}  // namespace

InstanceBatch make_instances(const Matrix& embeddings, std::string_view meta_jsonl)
{
    std::vector<Span> source;
    InstanceBatch batch;
    std::unordered_set<std::string> seen;
    bool any_label = false;
    bool all_labels = true;

    for_each_line(meta_jsonl, [&](const json& obj, std::size_t line_no) {
        std::string id = get_id(obj, "id", line_no);
        const std::size_t start = get_count(obj, "start", line_no);
        const std::size_t length = get_count(obj, "length", line_no);
        if (length == 0)
            fail(ErrorCode::OutOfRange, "instance '" + id + "' has zero length");
        if (start + length > embeddings.rows())
            fail(ErrorCode::OutOfRange, "instance '" + id + "' references rows [" + std::to_string(start) + ", " +
                                            std::to_string(start + length) + ") of a " +
                                            std::to_string(embeddings.rows()) + "-row matrix");
        if (!seen.insert(id).second)
            fail(ErrorCode::DuplicateId, "duplicate id '" + id + "'");
        if (obj.contains("label") && !obj.at("label").is_null()) {
            batch.labels.push_back(obj.at("label").get<int>());
            any_label = true;
        } else {
            batch.labels.push_back(0);
            all_labels = false;
        }
        source.push_back({start, length});
        batch.ids.push_back(std::move(id));
    });

    if (any_label && !all_labels)
        fail(ErrorCode::MalformedInput, "labels must be given for every instance or for none");
    if (!any_label)
        batch.labels.clear();

    std::vector<std::size_t> order(source.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return source[a].start < source[b].start; });
    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto& prev = source[order[k - 1]];
        if (source[order[k]].start < prev.start + prev.length)
            fail(ErrorCode::OverlappingOffsets,
                 "instances '" + batch.ids[order[k - 1]] + "' and '" + batch.ids[order[k]] + "' overlap");
    }

    std::vector<Matrix> blocks;
    blocks.reserve(source.size());
    std::size_t start = 0;
    for (const auto& s : source) {
        blocks.push_back(embeddings.row_block(s.start, s.length));
        batch.spans.push_back({start, s.length});
        start += s.length;
    }
    batch.tokens = blocks.empty() ? Matrix(0, embeddings.cols()) : vstack(blocks);
    batch.validate();
    return batch;
}

InstanceBatch read_instances(const std::filesystem::path& embeddings_path, const std::filesystem::path& meta_path)
{
    const Matrix embeddings = read_npy(embeddings_path);
    return make_instances(embeddings, read_text_file(meta_path));
}

std::vector<AttackRecord> parse_attack_records(std::string_view jsonl)
{
    std::vector<AttackRecord> records;
    for_each_line(jsonl, [&](const json& obj, std::size_t line_no) {
        AttackRecord r;
        r.example_id = get_id(obj, "example_id", line_no);
        if (!obj.contains("originally_correct") || !obj.at("originally_correct").is_boolean())
            fail(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": 'originally_correct' must be a boolean");
        r.originally_correct = obj.at("originally_correct").get<bool>();
        if (obj.contains("attack_succeeded") && !obj.at("attack_succeeded").is_null()) {
            if (!obj.at("attack_succeeded").is_boolean())
                fail(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": 'attack_succeeded' must be a boolean");
            r.attack_succeeded = obj.at("attack_succeeded").get<bool>();
        }
        r.queries_used = obj.contains("queries_used") ? get_count(obj, "queries_used", line_no) : 0;
        if (!obj.contains("attack_name") || !obj.at("attack_name").is_string())
            fail(ErrorCode::MalformedInput, "line " + std::to_string(line_no) + ": 'attack_name' must be a string");
        r.attack_name = obj.at("attack_name").get<std::string>();
        try {
            validate(r);
        } catch (const Error& e) {
            fail(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
        }
        records.push_back(std::move(r));
    });
    return records;
}

std::vector<AttackRecord> read_attack_records(const std::filesystem::path& path)
{
    return parse_attack_records(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::IoFailure, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        fail(ErrorCode::IoFailure, "error reading '" + path.string() + "'");
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out)
        fail(ErrorCode::IoFailure, "error writing '" + path.string() + "'");
}

}  // namespace pure
