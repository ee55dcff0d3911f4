#include "pure/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "pure/error.hpp"

namespace pure {

namespace {

void require_records(std::span<const AttackRecord> records)
{
    if (records.empty())
        fail(ErrorCode::EmptyRecords, "no attack records");
}

struct AttackCounts {
    std::size_t records = 0;
    std::size_t correct = 0;
    std::size_t succeeded = 0;
    double queries_all = 0.0;
    double queries_succeeded = 0.0;
};

AttackCounts count_attack(std::span<const AttackRecord> records, const std::string& attack)
{
    require_records(records);
    AttackCounts c;
    for (const auto& r : records) {
        if (r.attack_name != attack)
            continue;
        validate(r);
        ++c.records;
        if (!r.originally_correct)
            continue;
        ++c.correct;
        c.queries_all += static_cast<double>(r.queries_used);
        if (*r.attack_succeeded) {
            ++c.succeeded;
            c.queries_succeeded += static_cast<double>(r.queries_used);
        }
    }
    if (c.records == 0)
        fail(ErrorCode::UnknownAttack, "no records for attack '" + attack + "'");
    return c;
}

}  // namespace

void validate(const AttackRecord& r)
{
    if (r.originally_correct != r.attack_succeeded.has_value())
        fail(ErrorCode::InconsistentRecord,
             "example '" + r.example_id + "': attack_succeeded must be present iff originally_correct");
}

double clean_accuracy(std::span<const AttackRecord> records)
{
    require_records(records);
    std::unordered_map<std::string, bool> correct;
    for (const auto& r : records) {
        validate(r);
        auto [it, inserted] = correct.emplace(r.example_id, r.originally_correct);
        if (!inserted && it->second != r.originally_correct)
            fail(ErrorCode::InconsistentRecord, "example '" + r.example_id + "' has conflicting correctness");
    }
    const auto n_correct = std::count_if(correct.begin(), correct.end(), [](const auto& kv) { return kv.second; });
    return 100.0 * static_cast<double>(n_correct) / static_cast<double>(correct.size());
}

double accuracy_under_attack(std::span<const AttackRecord> records, const std::string& attack)
{
    const AttackCounts c = count_attack(records, attack);
    return 100.0 * static_cast<double>(c.correct - c.succeeded) / static_cast<double>(c.records);
}

double attack_success_rate(std::span<const AttackRecord> records, const std::string& attack)
{
    const AttackCounts c = count_attack(records, attack);
    if (c.correct == 0)
        fail(ErrorCode::NoAttackedExamples, "attack '" + attack + "' has no originally-correct examples");
    return 100.0 * static_cast<double>(c.succeeded) / static_cast<double>(c.correct);
}

double average_queries(std::span<const AttackRecord> records, const std::string& attack, QueryAverage mode)
{
    const AttackCounts c = count_attack(records, attack);
    if (mode == QueryAverage::SuccessfulOnly) {
        if (c.succeeded == 0)
            fail(ErrorCode::NoAttackedExamples, "attack '" + attack + "' never succeeded");
        return c.queries_succeeded / static_cast<double>(c.succeeded);
    }
    if (c.correct == 0)
        fail(ErrorCode::NoAttackedExamples, "attack '" + attack + "' has no originally-correct examples");
    return c.queries_all / static_cast<double>(c.correct);
}

double performance_drop_rate(double acc, double aua)
{
    if (!(acc > 0.0))
        fail(ErrorCode::ZeroAccuracy, "performance drop rate needs acc > 0");
    if (aua < 0.0 || aua > acc + 1e-9)
        fail(ErrorCode::InvalidArgument, "accuracy under attack must lie in [0, acc]");
    return 100.0 * (acc - aua) / acc;
}

double average_pdr(std::span<const double> pdrs)
{
    if (pdrs.empty())
        fail(ErrorCode::EmptyList, "average of an empty list");
    double sum = 0.0;
    for (double p : pdrs)
        sum += p;
    return sum / static_cast<double>(pdrs.size());
}

std::vector<std::string> attack_names(std::span<const AttackRecord> records)
{
    std::vector<std::string> names;
    for (const auto& r : records)
        if (std::find(names.begin(), names.end(), r.attack_name) == names.end())
            names.push_back(r.attack_name);
    return names;
}

MetricsReport compute_metrics(std::span<const AttackRecord> records, QueryAverage mode)
{
    MetricsReport rep;
    rep.acc = clean_accuracy(records);
    std::vector<double> pdrs;
    for (const auto& name : attack_names(records)) {
        AttackMetrics m;
        m.attack = name;
        m.aua = accuracy_under_attack(records, name);
        m.asr = attack_success_rate(records, name);
        m.avgq = average_queries(records, name, mode);
        m.pdr = performance_drop_rate(rep.acc, m.aua);
        pdrs.push_back(m.pdr);
        rep.attacks.push_back(std::move(m));
    }
    rep.apdr = average_pdr(pdrs);
    return rep;
}

double round2(double x)
{
    return std::round(x * 100.0) / 100.0;
}

}  // namespace pure
