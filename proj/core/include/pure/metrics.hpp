#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pure {

/// Outcome of one attack on one example.
///
/// `attack_succeeded` is set exactly when the example was originally
/// classified correctly; attacks only target those. A correct example the
/// attack gave up on carries attack_succeeded = false.
struct AttackRecord {
    std::string example_id;
    bool originally_correct = false;
    std::optional<bool> attack_succeeded;
    std::size_t queries_used = 0;
    std::string attack_name;
};

struct AttackMetrics {
    std::string attack;
    double aua = 0.0;
    double asr = 0.0;
    double avgq = 0.0;
    double pdr = 0.0;
};

struct MetricsReport {
    double acc = 0.0;
    std::vector<AttackMetrics> attacks;  // in order of first appearance
    double apdr = 0.0;
};

enum class QueryAverage {
    AllAttacked,      // every originally-correct example of the attack
    SuccessfulOnly,   // only examples the attack flipped
};

/// Throws InconsistentRecord when attack_succeeded is present on an
/// originally-incorrect example or missing on a correct one.
void validate(const AttackRecord& r);

/// 100 * correct / total over distinct example ids.
double clean_accuracy(std::span<const AttackRecord> records);
/// 100 * (correct and not flipped) / (records of that attack).
double accuracy_under_attack(std::span<const AttackRecord> records, const std::string& attack);
/// 100 * flipped / originally correct, for one attack.
double attack_success_rate(std::span<const AttackRecord> records, const std::string& attack);
double average_queries(std::span<const AttackRecord> records, const std::string& attack,
                       QueryAverage mode = QueryAverage::AllAttacked);

/// 100 * (acc - aua) / acc. Throws ZeroAccuracy for acc <= 0.
double performance_drop_rate(double acc, double aua);
/// Arithmetic mean. Throws EmptyList.
double average_pdr(std::span<const double> pdrs);

/// Attack names in order of first appearance.
std::vector<std::string> attack_names(std::span<const AttackRecord> records);

MetricsReport compute_metrics(std::span<const AttackRecord> records, QueryAverage mode = QueryAverage::AllAttacked);

/// Round to two decimals, the precision reports are published at.
double round2(double x);

}  // namespace pure
