#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "values_miner/taxonomy.hpp"

namespace values_miner {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Ratios with a zero denominator are reported as 0 and flagged.
struct ValueMetrics {
    ResearchValue value = ResearchValue::Performance;
    ConfusionCounts counts;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    bool precision_undefined = false;
    bool recall_undefined = false;
};

struct MetricsReport {
    std::vector<ValueMetrics> values; // in the order requested
    double macro_f1 = 0.0;
    std::size_t instances = 0;
};

ValueMetrics metrics_from_counts(ResearchValue value, const ConfusionCounts& counts);

/// Per-value metrics. Throws Error("usage") when the spans differ in length.
ValueMetrics evaluate(std::span<const ValueLabelVector> predictions, std::span<const ValueLabelVector> gold,
                      ResearchValue value);

MetricsReport evaluate_all(std::span<const ValueLabelVector> predictions, std::span<const ValueLabelVector> gold,
                           std::span<const ResearchValue> values = kAllValues);

/// Self-describing JSON; stable key order and number formatting.
std::string metrics_to_json_text(const MetricsReport& report);

} // namespace values_miner
