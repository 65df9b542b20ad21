#include "values_miner/metrics.hpp"

#include <json.hpp>

#include "values_miner/error.hpp"

namespace values_miner {

ValueMetrics metrics_from_counts(ResearchValue value, const ConfusionCounts& c) {
    ValueMetrics m;
    m.value = value;
    m.counts = c;
    const auto ratio = [](std::size_t num, std::size_t den, bool& undefined) {
        undefined = den == 0;
        return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    m.precision = ratio(c.tp, c.tp + c.fp, m.precision_undefined);
    m.recall = ratio(c.tp, c.tp + c.fn, m.recall_undefined);
    // 2PR/(P+R) written over counts: 2tp / (2tp + fp + fn).
    const std::size_t f1_den = 2 * c.tp + c.fp + c.fn;
    m.f1 = (c.tp == 0 || f1_den == 0) ? 0.0 : static_cast<double>(2 * c.tp) / static_cast<double>(f1_den);
    const std::size_t n = c.total();
    m.accuracy = n == 0 ? 0.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(n);
    return m;
}

ValueMetrics evaluate(std::span<const ValueLabelVector> predictions, std::span<const ValueLabelVector> gold,
                      ResearchValue value) {
    if (predictions.size() != gold.size()) {
        throw Error("usage", "prediction count " + std::to_string(predictions.size()) +
                                 " does not match gold count " + std::to_string(gold.size()));
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool p = predictions[i][value];
        const bool g = gold[i][value];
        if (p && g) {
            ++c.tp;
        } else if (p) {
            ++c.fp;
        } else if (g) {
            ++c.fn;
        } else {
            ++c.tn;
        }
    }
    return metrics_from_counts(value, c);
}

MetricsReport evaluate_all(std::span<const ValueLabelVector> predictions, std::span<const ValueLabelVector> gold,
                           std::span<const ResearchValue> values) {
    MetricsReport report;
    report.instances = gold.size();
    double sum = 0.0;
    for (auto v : values) {
        report.values.push_back(evaluate(predictions, gold, v));
        sum += report.values.back().f1;
    }
    report.macro_f1 = values.empty() ? 0.0 : sum / static_cast<double>(values.size());
    return report;
}

std::string metrics_to_json_text(const MetricsReport& report) {
    using json = nlohmann::ordered_json;
    json doc;
    doc["instances"] = report.instances;
    doc["macro_f1"] = report.macro_f1;
    json per_value = json::array();
    for (const auto& m : report.values) {
        json entry;
        entry["value"] = value_id(m.value);
        entry["precision"] = m.precision;
        entry["recall"] = m.recall;
        entry["f1"] = m.f1;
        entry["accuracy"] = m.accuracy;
        entry["tp"] = m.counts.tp;
        entry["fp"] = m.counts.fp;
        entry["fn"] = m.counts.fn;
        entry["tn"] = m.counts.tn;
        entry["precision_undefined"] = m.precision_undefined;
        entry["recall_undefined"] = m.recall_undefined;
        per_value.push_back(std::move(entry));
    }
    doc["values"] = std::move(per_value);
    return doc.dump(2) + "\n";
}

} // namespace values_miner
