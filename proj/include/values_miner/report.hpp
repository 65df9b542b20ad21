#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "values_miner/analytics.hpp"

namespace values_miner {

// Standalone SVG 1.1 documents; identical inputs give identical bytes.
std::string prevalence_bar_chart_svg(const PrevalenceTable& table);
std::string trend_lines_svg(std::span<const GroupTrend> trends, std::string_view group);
std::string pmi_heatmap_svg(const PmiMatrix& matrix);

struct ReportResults {
    std::optional<PrevalenceTable> prevalence;
    std::optional<GroupBy> trend_grouping;
    std::vector<GroupTrend> trends;
    std::optional<PmiMatrix> pmi;
    std::vector<DistinctivenessScore> distinctiveness;
    std::optional<PatternCounts> patterns;
};

struct ReportOutput {
    std::vector<std::filesystem::path> files; // in write order
    std::vector<std::string> warnings;
};

/// Writes CSV tables and SVG charts into outdir (created if needed). Empty
/// tables are still written with their header, but get no chart and add a
/// warning. Throws Error("io") when outdir cannot be written.
ReportOutput emit_report(const ReportResults& results, const std::filesystem::path& outdir);

} // namespace values_miner
