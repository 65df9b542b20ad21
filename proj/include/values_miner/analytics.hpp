#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "values_miner/corpus.hpp"
#include "values_miner/lexicon.hpp"
#include "values_miner/taxonomy.hpp"

namespace values_miner {

enum class AnalysisUnit : std::uint8_t { Abstract, Sentence };

std::string_view unit_name(AnalysisUnit u) noexcept;
std::optional<AnalysisUnit> parse_unit(std::string_view text);

// One classified abstract (or sentence) with the metadata analytics group on.
struct LabeledUnit {
    std::string paper_id;
    std::string venue;
    std::string subfield;
    FieldGroup field_group = FieldGroup::Other;
    int year = 0;
    std::size_t sentence_index = 0; // sentence mode only
    ValueLabelVector labels;
    MatchList matches; // match log; a pattern appears once per matching sentence

    bool in_study_window() const noexcept { return year >= kStudyFirstYear && year <= kStudyLastYear; }
};

/// Labels file: one JSON object per line with paper_id, venue, subfield,
/// field_group, year, unit, labels (object value id -> 0/1) and matches
/// (object value id -> [pattern, ...]).
std::string labeled_unit_to_json_line(const LabeledUnit& unit, AnalysisUnit kind);
std::vector<LabeledUnit> read_labeled_units(std::istream& in, AnalysisUnit* kind = nullptr);

enum class GroupBy : std::uint8_t { Venue, Subfield, FieldGroup, Year, SubfieldYear };

std::string_view group_by_name(GroupBy g) noexcept;
/// Throws Error("usage") on unknown keys.
GroupBy parse_group_by(std::string_view text);

std::string group_key(const LabeledUnit& unit, GroupBy by);

struct PrevalenceRow {
    std::string group;
    ResearchValue value = ResearchValue::Performance;
    std::size_t count = 0;
    std::size_t denominator = 0;
    double proportion = 0.0;
};

struct PrevalenceTable {
    GroupBy group_by = GroupBy::Subfield;
    AnalysisUnit unit = AnalysisUnit::Abstract;
    std::vector<PrevalenceRow> rows; // groups ascending, values in taxonomy order

    std::vector<std::string> groups() const;
};

/// Year-based groupings skip records outside 2013-2022 unless
/// include_out_of_window is set.
PrevalenceTable prevalence(std::span<const LabeledUnit> units, GroupBy by,
                           AnalysisUnit unit = AnalysisUnit::Abstract, bool include_out_of_window = false);

struct LogOddsScore {
    double delta = 0.0;
    double variance = 0.0;
    double z = 0.0;
};

/// Weighted log-odds with an informative Dirichlet prior for a binary event:
/// y of n in the focus set, y2 of n2 in the contrast set, prior mass alpha0
/// spread by the pooled rate (y + y2) / (n + n2).
///   a      = alpha0 * pooled_rate
///   delta  = ln((y+a)/(n+alpha0-y-a)) - ln((y2+a)/(n2+alpha0-y2-a))
///   var    = 1/(y+a) + 1/(y2+a)
///   z      = delta / sqrt(var)
/// A pooled rate of exactly 0 or 1 means no contrast: all three are 0.
LogOddsScore weighted_log_odds(double y, double n, double y2, double n2, double alpha0);

struct DistinctivenessScore {
    ResearchValue value = ResearchValue::Performance;
    std::string group;
    std::size_t group_count = 0;
    std::size_t group_size = 0;
    std::size_t rest_count = 0;
    std::size_t rest_size = 0;
    double delta = 0.0;
    double z = 0.0;
};

/// Group against the rest of the corpus, ranked by z descending (ties in
/// taxonomy order). Throws Error("usage") when the group or its complement
/// is empty.
std::vector<DistinctivenessScore> distinctiveness(std::span<const LabeledUnit> units, GroupBy by,
                                                  std::string_view group, double alpha0 = 1.0);

enum class TrendDirection : std::uint8_t { Increasing, Decreasing, None };

std::string_view direction_name(TrendDirection d) noexcept;

struct YearPoint {
    int year = 0;
    double value = 0.0;
};

struct TrendResult {
    std::vector<YearPoint> series;
    long long mk_s = 0;
    double variance = 0.0; // tie-corrected
    double z = 0.0;        // continuity-corrected
    double p_value = 1.0;  // two-sided
    double sen_slope = 0.0;
    TrendDirection direction = TrendDirection::None;
};

/// Mann-Kendall test plus Theil-Sen slope. Needs >= 3 points with strictly
/// increasing years; throws Error("usage") otherwise.
TrendResult trend(std::span<const YearPoint> series, double alpha = 0.05);

struct GroupTrend {
    std::string group;
    ResearchValue value = ResearchValue::Performance;
    TrendResult result;
};

/// Yearly prevalence per (group, value) over in-window years, then trend().
/// Groups with fewer than 3 distinct years are skipped.
std::vector<GroupTrend> group_trends(std::span<const LabeledUnit> units, GroupBy by, double alpha = 0.05);

struct PmiMatrix {
    std::array<std::array<double, kNumValues>, kNumValues> pmi{}; // bits
    std::array<std::array<std::size_t, kNumValues>, kNumValues> joint{}; // joint[i][i] = c_i
    std::size_t n = 0;
    double epsilon = 0.5;
    AnalysisUnit unit = AnalysisUnit::Abstract;
};

/// pmi(i,j) = log2( ((c_ij+e)/(N+e)) / (((c_i+e)/(N+e)) * ((c_j+e)/(N+e))) ),
/// evaluated as log2( (c_ij+e)(N+e) / ((c_i+e)(c_j+e)) ). Throws
/// Error("usage") for an empty input.
PmiMatrix pmi_matrix(std::span<const ValueLabelVector> labels, double epsilon = 0.5);

using PatternCounts = std::array<std::vector<std::pair<std::string, std::size_t>>, kNumValues>;

/// Per value: (pattern, times logged), count descending then pattern ascending.
PatternCounts pattern_frequency(std::span<const LabeledUnit> units);

// Delimited-table writers. Floating values are written with std::to_chars
// shortest round-trip form so output is byte-stable.
void write_prevalence_csv(std::ostream& out, const PrevalenceTable& table);
void write_distinctiveness_csv(std::ostream& out, std::span<const DistinctivenessScore> scores);
void write_trends_csv(std::ostream& out, std::span<const GroupTrend> trends);
void write_pmi_csv(std::ostream& out, const PmiMatrix& matrix);
void write_patterns_csv(std::ostream& out, const PatternCounts& counts);

/// Self-describing JSON forms of the same tables.
std::string to_json_text(const PrevalenceTable& table);
std::string to_json_text(std::span<const DistinctivenessScore> scores);
std::string to_json_text(std::span<const GroupTrend> trends);
std::string to_json_text(const PmiMatrix& matrix);
std::string to_json_text(const PatternCounts& counts);

/// Shortest round-trip decimal; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double x);

} // namespace values_miner
