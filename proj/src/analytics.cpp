#include "values_miner/analytics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "values_miner/csv.hpp"
#include "values_miner/error.hpp"

namespace values_miner {

using ojson = nlohmann::ordered_json;

std::string_view unit_name(AnalysisUnit u) noexcept {
    return u == AnalysisUnit::Abstract ? "abstract" : "sentence";
}

std::optional<AnalysisUnit> parse_unit(std::string_view text) {
    if (text == "abstract") return AnalysisUnit::Abstract;
    if (text == "sentence") return AnalysisUnit::Sentence;
    return std::nullopt;
}

std::string labeled_unit_to_json_line(const LabeledUnit& u, AnalysisUnit kind) {
    ojson obj;
    obj["paper_id"] = u.paper_id;
    obj["venue"] = u.venue;
    obj["subfield"] = u.subfield;
    obj["field_group"] = field_group_name(u.field_group);
    obj["year"] = u.year;
    obj["unit"] = unit_name(kind);
    if (kind == AnalysisUnit::Sentence) obj["sentence_index"] = u.sentence_index;
    ojson labels = ojson::object();
    ojson matches = ojson::object();
    for (auto v : kAllValues) {
        labels[std::string(value_id(v))] = u.labels[v] ? 1 : 0;
        if (!u.matches[index_of(v)].empty()) matches[std::string(value_id(v))] = u.matches[index_of(v)];
    }
    obj["labels"] = std::move(labels);
    obj["matches"] = std::move(matches);
    return obj.dump();
}

std::vector<LabeledUnit> read_labeled_units(std::istream& in, AnalysisUnit* kind) {
    std::vector<LabeledUnit> units;
    std::string line;
    std::size_t line_no = 0;
    std::optional<AnalysisUnit> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto obj = nlohmann::json::parse(line);
            LabeledUnit u;
            u.paper_id = obj.at("paper_id").get<std::string>();
            u.venue = obj.value("venue", "");
            u.subfield = obj.value("subfield", "");
            u.field_group = parse_field_group(obj.value("field_group", "Other")).value_or(FieldGroup::Other);
            u.year = obj.value("year", 0);
            u.sentence_index = obj.value("sentence_index", std::size_t{0});
            const auto unit = parse_unit(obj.value("unit", "abstract"));
            if (!unit) throw Error("parse", "unknown unit");
            if (seen && *seen != *unit) throw Error("parse", "labels file mixes abstract and sentence units");
            seen = unit;
            const auto& labels = obj.at("labels");
            for (auto v : kAllValues) {
                const int flag = labels.value(std::string(value_id(v)), 0);
                if (flag != 0 && flag != 1) throw Error("parse", "label must be 0 or 1");
                u.labels.set(v, flag == 1);
            }
            if (obj.contains("matches")) {
                for (const auto& [key, list] : obj.at("matches").items()) {
                    const auto v = parse_value(key);
                    if (!v) throw Error("parse", "unknown value '" + key + "' in matches");
                    u.matches[index_of(*v)] = list.get<std::vector<std::string>>();
                }
            }
            units.push_back(std::move(u));
        } catch (const Error& e) {
            throw Error("parse", "labels line " + std::to_string(line_no) + ": " + e.what());
        } catch (const nlohmann::json::exception& e) {
            throw Error("parse", "labels line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (kind) *kind = seen.value_or(AnalysisUnit::Abstract);
    return units;
}

std::string_view group_by_name(GroupBy g) noexcept {
    switch (g) {
    case GroupBy::Venue: return "venue";
    case GroupBy::Subfield: return "subfield";
    case GroupBy::FieldGroup: return "field_group";
    case GroupBy::Year: return "year";
    case GroupBy::SubfieldYear: return "subfield_year";
    }
    return "subfield";
}

GroupBy parse_group_by(std::string_view text) {
    for (auto g : {GroupBy::Venue, GroupBy::Subfield, GroupBy::FieldGroup, GroupBy::Year, GroupBy::SubfieldYear}) {
        if (text == group_by_name(g)) return g;
    }
    throw Error("usage", "unknown group_by key '" + std::string(text) +
                             "' (expected venue, subfield, field_group, year or subfield_year)");
}

std::string group_key(const LabeledUnit& u, GroupBy by) {
    switch (by) {
    case GroupBy::Venue: return u.venue;
    case GroupBy::Subfield: return u.subfield;
    case GroupBy::FieldGroup: return std::string(field_group_name(u.field_group));
    case GroupBy::Year: return std::to_string(u.year);
    case GroupBy::SubfieldYear: return u.subfield + "|" + std::to_string(u.year);
    }
    return {};
}

std::vector<std::string> PrevalenceTable::groups() const {
    std::vector<std::string> out;
    for (const auto& row : rows) {
        if (out.empty() || out.back() != row.group) out.push_back(row.group);
    }
    return out;
}

namespace {

bool year_based(GroupBy by) { return by == GroupBy::Year || by == GroupBy::SubfieldYear; }

struct GroupCounts {
    std::size_t size = 0;
    std::array<std::size_t, kNumValues> flagged{};
};

std::map<std::string, GroupCounts> count_by_group(std::span<const LabeledUnit> units, GroupBy by,
                                                  bool window_only) {
    std::map<std::string, GroupCounts> groups;
    for (const auto& u : units) {
        if (window_only && !u.in_study_window()) continue;
        auto& g = groups[group_key(u, by)];
        ++g.size;
        for (std::size_t i = 0; i < kNumValues; ++i) g.flagged[i] += u.labels.test(i) ? 1 : 0;
    }
    return groups;
}

} // namespace

PrevalenceTable prevalence(std::span<const LabeledUnit> units, GroupBy by, AnalysisUnit unit,
                           bool include_out_of_window) {
    PrevalenceTable table;
    table.group_by = by;
    table.unit = unit;
    for (const auto& [group, counts] : count_by_group(units, by, year_based(by) && !include_out_of_window)) {
        for (auto v : kAllValues) {
            PrevalenceRow row;
            row.group = group;
            row.value = v;
            row.count = counts.flagged[index_of(v)];
            row.denominator = counts.size;
            row.proportion = static_cast<double>(row.count) / static_cast<double>(row.denominator);
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

LogOddsScore weighted_log_odds(double y, double n, double y2, double n2, double alpha0) {
    LogOddsScore s;
    const double total = n + n2;
    const double hits = y + y2;
    if (total <= 0 || hits <= 0 || hits >= total) return s;
    const double a = alpha0 * hits / total;
    s.delta = std::log((y + a) / (n + alpha0 - y - a)) - std::log((y2 + a) / (n2 + alpha0 - y2 - a));
    s.variance = 1.0 / (y + a) + 1.0 / (y2 + a);
    s.z = s.delta / std::sqrt(s.variance);
    return s;
}

std::vector<DistinctivenessScore> distinctiveness(std::span<const LabeledUnit> units, GroupBy by,
                                                  std::string_view group, double alpha0) {
    GroupCounts inside, outside;
    for (const auto& u : units) {
        auto& target = group_key(u, by) == group ? inside : outside;
        ++target.size;
        for (std::size_t i = 0; i < kNumValues; ++i) target.flagged[i] += u.labels.test(i) ? 1 : 0;
    }
    if (inside.size == 0) throw Error("usage", "group '" + std::string(group) + "' is empty");
    if (outside.size == 0) throw Error("usage", "group '" + std::string(group) + "' has an empty complement");

    std::vector<DistinctivenessScore> scores;
    for (auto v : kAllValues) {
        DistinctivenessScore s;
        s.value = v;
        s.group = std::string(group);
        s.group_count = inside.flagged[index_of(v)];
        s.group_size = inside.size;
        s.rest_count = outside.flagged[index_of(v)];
        s.rest_size = outside.size;
        const auto lo = weighted_log_odds(static_cast<double>(s.group_count), static_cast<double>(s.group_size),
                                          static_cast<double>(s.rest_count), static_cast<double>(s.rest_size), alpha0);
        s.delta = lo.delta;
        s.z = lo.z;
        scores.push_back(std::move(s));
    }
    std::stable_sort(scores.begin(), scores.end(),
                     [](const DistinctivenessScore& a, const DistinctivenessScore& b) { return a.z > b.z; });
    return scores;
}

std::string_view direction_name(TrendDirection d) noexcept {
    switch (d) {
    case TrendDirection::Increasing: return "increasing";
    case TrendDirection::Decreasing: return "decreasing";
    case TrendDirection::None: return "none";
    }
    return "none";
}

namespace {

// Strict inversions (i < j, x_i > x_j) by merge sort.
long long count_inversions(std::vector<double>& xs, std::vector<double>& scratch, std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    long long inv = count_inversions(xs, scratch, lo, mid) + count_inversions(xs, scratch, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (xs[i] <= xs[j]) {
            scratch[k++] = xs[i++];
        } else {
            inv += static_cast<long long>(mid - i);
            scratch[k++] = xs[j++];
        }
    }
    while (i < mid) scratch[k++] = xs[i++];
    while (j < hi) scratch[k++] = xs[j++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              xs.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

double median_in_place(std::vector<double>& xs) {
    const std::size_t m = xs.size();
    const auto upper = xs.begin() + static_cast<std::ptrdiff_t>(m / 2);
    std::nth_element(xs.begin(), upper, xs.end());
    const double hi = *upper;
    if (m % 2 == 1) return hi;
    const double lo = *std::max_element(xs.begin(), upper);
    return (lo + hi) / 2.0;
}

} // namespace

TrendResult trend(std::span<const YearPoint> series, double alpha) {
    if (series.size() < 3) throw Error("usage", "trend needs at least 3 points");
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series[i].year <= series[i - 1].year) throw Error("usage", "trend years must be strictly increasing");
    }

    TrendResult r;
    r.series.assign(series.begin(), series.end());
    const std::size_t n = series.size();

    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = series[i].value;
    std::vector<double> sorted = xs, scratch(n);
    const long long discordant = count_inversions(sorted, scratch, 0, n);

    // Tie groups from the now-sorted values.
    long long tied_pairs = 0;
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) ++j;
        const auto t = static_cast<double>(j - i);
        tied_pairs += static_cast<long long>((j - i) * (j - i - 1) / 2);
        tie_term += t * (t - 1) * (2 * t + 5);
        i = j;
    }
    const auto all_pairs = static_cast<long long>(n * (n - 1) / 2);
    const long long concordant = all_pairs - tied_pairs - discordant;
    r.mk_s = concordant - discordant;

    const auto nd = static_cast<double>(n);
    r.variance = (nd * (nd - 1) * (2 * nd + 5) - tie_term) / 18.0;
    if (r.variance > 0) {
        const auto s = static_cast<double>(r.mk_s);
        if (r.mk_s > 0) {
            r.z = (s - 1) / std::sqrt(r.variance);
        } else if (r.mk_s < 0) {
            r.z = (s + 1) / std::sqrt(r.variance);
        }
        r.p_value = std::erfc(std::abs(r.z) / std::sqrt(2.0));
    }

    std::vector<double> slopes;
    slopes.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            slopes.push_back((xs[j] - xs[i]) / static_cast<double>(series[j].year - series[i].year));
        }
    }
    r.sen_slope = median_in_place(slopes);

    if (r.p_value < alpha && r.mk_s > 0) {
        r.direction = TrendDirection::Increasing;
    } else if (r.p_value < alpha && r.mk_s < 0) {
        r.direction = TrendDirection::Decreasing;
    }
    return r;
}

std::vector<GroupTrend> group_trends(std::span<const LabeledUnit> units, GroupBy by, double alpha) {
    // group -> year -> counts
    std::map<std::string, std::map<int, GroupCounts>> cells;
    for (const auto& u : units) {
        if (!u.in_study_window()) continue;
        auto& c = cells[group_key(u, by)][u.year];
        ++c.size;
        for (std::size_t i = 0; i < kNumValues; ++i) c.flagged[i] += u.labels.test(i) ? 1 : 0;
    }
    std::vector<GroupTrend> out;
    for (const auto& [group, years] : cells) {
        if (years.size() < 3) continue;
        for (auto v : kAllValues) {
            std::vector<YearPoint> series;
            for (const auto& [year, c] : years) {
                series.push_back({year, static_cast<double>(c.flagged[index_of(v)]) / static_cast<double>(c.size)});
            }
            out.push_back({group, v, trend(series, alpha)});
        }
    }
    return out;
}

PmiMatrix pmi_matrix(std::span<const ValueLabelVector> labels, double epsilon) {
    if (labels.empty()) throw Error("usage", "PMI needs at least one labeled abstract");
    if (epsilon < 0) throw Error("usage", "PMI smoothing must be non-negative");
    PmiMatrix m;
    m.n = labels.size();
    m.epsilon = epsilon;
    for (const auto& l : labels) {
        for (std::size_t i = 0; i < kNumValues; ++i) {
            if (!l.test(i)) continue;
            for (std::size_t j = 0; j < kNumValues; ++j) m.joint[i][j] += l.test(j) ? 1 : 0;
        }
    }
    const double total = static_cast<double>(m.n) + epsilon;
    for (std::size_t i = 0; i < kNumValues; ++i) {
        for (std::size_t j = i; j < kNumValues; ++j) {
            const double cij = static_cast<double>(m.joint[i][j]) + epsilon;
            const double ci = static_cast<double>(m.joint[i][i]) + epsilon;
            const double cj = static_cast<double>(m.joint[j][j]) + epsilon;
            const double value = std::log2((cij * total) / (ci * cj));
            m.pmi[i][j] = value;
            m.pmi[j][i] = value;
        }
    }
    return m;
}

PatternCounts pattern_frequency(std::span<const LabeledUnit> units) {
    std::array<std::map<std::string, std::size_t>, kNumValues> tallies;
    for (const auto& u : units) {
        for (std::size_t i = 0; i < kNumValues; ++i) {
            for (const auto& p : u.matches[i]) ++tallies[i][p];
        }
    }
    PatternCounts out;
    for (std::size_t i = 0; i < kNumValues; ++i) {
        out[i].assign(tallies[i].begin(), tallies[i].end()); // already pattern-ascending
        std::stable_sort(out[i].begin(), out[i].end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
    }
    return out;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0"; // folds -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_prevalence_csv(std::ostream& out, const PrevalenceTable& table) {
    csv::write_row(out, {std::string(group_by_name(table.group_by)), "value", "count", "denominator", "proportion",
                         "unit"});
    for (const auto& r : table.rows) {
        csv::write_row(out, {r.group, std::string(value_id(r.value)), std::to_string(r.count),
                             std::to_string(r.denominator), format_double(r.proportion),
                             std::string(unit_name(table.unit))});
    }
}

void write_distinctiveness_csv(std::ostream& out, std::span<const DistinctivenessScore> scores) {
    csv::write_row(out, {"group", "rank", "value", "group_count", "group_size", "rest_count", "rest_size", "delta", "z"});
    std::size_t rank = 0;
    for (const auto& s : scores) {
        csv::write_row(out, {s.group, std::to_string(++rank), std::string(value_id(s.value)),
                             std::to_string(s.group_count), std::to_string(s.group_size), std::to_string(s.rest_count),
                             std::to_string(s.rest_size), format_double(s.delta), format_double(s.z)});
    }
}

void write_trends_csv(std::ostream& out, std::span<const GroupTrend> trends) {
    csv::write_row(out, {"group", "value", "years", "mk_s", "variance", "z", "p_value", "sen_slope", "direction"});
    for (const auto& t : trends) {
        csv::write_row(out, {t.group, std::string(value_id(t.value)), std::to_string(t.result.series.size()),
                             std::to_string(t.result.mk_s), format_double(t.result.variance),
                             format_double(t.result.z), format_double(t.result.p_value),
                             format_double(t.result.sen_slope), std::string(direction_name(t.result.direction))});
    }
}

void write_pmi_csv(std::ostream& out, const PmiMatrix& m) {
    std::vector<std::string> header = {"value"};
    for (auto v : kAllValues) header.emplace_back(value_id(v));
    csv::write_row(out, header);
    for (auto vi : kAllValues) {
        std::vector<std::string> row = {std::string(value_id(vi))};
        for (auto vj : kAllValues) row.push_back(format_double(m.pmi[index_of(vi)][index_of(vj)]));
        csv::write_row(out, row);
    }
}

void write_patterns_csv(std::ostream& out, const PatternCounts& counts) {
    csv::write_row(out, {"value", "rank", "pattern", "count"});
    for (auto v : kAllValues) {
        std::size_t rank = 0;
        for (const auto& [pattern, n] : counts[index_of(v)]) {
            csv::write_row(out, {std::string(value_id(v)), std::to_string(++rank), pattern, std::to_string(n)});
        }
    }
}

namespace {

// JSON has no inf/nan; those are written as strings.
ojson number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

} // namespace

std::string to_json_text(const PrevalenceTable& table) {
    ojson doc;
    doc["group_by"] = group_by_name(table.group_by);
    doc["unit"] = unit_name(table.unit);
    ojson rows = ojson::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"group", r.group}, {"value", value_id(r.value)}, {"count", r.count},
                        {"denominator", r.denominator}, {"proportion", number(r.proportion)}});
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string to_json_text(std::span<const DistinctivenessScore> scores) {
    ojson rows = ojson::array();
    for (const auto& s : scores) {
        rows.push_back({{"group", s.group}, {"value", value_id(s.value)}, {"group_count", s.group_count},
                        {"group_size", s.group_size}, {"rest_count", s.rest_count}, {"rest_size", s.rest_size},
                        {"delta", number(s.delta)}, {"z", number(s.z)}});
    }
    return ojson{{"distinctiveness", std::move(rows)}}.dump(2) + "\n";
}

std::string to_json_text(std::span<const GroupTrend> trends) {
    ojson rows = ojson::array();
    for (const auto& t : trends) {
        ojson series = ojson::array();
        for (const auto& p : t.result.series) series.push_back({p.year, number(p.value)});
        rows.push_back({{"group", t.group}, {"value", value_id(t.value)}, {"series", std::move(series)},
                        {"mk_s", t.result.mk_s}, {"variance", number(t.result.variance)}, {"z", number(t.result.z)},
                        {"p_value", number(t.result.p_value)}, {"sen_slope", number(t.result.sen_slope)},
                        {"direction", direction_name(t.result.direction)}});
    }
    return ojson{{"trends", std::move(rows)}}.dump(2) + "\n";
}

std::string to_json_text(const PmiMatrix& m) {
    ojson doc;
    ojson values = ojson::array();
    for (auto v : kAllValues) values.push_back(value_id(v));
    doc["values"] = std::move(values);
    doc["unit"] = unit_name(m.unit);
    doc["epsilon"] = m.epsilon;
    doc["n"] = m.n;
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < kNumValues; ++i) {
        ojson row = ojson::array();
        for (std::size_t j = 0; j < kNumValues; ++j) row.push_back(number(m.pmi[i][j]));
        rows.push_back(std::move(row));
    }
    doc["pmi_bits"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string to_json_text(const PatternCounts& counts) {
    ojson doc = ojson::object();
    for (auto v : kAllValues) {
        ojson list = ojson::array();
        for (const auto& [pattern, n] : counts[index_of(v)]) list.push_back({{"pattern", pattern}, {"count", n}});
        doc[std::string(value_id(v))] = std::move(list);
    }
    return doc.dump(2) + "\n";
}

} // namespace values_miner
