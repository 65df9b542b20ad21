#include "values_miner/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "values_miner/error.hpp"

namespace values_miner {

namespace {

// One colour per value, taxonomy order.
constexpr std::array<std::string_view, kNumValues> kPalette = {
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
};

std::string fixed(double x, int digits = 2) {
    if (!std::isfinite(x)) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
    std::string s(buf, res.ptr);
    if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
    return s;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string svg_open(double width, double height) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           fixed(width, 0) + "\" height=\"" + fixed(height, 0) + "\" viewBox=\"0 0 " + fixed(width, 0) + " " +
           fixed(height, 0) + "\" font-family=\"sans-serif\" font-size=\"11\">\n"
           "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
}

std::string text(double x, double y, std::string_view content, std::string_view anchor = "start",
                 std::string_view extra = "") {
    std::string out = "<text x=\"" + fixed(x) + "\" y=\"" + fixed(y) + "\" text-anchor=\"" + std::string(anchor) + "\"";
    if (!extra.empty()) out += " " + std::string(extra);
    return out + ">" + xml_escape(content) + "</text>\n";
}

std::string legend(double x, double y) {
    std::string out;
    for (std::size_t i = 0; i < kNumValues; ++i) {
        const double row = y + static_cast<double>(i) * 16.0;
        out += "<rect x=\"" + fixed(x) + "\" y=\"" + fixed(row - 9) + "\" width=\"10\" height=\"10\" fill=\"" +
               std::string(kPalette[i]) + "\"/>\n";
        out += text(x + 14, row, display_name(kAllValues[i]));
    }
    return out;
}

std::string y_axis(double left, double top, double plot_h, double plot_w, double max_value) {
    std::string out;
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = max_value * tick / 4.0;
        const double y = top + plot_h - plot_h * tick / 4.0;
        out += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(left + plot_w) + "\" y2=\"" +
               fixed(y) + "\" stroke=\"#dddddd\"/>\n";
        out += text(left - 6, y + 4, fixed(v), "end");
    }
    out += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top) + "\" x2=\"" + fixed(left) + "\" y2=\"" +
           fixed(top + plot_h) + "\" stroke=\"#333333\"/>\n";
    return out;
}

std::string slug(std::string_view s) {
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if (!out.empty() && out.back() != '_') {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out.empty() ? "group" : out;
}

void write_file(const std::filesystem::path& path, const std::string& content, ReportOutput& out) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("io", "cannot write " + path.string());
    f << content;
    if (!f) throw Error("io", "failed writing " + path.string());
    out.files.push_back(path);
}

} // namespace

std::string prevalence_bar_chart_svg(const PrevalenceTable& table) {
    const auto groups = table.groups();
    const double bar = 8.0;
    const double group_w = bar * kNumValues + 16.0;
    const double left = 60, top = 40, plot_h = 260;
    const double plot_w = std::max(1.0, group_w * static_cast<double>(groups.size()));
    const double width = left + plot_w + 170, height = top + plot_h + 110;

    std::string svg = svg_open(width, height);
    svg += text(left, 22, "Share of " + std::string(unit_name(table.unit)) + "s flagged per value, by " +
                              std::string(group_by_name(table.group_by)),
                "start", "font-size=\"14\"");
    svg += y_axis(left, top, plot_h, plot_w, 1.0);

    std::map<std::string, std::size_t> group_index;
    for (std::size_t g = 0; g < groups.size(); ++g) group_index[groups[g]] = g;
    for (const auto& row : table.rows) {
        const double gx = left + group_w * static_cast<double>(group_index[row.group]) + 8.0;
        const double x = gx + bar * static_cast<double>(index_of(row.value));
        const double h = plot_h * row.proportion;
        svg += "<rect x=\"" + fixed(x) + "\" y=\"" + fixed(top + plot_h - h) + "\" width=\"" + fixed(bar - 1) +
               "\" height=\"" + fixed(h) + "\" fill=\"" + std::string(kPalette[index_of(row.value)]) + "\"><title>" +
               xml_escape(row.group) + " / " + std::string(display_name(row.value)) + ": " + fixed(row.proportion, 3) +
               "</title></rect>\n";
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double cx = left + group_w * static_cast<double>(g) + group_w / 2.0;
        const double cy = top + plot_h + 12;
        svg += text(cx, cy, groups[g], "end",
                    "transform=\"rotate(-40 " + fixed(cx) + " " + fixed(cy) + ")\"");
    }
    svg += legend(left + plot_w + 20, top + 10);
    svg += "</svg>\n";
    return svg;
}

std::string trend_lines_svg(std::span<const GroupTrend> trends, std::string_view group) {
    std::vector<const GroupTrend*> lines;
    int first = kStudyLastYear, last = kStudyFirstYear;
    double max_value = 0.0;
    for (const auto& t : trends) {
        if (t.group != group) continue;
        lines.push_back(&t);
        for (const auto& p : t.result.series) {
            first = std::min(first, p.year);
            last = std::max(last, p.year);
            max_value = std::max(max_value, p.value);
        }
    }
    if (first > last) std::swap(first, last);
    const double top_value = max_value > 0 ? std::ceil(max_value * 10.0) / 10.0 : 1.0;
    const double left = 60, top = 40, plot_w = 420, plot_h = 260;
    const double width = left + plot_w + 170, height = top + plot_h + 60;
    const double span_years = std::max(1, last - first);
    auto px = [&](int year) { return left + plot_w * (year - first) / span_years; };
    auto py = [&](double v) { return top + plot_h - plot_h * v / top_value; };

    std::string svg = svg_open(width, height);
    svg += text(left, 22, "Yearly share per value: " + std::string(group), "start", "font-size=\"14\"");
    svg += y_axis(left, top, plot_h, plot_w, top_value);
    for (int year = first; year <= last; ++year) svg += text(px(year), top + plot_h + 16, std::to_string(year), "middle");

    for (const auto* t : lines) {
        std::string points;
        for (const auto& p : t->result.series) {
            if (!points.empty()) points.push_back(' ');
            points += fixed(px(p.year)) + "," + fixed(py(p.value));
        }
        const auto colour = std::string(kPalette[index_of(t->value)]);
        const auto dash = t->result.direction == TrendDirection::None ? " stroke-dasharray=\"4 3\"" : "";
        svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"1.5\"" +
               dash + "><title>" + std::string(display_name(t->value)) + ": " +
               std::string(direction_name(t->result.direction)) + ", slope " + fixed(t->result.sen_slope, 4) +
               "/yr</title></polyline>\n";
    }
    svg += legend(left + plot_w + 20, top + 10);
    svg += "</svg>\n";
    return svg;
}

std::string pmi_heatmap_svg(const PmiMatrix& m) {
    const double cell = 40, left = 130, top = 130;
    const double size = cell * kNumValues;
    double bound = 0.0;
    for (const auto& row : m.pmi) {
        for (double v : row) {
            if (std::isfinite(v)) bound = std::max(bound, std::abs(v));
        }
    }
    if (bound == 0.0) bound = 1.0;

    // Diverging blue (negative) - white - red (positive).
    auto colour = [&](double v) {
        if (!std::isfinite(v)) return std::string("#cccccc");
        const double t = std::clamp(v / bound, -1.0, 1.0);
        const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(t))));
        char buf[8];
        if (t >= 0) {
            std::snprintf(buf, sizeof buf, "#ff%02x%02x", fade, fade);
        } else {
            std::snprintf(buf, sizeof buf, "#%02x%02xff", fade, fade);
        }
        return std::string(buf);
    };

    std::string svg = svg_open(left + size + 20, top + size + 20);
    svg += text(10, 22, "Pairwise PMI (bits), epsilon " + fixed(m.epsilon, 2) + ", N = " + std::to_string(m.n), "start",
                "font-size=\"14\"");
    for (std::size_t i = 0; i < kNumValues; ++i) {
        const double cx = left + cell * static_cast<double>(i) + cell / 2;
        svg += text(cx, top - 8, display_name(kAllValues[i]), "start",
                    "transform=\"rotate(-45 " + fixed(cx) + " " + fixed(top - 8) + ")\"");
        svg += text(left - 8, top + cell * static_cast<double>(i) + cell / 2 + 4, display_name(kAllValues[i]), "end");
    }
    for (std::size_t i = 0; i < kNumValues; ++i) {
        for (std::size_t j = 0; j < kNumValues; ++j) {
            const double x = left + cell * static_cast<double>(j);
            const double y = top + cell * static_cast<double>(i);
            const double v = m.pmi[i][j];
            svg += "<rect x=\"" + fixed(x) + "\" y=\"" + fixed(y) + "\" width=\"" + fixed(cell) + "\" height=\"" +
                   fixed(cell) + "\" fill=\"" + colour(v) + "\" stroke=\"#ffffff\"/>\n";
            svg += text(x + cell / 2, y + cell / 2 + 4, std::isfinite(v) ? fixed(v) : format_double(v), "middle",
                        "font-size=\"9\"");
        }
    }
    svg += "</svg>\n";
    return svg;
}

ReportOutput emit_report(const ReportResults& results, const std::filesystem::path& outdir) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec || !std::filesystem::is_directory(outdir)) {
        throw Error("io", "cannot create output directory " + outdir.string());
    }

    ReportOutput out;
    if (results.prevalence) {
        const auto& table = *results.prevalence;
        const auto stem = "prevalence_" + std::string(group_by_name(table.group_by));
        std::ostringstream csv;
        write_prevalence_csv(csv, table);
        write_file(outdir / (stem + ".csv"), csv.str(), out);
        if (table.rows.empty()) {
            out.warnings.push_back("prevalence table is empty; no bar chart written");
        } else {
            write_file(outdir / (stem + ".svg"), prevalence_bar_chart_svg(table), out);
        }
    }
    if (results.trend_grouping) {
        const auto stem = "trends_" + std::string(group_by_name(*results.trend_grouping));
        std::ostringstream csv;
        write_trends_csv(csv, results.trends);
        write_file(outdir / (stem + ".csv"), csv.str(), out);
        if (results.trends.empty()) {
            out.warnings.push_back("no group has three or more study years; no trend charts written");
        }
        std::vector<std::string> groups;
        for (const auto& t : results.trends) {
            if (groups.empty() || groups.back() != t.group) groups.push_back(t.group);
        }
        for (const auto& g : groups) {
            write_file(outdir / (stem + "_" + slug(g) + ".svg"), trend_lines_svg(results.trends, g), out);
        }
    }
    if (results.pmi) {
        std::ostringstream csv;
        write_pmi_csv(csv, *results.pmi);
        write_file(outdir / "pmi.csv", csv.str(), out);
        write_file(outdir / "pmi_heatmap.svg", pmi_heatmap_svg(*results.pmi), out);
    }
    if (!results.distinctiveness.empty()) {
        std::ostringstream csv;
        write_distinctiveness_csv(csv, results.distinctiveness);
        write_file(outdir / "distinctiveness.csv", csv.str(), out);
    }
    if (results.patterns) {
        std::ostringstream csv;
        write_patterns_csv(csv, *results.patterns);
        write_file(outdir / "patterns.csv", csv.str(), out);
    }
    return out;
}

} // namespace values_miner
