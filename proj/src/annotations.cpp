#include "values_miner/annotations.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>

#include "values_miner/csv.hpp"
#include "values_miner/error.hpp"
#include "values_miner/rng.hpp"

namespace values_miner {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trimmed(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

} // namespace

std::string_view split_name(Split s) noexcept {
    switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
    }
    return "train";
}

std::optional<Split> parse_split(std::string_view text) {
    const auto t = lower(trimmed(text));
    if (t == "train") return Split::Train;
    if (t == "validation" || t == "val" || t == "dev") return Split::Validation;
    if (t == "test") return Split::Test;
    return std::nullopt;
}

std::vector<AnnotatedInstance> read_annotations(std::istream& in) {
    csv::Reader reader(in);
    std::vector<AnnotatedInstance> out;
    const auto header = reader.next();
    if (!header) return out;

    std::optional<std::size_t> text_col, id_col, split_col;
    std::array<std::optional<std::size_t>, kNumValues> value_cols;
    for (std::size_t i = 0; i < header->size(); ++i) {
        const auto name = lower(trimmed((*header)[i]));
        if (name == "sentence_text") {
            text_col = i;
        } else if (name == "paper_id") {
            id_col = i;
        } else if (name == "split") {
            split_col = i;
        } else if (auto v = parse_value(name)) {
            value_cols[index_of(*v)] = i;
        }
    }
    if (!text_col) throw Error("parse", "annotations header lacks sentence_text");
    if (!id_col) throw Error("parse", "annotations header lacks paper_id");
    for (auto v : kAllValues) {
        if (!value_cols[index_of(v)]) {
            throw Error("parse", "annotations header lacks column " + std::string(value_id(v)));
        }
    }

    while (auto row = reader.next()) {
        const auto line = reader.line();
        if (row->size() == 1 && trimmed(row->front()).empty()) continue;
        auto field = [&](std::size_t col) -> const std::string& {
            if (col >= row->size()) {
                throw Error("parse", "row at line " + std::to_string(line) + " has " +
                                         std::to_string(row->size()) + " fields, header has " +
                                         std::to_string(header->size()));
            }
            return (*row)[col];
        };
        AnnotatedInstance inst;
        inst.sentence_text = field(*text_col);
        inst.paper_id = field(*id_col);
        for (auto v : kAllValues) {
            const auto label = trimmed(field(*value_cols[index_of(v)]));
            if (label == "1") {
                inst.gold.set(v);
            } else if (label != "0") {
                throw Error("parse", "row at line " + std::to_string(line) + ": label for " +
                                         std::string(value_id(v)) + " is \"" + label + "\", expected 0 or 1");
            }
        }
        if (split_col) {
            const auto& s = field(*split_col);
            if (!trimmed(s).empty()) {
                inst.split = parse_split(s);
                if (!inst.split) {
                    throw Error("parse", "row at line " + std::to_string(line) + ": unknown split \"" + s + "\"");
                }
            }
        }
        out.push_back(std::move(inst));
    }
    return out;
}

std::vector<AnnotatedInstance> load_annotations(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot read annotations file " + path.string());
    return read_annotations(in);
}

void write_annotations(std::ostream& out, std::span<const AnnotatedInstance> instances) {
    std::vector<std::string> header = {"sentence_text", "paper_id"};
    for (auto v : kAllValues) header.emplace_back(value_id(v));
    header.emplace_back("split");
    csv::write_row(out, header);
    for (const auto& inst : instances) {
        std::vector<std::string> row = {inst.sentence_text, inst.paper_id};
        for (auto v : kAllValues) row.emplace_back(inst.gold[v] ? "1" : "0");
        row.emplace_back(inst.split ? std::string(split_name(*inst.split)) : std::string());
        csv::write_row(out, row);
    }
}

SplitSizes split_sizes(std::size_t n, const std::array<double, 3>& ratios) {
    const double total = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(total - 1.0) > 1e-9 || std::any_of(ratios.begin(), ratios.end(), [](double r) { return r < 0; })) {
        throw Error("config", "split ratios must be non-negative and sum to 1");
    }
    // The small epsilon keeps exact products such as 0.3 * 10 from landing
    // just below the integer.
    auto floor_of = [n](double r) {
        return static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9));
    };
    SplitSizes s;
    s.train = std::min(n, floor_of(ratios[0]));
    s.validation = std::min(n - s.train, floor_of(ratios[1]));
    s.test = n - s.train - s.validation;
    return s;
}

namespace {

void tag_block(std::vector<AnnotatedInstance>& instances, std::span<const std::size_t> order,
               const std::array<double, 3>& ratios) {
    const auto sizes = split_sizes(order.size(), ratios);
    for (std::size_t i = 0; i < order.size(); ++i) {
        Split s = Split::Test;
        if (i < sizes.train) {
            s = Split::Train;
        } else if (i < sizes.train + sizes.validation) {
            s = Split::Validation;
        }
        instances[order[i]].split = s;
    }
}

} // namespace

bool assign_splits(std::vector<AnnotatedInstance>& instances, const SplitOptions& options) {
    split_sizes(0, options.ratios); // validates ratios
    const bool complete = !instances.empty() &&
                          std::all_of(instances.begin(), instances.end(),
                                      [](const AnnotatedInstance& i) { return i.split.has_value(); });
    if (complete && !options.resplit) return false;

    std::vector<std::size_t> order(instances.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(options.seed);
    shuffle(std::span<std::size_t>(order), rng);

    if (!options.stratify) {
        tag_block(instances, order, options.ratios);
        return true;
    }
    std::vector<std::size_t> positives, negatives;
    for (const auto idx : order) {
        (instances[idx].gold[*options.stratify] ? positives : negatives).push_back(idx);
    }
    tag_block(instances, positives, options.ratios);
    tag_block(instances, negatives, options.ratios);
    return true;
}

std::vector<AnnotatedInstance> select_split(std::span<const AnnotatedInstance> instances, Split split) {
    std::vector<AnnotatedInstance> out;
    for (const auto& inst : instances) {
        if (inst.split == split) out.push_back(inst);
    }
    return out;
}

} // namespace values_miner
