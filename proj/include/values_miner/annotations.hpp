#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "values_miner/taxonomy.hpp"

namespace values_miner {

enum class Split : std::uint8_t { Train, Validation, Test };

std::string_view split_name(Split s) noexcept;
std::optional<Split> parse_split(std::string_view text);

struct AnnotatedInstance {
    std::string sentence_text;
    std::string paper_id;
    ValueLabelVector gold;
    std::optional<Split> split;
};

/// Reads the annotations table: header with sentence_text, paper_id, the ten
/// value ids and an optional split column (any column order). Labels must be
/// 0 or 1; anything else throws Error("parse") naming the row's line number.
std::vector<AnnotatedInstance> load_annotations(const std::filesystem::path& path);
std::vector<AnnotatedInstance> read_annotations(std::istream& in);
void write_annotations(std::ostream& out, std::span<const AnnotatedInstance> instances);

struct SplitSizes {
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;

    friend bool operator==(const SplitSizes&, const SplitSizes&) = default;
};

/// floor(r_train * n), floor(r_val * n), remainder to test.
SplitSizes split_sizes(std::size_t n, const std::array<double, 3>& ratios);

struct SplitOptions {
    std::array<double, 3> ratios{0.4, 0.3, 0.3};
    std::uint64_t seed = 0;
    bool resplit = false;
    std::optional<ResearchValue> stratify; // floor rule applied per class when set
};

/// Tags every instance with a split. An existing complete split column is kept
/// unless options.resplit is set. Returns true when splits were (re)assigned.
bool assign_splits(std::vector<AnnotatedInstance>& instances, const SplitOptions& options);

std::vector<AnnotatedInstance> select_split(std::span<const AnnotatedInstance> instances, Split split);

} // namespace values_miner
