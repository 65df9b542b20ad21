#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace values_miner {

// The ten research values, in the fixed order used for every table,
// matrix and file column in this project.
enum class ResearchValue : std::uint8_t {
    Performance,
    Novelty,
    Efficiency,
    Generalizability,
    Openness,
    Simplicity,
    Understanding,
    Integrity,
    Society,
    Usability,
};

inline constexpr std::size_t kNumValues = 10;

inline constexpr std::array<ResearchValue, kNumValues> kAllValues = {
    ResearchValue::Performance,   ResearchValue::Novelty,
    ResearchValue::Efficiency,    ResearchValue::Generalizability,
    ResearchValue::Openness,      ResearchValue::Simplicity,
    ResearchValue::Understanding, ResearchValue::Integrity,
    ResearchValue::Society,       ResearchValue::Usability,
};

constexpr std::size_t index_of(ResearchValue v) noexcept { return static_cast<std::size_t>(v); }

/// Lowercase identifier used in files ("performance", "novelty", ...).
std::string_view value_id(ResearchValue v) noexcept;

/// Human-readable name ("Performance", ...).
std::string_view display_name(ResearchValue v) noexcept;

/// Accepts either the id or the display name, case-insensitively.
std::optional<ResearchValue> parse_value(std::string_view text);

/// Built-in codebook definition; used by the prompting backend when no
/// codebook file overrides it.
std::string_view default_definition(ResearchValue v) noexcept;

// Ten binary flags, one per research value.
class ValueLabelVector {
public:
    ValueLabelVector() = default;

    bool operator[](ResearchValue v) const { return bits_[index_of(v)]; }
    bool test(std::size_t i) const { return bits_[i]; }

    void set(ResearchValue v, bool on = true) { bits_[index_of(v)] = on; }
    void set(std::size_t i, bool on = true) { bits_[i] = on; }

    std::size_t count() const noexcept { return bits_.count(); }
    bool none() const noexcept { return bits_.none(); }

    ValueLabelVector& operator|=(const ValueLabelVector& other) {
        bits_ |= other.bits_;
        return *this;
    }

    friend ValueLabelVector operator|(ValueLabelVector a, const ValueLabelVector& b) { return a |= b; }
    friend bool operator==(const ValueLabelVector&, const ValueLabelVector&) = default;

private:
    std::bitset<kNumValues> bits_;
};

} // namespace values_miner
