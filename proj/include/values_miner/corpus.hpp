#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace values_miner {

enum class FieldGroup : std::uint8_t { AI, Systems, Theory, Interdisciplinary, Other };

std::string_view field_group_name(FieldGroup g) noexcept;
std::optional<FieldGroup> parse_field_group(std::string_view text);

inline constexpr int kStudyFirstYear = 2013;
inline constexpr int kStudyLastYear = 2022;

struct PaperRecord {
    std::string paper_id;
    std::string venue;
    std::string subfield;
    FieldGroup field_group = FieldGroup::Other;
    int year = 0;
    std::string abstract;

    bool in_study_window() const noexcept { return year >= kStudyFirstYear && year <= kStudyLastYear; }
    friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

struct Diagnostic {
    std::size_t line = 0; // 0 when not tied to a line
    std::string message;
};

struct Corpus {
    std::vector<PaperRecord> records;
    std::vector<Diagnostic> warnings;

    std::size_t out_of_window() const;
};

/// Line-delimited JSON, one flat object per line with keys paper_id, venue,
/// subfield, field_group, year, abstract. Malformed lines and duplicate ids
/// are skipped with a warning carrying the line number; blank lines are
/// ignored. An unreadable file throws Error("io").
Corpus load_corpus(const std::filesystem::path& path);
Corpus read_corpus(std::istream& in);

void write_corpus(std::ostream& out, std::span<const PaperRecord> records);
void save_corpus(const std::filesystem::path& path, std::span<const PaperRecord> records);

std::string record_to_json_line(const PaperRecord& record);

struct VenueInfo {
    std::string subfield;
    FieldGroup field_group = FieldGroup::Other;
};

// venue -> (subfield, field group). Each subfield belongs to one field group.
class VenueRegistry {
public:
    /// Throws Error("config") on a duplicate venue or a subfield assigned to
    /// two field groups.
    void add(const std::string& venue, const std::string& subfield, FieldGroup group);

    const VenueInfo* find(std::string_view venue) const;
    std::size_t count() const noexcept { return entries_.size(); }
    const std::map<std::string, VenueInfo, std::less<>>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, VenueInfo, std::less<>> entries_;
    std::map<std::string, FieldGroup, std::less<>> subfield_groups_;
};

/// Same line-delimited JSON serialization; keys venue, subfield, field_group.
VenueRegistry load_registry(const std::filesystem::path& path);
VenueRegistry read_registry(std::istream& in);

} // namespace values_miner
