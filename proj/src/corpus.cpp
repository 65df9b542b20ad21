#include "values_miner/corpus.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "values_miner/error.hpp"

namespace values_miner {

using json = nlohmann::json;

std::string_view field_group_name(FieldGroup g) noexcept {
    switch (g) {
    case FieldGroup::AI: return "AI";
    case FieldGroup::Systems: return "Systems";
    case FieldGroup::Theory: return "Theory";
    case FieldGroup::Interdisciplinary: return "Interdisciplinary";
    case FieldGroup::Other: return "Other";
    }
    return "Other";
}

std::optional<FieldGroup> parse_field_group(std::string_view text) {
    for (auto g : {FieldGroup::AI, FieldGroup::Systems, FieldGroup::Theory, FieldGroup::Interdisciplinary,
                   FieldGroup::Other}) {
        if (text == field_group_name(g)) return g;
    }
    return std::nullopt;
}

std::size_t Corpus::out_of_window() const {
    std::size_t n = 0;
    for (const auto& r : records) n += r.in_study_window() ? 0 : 1;
    return n;
}

namespace {

std::string required_string(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw std::invalid_argument(std::string("missing field '") + key + "'");
    if (!it->is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

PaperRecord parse_record(std::string_view line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error&) {
        throw std::invalid_argument("not valid JSON");
    }
    if (!obj.is_object()) throw std::invalid_argument("not a JSON object");

    PaperRecord r;
    r.paper_id = required_string(obj, "paper_id");
    r.venue = required_string(obj, "venue");
    r.subfield = required_string(obj, "subfield");
    const auto group = required_string(obj, "field_group");
    const auto parsed = parse_field_group(group);
    if (!parsed) throw std::invalid_argument("unknown field_group '" + group + "'");
    r.field_group = *parsed;
    const auto year = obj.find("year");
    if (year == obj.end()) throw std::invalid_argument("missing field 'year'");
    if (!year->is_number_integer()) throw std::invalid_argument("field 'year' must be an integer");
    r.year = year->get<int>();
    r.abstract = required_string(obj, "abstract");
    if (r.paper_id.empty()) throw std::invalid_argument("empty paper_id");
    if (r.abstract.empty()) throw std::invalid_argument("empty abstract");
    return r;
}

bool blank(std::string_view line) {
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

} // namespace

Corpus read_corpus(std::istream& in) {
    Corpus corpus;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        try {
            auto record = parse_record(line);
            if (!ids.insert(record.paper_id).second) {
                corpus.warnings.push_back({line_no, "duplicate paper_id '" + record.paper_id + "'"});
                continue;
            }
            if (!record.in_study_window()) {
                corpus.warnings.push_back({line_no, "year " + std::to_string(record.year) +
                                                        " outside 2013-2022; kept but excluded from trends"});
            }
            corpus.records.push_back(std::move(record));
        } catch (const std::invalid_argument& e) {
            corpus.warnings.push_back({line_no, std::string("malformed record: ") + e.what()});
        } catch (const json::exception& e) {
            corpus.warnings.push_back({line_no, std::string("malformed record: ") + e.what()});
        }
    }
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot read corpus file " + path.string());
    return read_corpus(in);
}

std::string record_to_json_line(const PaperRecord& r) {
    nlohmann::ordered_json obj;
    obj["paper_id"] = r.paper_id;
    obj["venue"] = r.venue;
    obj["subfield"] = r.subfield;
    obj["field_group"] = field_group_name(r.field_group);
    obj["year"] = r.year;
    obj["abstract"] = r.abstract;
    return obj.dump();
}

void write_corpus(std::ostream& out, std::span<const PaperRecord> records) {
    for (const auto& r : records) out << record_to_json_line(r) << '\n';
}

void save_corpus(const std::filesystem::path& path, std::span<const PaperRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write corpus file " + path.string());
    write_corpus(out, records);
}

void VenueRegistry::add(const std::string& venue, const std::string& subfield, FieldGroup group) {
    if (venue.empty() || subfield.empty()) throw Error("config", "registry entries need a venue and a subfield");
    if (entries_.contains(venue)) throw Error("config", "venue '" + venue + "' listed twice in registry");
    if (const auto it = subfield_groups_.find(subfield); it != subfield_groups_.end() && it->second != group) {
        throw Error("config", "subfield '" + subfield + "' assigned to both " +
                                  std::string(field_group_name(it->second)) + " and " +
                                  std::string(field_group_name(group)));
    }
    subfield_groups_.emplace(subfield, group);
    entries_.emplace(venue, VenueInfo{subfield, group});
}

const VenueInfo* VenueRegistry::find(std::string_view venue) const {
    const auto it = entries_.find(venue);
    return it == entries_.end() ? nullptr : &it->second;
}

VenueRegistry read_registry(std::istream& in) {
    VenueRegistry registry;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        try {
            const auto obj = json::parse(line);
            const auto group_name = required_string(obj, "field_group");
            const auto group = parse_field_group(group_name);
            if (!group) throw std::invalid_argument("unknown field_group '" + group_name + "'");
            registry.add(required_string(obj, "venue"), required_string(obj, "subfield"), *group);
        } catch (const Error& e) {
            throw Error("config", "registry line " + std::to_string(line_no) + ": " + e.what());
        } catch (const std::exception& e) {
            throw Error("parse", "registry line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return registry;
}

VenueRegistry load_registry(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot read venue registry " + path.string());
    return read_registry(in);
}

} // namespace values_miner
