#include "values_miner/taxonomy.hpp"

#include <algorithm>
#include <cctype>

namespace values_miner {

namespace {

struct ValueInfo {
    std::string_view id;
    std::string_view name;
    std::string_view definition;
};

constexpr std::array<ValueInfo, kNumValues> kInfo = {{
    {"performance", "Performance",
     "The sentence presents accuracy, quality, or results that beat or match other approaches as a "
     "reason the work matters, or treats poor results of existing work as a problem."},
    {"novelty", "Novelty",
     "The sentence stresses that something is new: a first attempt, a new method, task, dataset, or "
     "perspective, or that prior work has left a gap this work fills."},
    {"efficiency", "Efficiency",
     "The sentence values saving time, memory, energy, computation, data, or cost, or criticises "
     "approaches that are slow or expensive."},
    {"generalizability", "Generalizability",
     "The sentence values working across many settings, domains, tasks, or unseen conditions, or "
     "criticises approaches that are narrow or brittle."},
    {"openness", "Openness",
     "The sentence values releasing code, data, or tools, reproducibility, collaboration, or "
     "outlines future work that others can build on."},
    {"simplicity", "Simplicity",
     "The sentence values approaches that are simple, lightweight, easy to implement, or "
     "conceptually clean, or criticises needless complexity."},
    {"understanding", "Understanding",
     "The sentence values explaining a phenomenon, offering insight or analysis, or grounding the "
     "work in theory such as proofs, bounds, or formal guarantees."},
    {"integrity", "Integrity",
     "The sentence values fairness, reducing bias, protecting privacy or security of people, or "
     "ethical conduct, or warns about harms along these lines."},
    {"society", "Society",
     "The sentence values benefits or risks for society, communities, health, the environment, or "
     "the public beyond the research community."},
    {"usability", "Usability",
     "The sentence values ease of use, user experience, accessibility, or practical adoption by "
     "people who interact with the system."},
}};

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

} // namespace

std::string_view value_id(ResearchValue v) noexcept { return kInfo[index_of(v)].id; }

std::string_view display_name(ResearchValue v) noexcept { return kInfo[index_of(v)].name; }

std::string_view default_definition(ResearchValue v) noexcept { return kInfo[index_of(v)].definition; }

std::optional<ResearchValue> parse_value(std::string_view text) {
    for (auto v : kAllValues) {
        if (iequals(text, value_id(v))) return v;
    }
    return std::nullopt;
}

} // namespace values_miner
