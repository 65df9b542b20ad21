#include "values_miner/sampling.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "values_miner/error.hpp"
#include "values_miner/rng.hpp"

namespace values_miner {

namespace {

// Years -> indices of still-unpicked abstracts (sorted by paper_id).
using YearPool = std::map<int, std::vector<const PaperRecord*>>;

const PaperRecord* take_from_year(YearPool& pool, int year, Rng& rng) {
    auto& bucket = pool.at(year);
    const auto pick = static_cast<std::size_t>(uniform_below(rng, bucket.size()));
    const PaperRecord* chosen = bucket[pick];
    bucket.erase(bucket.begin() + static_cast<std::ptrdiff_t>(pick));
    if (bucket.empty()) pool.erase(year);
    return chosen;
}

} // namespace

SamplingResult sample_for_annotation(std::span<const PaperRecord> corpus, const VenueRegistry& registry,
                                     std::size_t per_venue, std::uint64_t seed, const Segmenter& segmenter) {
    if (per_venue == 0) throw Error("config", "per_venue must be at least 1");

    std::map<std::string, std::vector<const PaperRecord*>> by_venue;
    for (const auto& [venue, info] : registry.entries()) by_venue[venue];
    for (const auto& r : corpus) {
        if (r.in_study_window()) by_venue[r.venue].push_back(&r);
    }

    SamplingResult result;
    for (auto& [venue, records] : by_venue) {
        if (records.empty()) {
            result.warnings.push_back("venue '" + venue + "' has no abstracts in 2013-2022; skipped");
            continue;
        }
        if (records.size() < per_venue) {
            result.warnings.push_back("venue '" + venue + "' has only " + std::to_string(records.size()) +
                                      " abstracts; all of them are used");
        }
        std::sort(records.begin(), records.end(),
                  [](const PaperRecord* a, const PaperRecord* b) { return a->paper_id < b->paper_id; });

        const std::uint64_t venue_seed = derive_seed(seed, venue);
        Rng rng(venue_seed);

        YearPool pool;
        for (const auto* r : records) pool[r->year].push_back(r);

        std::vector<const PaperRecord*> picked;
        std::vector<int> years;
        for (const auto& [year, bucket] : pool) years.push_back(year);
        if (years.size() > per_venue) {
            shuffle(std::span<int>(years), rng);
            years.resize(per_venue);
            std::sort(years.begin(), years.end());
        }
        for (const int year : years) picked.push_back(take_from_year(pool, year, rng));

        while (picked.size() < per_venue && !pool.empty()) {
            auto it = pool.begin();
            std::advance(it, static_cast<std::ptrdiff_t>(uniform_below(rng, pool.size())));
            picked.push_back(take_from_year(pool, it->first, rng));
        }

        for (const auto* r : picked) {
            const auto spans = segmenter.segment(r->abstract);
            if (spans.empty()) {
                result.warnings.push_back("abstract '" + r->paper_id + "' has no sentences; skipped");
                continue;
            }
            const auto index = static_cast<std::size_t>(uniform_below(rng, spans.size()));
            result.sentences.push_back({r->paper_id, venue, spans[index].text, index, venue_seed});
        }
    }
    return result;
}

void write_samples(std::ostream& out, std::span<const SampledSentence> samples) {
    for (const auto& s : samples) {
        nlohmann::ordered_json obj;
        obj["paper_id"] = s.paper_id;
        obj["venue"] = s.venue;
        obj["sentence_index"] = s.sentence_index;
        obj["sentence_text"] = s.sentence_text;
        obj["rng_seed"] = s.rng_seed;
        out << obj.dump() << '\n';
    }
}

} // namespace values_miner
