#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "values_miner/corpus.hpp"
#include "values_miner/segmenter.hpp"

namespace values_miner {

struct SampledSentence {
    std::string paper_id;
    std::string venue;
    std::string sentence_text;
    std::size_t sentence_index = 0;
    std::uint64_t rng_seed = 0; // per-venue stream seed derived from the run seed

    friend bool operator==(const SampledSentence&, const SampledSentence&) = default;
};

struct SamplingResult {
    std::vector<SampledSentence> sentences;
    std::vector<std::string> warnings;
};

// Two-stage annotation sampling, venue by venue (venues in name order):
//  1. one abstract from each study year 2013-2022 that the venue covers (if
//     per_venue is smaller than the number of covered years, per_venue of
//     those years are picked at random);
//  2. further abstracts, each from a uniformly drawn year that still has
//     unpicked abstracts, until per_venue is reached or the venue runs out.
// Then one sentence is drawn uniformly from each picked abstract.
//
// Only in-window records are eligible. Venues come from the registry plus any
// venue appearing in the corpus; empty or short venues produce warnings.
// Every venue uses its own stream derived from (seed, venue name), so results
// do not depend on which other venues are present.
SamplingResult sample_for_annotation(std::span<const PaperRecord> corpus, const VenueRegistry& registry,
                                     std::size_t per_venue, std::uint64_t seed,
                                     const Segmenter& segmenter = Segmenter());

void write_samples(std::ostream& out, std::span<const SampledSentence> samples);

} // namespace values_miner
