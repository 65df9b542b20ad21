#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "values_miner/corpus.hpp"
#include "values_miner/net.hpp"

namespace values_miner {

struct ApiConfig {
    std::string base_url = "https://api.semanticscholar.org/graph/v1";
    std::string api_key; // sent as x-api-key when non-empty
    double requests_per_second = 1.0;
    RetryPolicy retry;
};

/// Reads VALUES_MINER_API_KEY into config.api_key when set.
void apply_api_key_from_env(ApiConfig& config);

struct SkippedId {
    std::string paper_id;
    std::string reason;
};

struct FetchResult {
    std::vector<PaperRecord> records;
    std::vector<SkippedId> skipped; // unknown ids, missing abstracts
    std::vector<std::string> errors; // ids that failed after all retries
    std::size_t requests = 0;
};

// Fetches one paper per id with GET {base_url}/paper/{id}?fields=paperId,venue,year,abstract,
// serialized behind the rate limiter. Venues are mapped through the registry;
// unknown venues get subfield "unmapped" and field group Other.
FetchResult fetch_abstracts(std::span<const std::string> paper_ids, const ApiConfig& config,
                            const VenueRegistry& registry, HttpTransport& transport);

} // namespace values_miner
