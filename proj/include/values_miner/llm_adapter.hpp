#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "values_miner/annotations.hpp"
#include "values_miner/net.hpp"
#include "values_miner/taxonomy.hpp"

namespace values_miner {

struct PromptSpec {
    std::array<std::string, kNumValues> definitions{}; // empty entry: built-in codebook text
    int k = 5;                       // exemplars per class
    std::string template_id = "binary-v1";
    std::string model = "gpt-4o-mini";
    double temperature = 0.0;
    std::uint64_t seed = 0;

    std::string_view definition_for(ResearchValue v) const {
        const auto& d = definitions[index_of(v)];
        return d.empty() ? default_definition(v) : std::string_view(d);
    }
};

struct BuiltPrompt {
    std::string text;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    std::vector<std::string> warnings;
};

/// Few-shot prompt for one value. Exemplars come only from train-split
/// instances of `pool` (excluding the target sentence); k of each class are
/// drawn with a stream seeded by (spec.seed, value), so the same inputs give
/// the same text. Too few exemplars: all are used and a warning is added.
BuiltPrompt build_prompt(const PromptSpec& spec, ResearchValue value, std::span<const AnnotatedInstance> pool,
                         std::string_view sentence);

/// Leading "yes" -> 1, leading "no" -> 0 (case-insensitive, after
/// whitespace and quotes/asterisks); anything else is a parse failure.
std::optional<int> parse_response(std::string_view raw);

struct CachedResponse {
    std::string key;
    std::string model;
    std::string raw;
    int label = 0;
    bool parse_failure = false;
    std::string timestamp; // UTC ISO-8601
};

/// sha256(model id, NUL, prompt).
std::string cache_key(std::string_view model, std::string_view prompt);

// On-disk response cache: one JSON object per line. Later lines for the same
// key win. Thread-safe; writes append.
class ResponseCache {
public:
    ResponseCache() = default; // memory only
    explicit ResponseCache(std::filesystem::path path);

    std::optional<CachedResponse> find(const std::string& key) const;
    void store(const CachedResponse& entry);
    std::size_t size() const;

private:
    std::optional<std::filesystem::path> path_;
    std::map<std::string, CachedResponse> entries_;
    mutable std::mutex mutex_;
};

// Chat-completions style endpoint: POST {url} with
// {"model", "temperature", "messages": [{"role": "user", "content": prompt}]},
// reply text read from choices[0].message.content (or a top-level "text").
struct LlmEndpoint {
    std::string url;
    std::string api_key; // Authorization: Bearer <key>
    RetryPolicy retry;
};

/// VALUES_MINER_LLM_URL / VALUES_MINER_LLM_KEY.
LlmEndpoint endpoint_from_env();

struct LlmResult {
    int label = 0;
    bool parse_failure = false;
    bool from_cache = false;
    std::optional<std::string> error; // set when the endpoint failed after retries
    std::string raw;
};

/// Cache first; otherwise query the endpoint (bounded retries) and persist
/// the raw reply. A transport is only touched on a cache miss.
LlmResult llm_classify(std::string_view sentence, ResearchValue value, const PromptSpec& spec,
                       std::span<const AnnotatedInstance> pool, ResponseCache& cache, const LlmEndpoint& endpoint,
                       HttpTransport* transport);

struct LlmBatchItem {
    std::size_t instance = 0;
    ResearchValue value = ResearchValue::Performance;
    LlmResult result;
};

struct LlmBatchResult {
    std::vector<LlmBatchItem> items; // instance-major, values in the requested order
    std::size_t cache_hits = 0;
    std::size_t parse_failures = 0;
    std::size_t errors = 0;
};

/// Classifies every (instance, value) pair with up to `in_flight` concurrent
/// requests. Failures are per item; the batch always completes.
LlmBatchResult llm_classify_batch(std::span<const AnnotatedInstance> targets, std::span<const ResearchValue> values,
                                  const PromptSpec& spec, std::span<const AnnotatedInstance> pool,
                                  ResponseCache& cache, const LlmEndpoint& endpoint, HttpTransport* transport,
                                  std::size_t in_flight = 1);

} // namespace values_miner
