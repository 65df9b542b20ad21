#include "values_miner/llm_adapter.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "values_miner/error.hpp"
#include "values_miner/rng.hpp"

namespace values_miner {

namespace {

std::vector<const AnnotatedInstance*> draw(std::vector<const AnnotatedInstance*> candidates, std::size_t k,
                                           Rng& rng) {
    shuffle(std::span<const AnnotatedInstance*>(candidates), rng);
    if (candidates.size() > k) candidates.resize(k);
    return candidates;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

BuiltPrompt build_prompt(const PromptSpec& spec, ResearchValue value, std::span<const AnnotatedInstance> pool,
                         std::string_view sentence) {
    if (spec.k < 0) throw Error("config", "k must be non-negative");
    if (spec.template_id != "binary-v1") throw Error("config", "unknown prompt template '" + spec.template_id + "'");

    BuiltPrompt prompt;
    const auto k = static_cast<std::size_t>(spec.k);
    std::vector<const AnnotatedInstance*> positives, negatives;
    if (k > 0) {
        for (const auto& inst : pool) {
            if (inst.split != Split::Train || inst.sentence_text == sentence) continue;
            (inst.gold[value] ? positives : negatives).push_back(&inst);
        }
        Rng rng(derive_seed(spec.seed, value_id(value)));
        positives = draw(std::move(positives), k, rng);
        negatives = draw(std::move(negatives), k, rng);
        if (positives.size() < k) {
            prompt.warnings.push_back("only " + std::to_string(positives.size()) + " positive train exemplars for " +
                                      std::string(value_id(value)) + " (k=" + std::to_string(k) + ")");
        }
        if (negatives.size() < k) {
            prompt.warnings.push_back("only " + std::to_string(negatives.size()) + " negative train exemplars for " +
                                      std::string(value_id(value)) + " (k=" + std::to_string(k) + ")");
        }
    }
    prompt.positives = positives.size();
    prompt.negatives = negatives.size();

    const std::string name(display_name(value));
    std::string& t = prompt.text;
    t += "Task: decide whether a sentence from a scientific paper abstract expresses the research value \"" + name +
         "\".\n\n";
    t += "A sentence expresses a research value when it presents something as worth having or worth avoiding, "
         "for example by praising a property of the work or criticising a shortcoming of other work.\n\n";
    t += "Definition of " + name + ": " + std::string(spec.definition_for(value)) + "\n\n";
    if (!positives.empty() || !negatives.empty()) {
        t += "Examples:\n";
        const std::size_t rounds = std::max(positives.size(), negatives.size());
        for (std::size_t i = 0; i < rounds; ++i) {
            if (i < positives.size()) t += "Sentence: " + positives[i]->sentence_text + "\nAnswer: yes\n\n";
            if (i < negatives.size()) t += "Sentence: " + negatives[i]->sentence_text + "\nAnswer: no\n\n";
        }
    }
    t += "Now judge the following sentence. Answer with exactly one word, \"yes\" or \"no\".\n";
    t += "Sentence: " + std::string(sentence) + "\nAnswer:";
    return prompt;
}

std::optional<int> parse_response(std::string_view raw) {
    std::size_t i = 0;
    while (i < raw.size() && (std::isspace(static_cast<unsigned char>(raw[i])) || raw[i] == '"' ||
                              raw[i] == '\'' || raw[i] == '*' || raw[i] == '`')) {
        ++i;
    }
    auto starts_with_word = [&](std::string_view word) {
        if (raw.size() - i < word.size()) return false;
        for (std::size_t k = 0; k < word.size(); ++k) {
            if (std::tolower(static_cast<unsigned char>(raw[i + k])) != word[k]) return false;
        }
        const std::size_t after = i + word.size();
        return after == raw.size() || !std::isalnum(static_cast<unsigned char>(raw[after]));
    };
    if (starts_with_word("yes")) return 1;
    if (starts_with_word("no")) return 0;
    return std::nullopt;
}

std::string cache_key(std::string_view model, std::string_view prompt) {
    std::string material(model);
    material.push_back('\0');
    material.append(prompt);
    return sha256_hex(material);
}

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(*path_, std::ios::binary);
    if (!in) return; // created on first store
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto obj = nlohmann::json::parse(line);
            CachedResponse e;
            e.key = obj.at("key").get<std::string>();
            e.model = obj.value("model", "");
            e.raw = obj.value("raw", "");
            e.label = obj.value("label", 0);
            e.parse_failure = obj.value("parse_failure", false);
            e.timestamp = obj.value("timestamp", "");
            entries_[e.key] = std::move(e);
        } catch (const nlohmann::json::exception& ex) {
            throw Error("parse", "cache file " + path_->string() + " line " + std::to_string(line_no) + ": " +
                                     ex.what());
        }
    }
}

std::optional<CachedResponse> ResponseCache::find(const std::string& key) const {
    std::lock_guard lock(mutex_);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::store(const CachedResponse& entry) {
    std::lock_guard lock(mutex_);
    entries_[entry.key] = entry;
    if (!path_) return;
    std::ofstream out(*path_, std::ios::binary | std::ios::app);
    if (!out) throw Error("io", "cannot append to cache file " + path_->string());
    nlohmann::ordered_json obj;
    obj["key"] = entry.key;
    obj["model"] = entry.model;
    obj["raw"] = entry.raw;
    obj["label"] = entry.label;
    obj["parse_failure"] = entry.parse_failure;
    obj["timestamp"] = entry.timestamp;
    out << obj.dump() << '\n';
}

std::size_t ResponseCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

LlmEndpoint endpoint_from_env() {
    LlmEndpoint endpoint;
    if (const char* url = std::getenv("VALUES_MINER_LLM_URL")) endpoint.url = url;
    if (const char* key = std::getenv("VALUES_MINER_LLM_KEY")) endpoint.api_key = key;
    return endpoint;
}

LlmResult llm_classify(std::string_view sentence, ResearchValue value, const PromptSpec& spec,
                       std::span<const AnnotatedInstance> pool, ResponseCache& cache, const LlmEndpoint& endpoint,
                       HttpTransport* transport) {
    const auto prompt = build_prompt(spec, value, pool, sentence);
    const auto key = cache_key(spec.model, prompt.text);

    LlmResult result;
    if (const auto hit = cache.find(key)) {
        result.label = hit->label;
        result.parse_failure = hit->parse_failure;
        result.raw = hit->raw;
        result.from_cache = true;
        return result;
    }
    if (transport == nullptr || endpoint.url.empty()) {
        result.error = "cache miss with no endpoint configured";
        return result;
    }

    nlohmann::ordered_json body;
    body["model"] = spec.model;
    body["temperature"] = spec.temperature;
    body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", prompt.text}}});

    HttpRequest request;
    request.method = "POST";
    request.url = endpoint.url;
    request.body = body.dump();
    request.content_type = "application/json";
    if (!endpoint.api_key.empty()) request.headers.emplace_back("Authorization", "Bearer " + endpoint.api_key);

    const auto outcome = send_with_retry(*transport, request, endpoint.retry);
    if (!outcome.response.ok()) {
        const auto& r = outcome.response;
        result.error = (r.status == 0 ? r.error : "HTTP " + std::to_string(r.status)) + " after " +
                       std::to_string(outcome.attempts) + " attempts";
        return result;
    }

    std::string text;
    try {
        const auto doc = nlohmann::json::parse(outcome.response.body);
        if (doc.contains("choices")) {
            text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } else {
            text = doc.at("text").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        result.error = std::string("malformed endpoint reply: ") + e.what();
        return result;
    }

    const auto parsed = parse_response(text);
    result.raw = text;
    result.label = parsed.value_or(0);
    result.parse_failure = !parsed.has_value();
    cache.store({key, spec.model, text, result.label, result.parse_failure, utc_now()});
    return result;
}

LlmBatchResult llm_classify_batch(std::span<const AnnotatedInstance> targets, std::span<const ResearchValue> values,
                                  const PromptSpec& spec, std::span<const AnnotatedInstance> pool,
                                  ResponseCache& cache, const LlmEndpoint& endpoint, HttpTransport* transport,
                                  std::size_t in_flight) {
    if (!values.empty()) build_prompt(spec, values.front(), {}, ""); // rejects a bad spec up front

    LlmBatchResult batch;
    batch.items.resize(targets.size() * values.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (std::size_t j = 0; j < values.size(); ++j) {
            batch.items[i * values.size() + j].instance = i;
            batch.items[i * values.size() + j].value = values[j];
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next++; idx < batch.items.size(); idx = next++) {
            auto& item = batch.items[idx];
            try {
                item.result = llm_classify(targets[item.instance].sentence_text, item.value, spec, pool, cache,
                                           endpoint, transport);
            } catch (const std::exception& e) {
                item.result.error = e.what();
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(in_flight, 1, std::max<std::size_t>(1, batch.items.size()));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool_threads;
        for (std::size_t w = 0; w < workers; ++w) pool_threads.emplace_back(worker);
    }

    for (const auto& item : batch.items) {
        batch.cache_hits += item.result.from_cache ? 1 : 0;
        batch.parse_failures += item.result.parse_failure ? 1 : 0;
        batch.errors += item.result.error ? 1 : 0;
    }
    return batch;
}

} // namespace values_miner
