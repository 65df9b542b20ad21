#include "values_miner/fetch.hpp"

#include <cctype>
#include <cstdlib>

#include <json.hpp>

namespace values_miner {

namespace {

std::string percent_encode(std::string_view s) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == ':') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0xF]);
        }
    }
    return out;
}

std::string trim_slash(std::string s) {
    while (!s.empty() && s.back() == '/') s.pop_back();
    return s;
}

} // namespace

void apply_api_key_from_env(ApiConfig& config) {
    if (const char* key = std::getenv("VALUES_MINER_API_KEY"); key != nullptr && *key != '\0') {
        config.api_key = key;
    }
}

FetchResult fetch_abstracts(std::span<const std::string> paper_ids, const ApiConfig& config,
                            const VenueRegistry& registry, HttpTransport& transport) {
    FetchResult result;
    if (paper_ids.empty()) return result;

    RateLimiter limiter(config.requests_per_second);
    const std::string base = trim_slash(config.base_url);

    for (const auto& id : paper_ids) {
        HttpRequest request;
        request.url = base + "/paper/" + percent_encode(id) + "?fields=paperId,venue,year,abstract";
        if (!config.api_key.empty()) request.headers.emplace_back("x-api-key", config.api_key);

        const auto outcome = send_with_retry(transport, request, config.retry, &limiter);
        result.requests += static_cast<std::size_t>(outcome.attempts);
        const auto& response = outcome.response;

        if (response.status == 404) {
            result.skipped.push_back({id, "unknown paper id"});
            continue;
        }
        if (!response.ok()) {
            const std::string why = response.status == 0 ? response.error
                                                         : "HTTP " + std::to_string(response.status);
            result.errors.push_back(id + ": " + why + " after " + std::to_string(outcome.attempts) + " attempts");
            continue;
        }

        try {
            const auto doc = nlohmann::json::parse(response.body);
            const auto abstract = doc.value("abstract", nlohmann::json());
            if (!abstract.is_string() || abstract.get<std::string>().empty()) {
                result.skipped.push_back({id, "no abstract available"});
                continue;
            }
            PaperRecord record;
            record.paper_id = doc.value("paperId", nlohmann::json()).is_string() ? doc["paperId"].get<std::string>() : id;
            record.venue = doc.value("venue", nlohmann::json()).is_string() ? doc["venue"].get<std::string>() : "";
            record.year = doc.value("year", nlohmann::json()).is_number_integer() ? doc["year"].get<int>() : 0;
            record.abstract = abstract.get<std::string>();
            if (const auto* info = registry.find(record.venue)) {
                record.subfield = info->subfield;
                record.field_group = info->field_group;
            } else {
                record.subfield = "unmapped";
                record.field_group = FieldGroup::Other;
            }
            result.records.push_back(std::move(record));
        } catch (const nlohmann::json::exception& e) {
            result.errors.push_back(id + ": malformed response: " + e.what());
        }
    }
    return result;
}

} // namespace values_miner
