#include "values_miner/net.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>
#include <openssl/evp.h>

#include "values_miner/error.hpp"

namespace values_miner {

namespace {

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string path;   // path + query, at least "/"
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error("config", "URL lacks a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

    HttpResponse send(const HttpRequest& request) override {
        const auto parts = split_url(request.url);
        httplib::Client client(parts.origin);
        client.set_connection_timeout(timeout_);
        client.set_read_timeout(timeout_);
        client.set_write_timeout(timeout_);

        httplib::Headers headers;
        for (const auto& [k, v] : request.headers) headers.emplace(k, v);

        httplib::Result result = request.method == "POST"
                                     ? client.Post(parts.path, headers, request.body,
                                                   request.content_type.empty() ? "application/json"
                                                                                : request.content_type)
                                     : client.Get(parts.path, headers);
        HttpResponse response;
        if (!result) {
            response.error = httplib::to_string(result.error());
            return response;
        }
        response.status = result->status;
        response.body = result->body;
        if (result->has_header("Retry-After")) {
            try {
                response.retry_after = std::chrono::seconds(std::stol(result->get_header_value("Retry-After")));
            } catch (const std::exception&) {
                // HTTP-date form; fall back to the computed backoff.
            }
        }
        return response;
    }

private:
    std::chrono::seconds timeout_;
};

} // namespace

std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout) {
    return std::make_unique<HttplibTransport>(timeout);
}

RateLimiter::RateLimiter(double requests_per_second) {
    if (requests_per_second > 0) {
        interval_ = std::chrono::nanoseconds(static_cast<std::int64_t>(1e9 / requests_per_second));
    }
}

void RateLimiter::acquire() {
    if (interval_.count() == 0) return;
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_);
        next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
}

std::chrono::milliseconds RetryPolicy::delay_for(int retry) const {
    auto delay = base_delay;
    for (int i = 0; i < retry && delay < max_delay; ++i) delay *= 2;
    return std::min(delay, max_delay);
}

bool is_retryable(const HttpResponse& response) noexcept {
    return response.status == 0 || response.status == 429 || response.status >= 500;
}

RetryOutcome send_with_retry(HttpTransport& transport, const HttpRequest& request, const RetryPolicy& policy,
                             RateLimiter* limiter) {
    RetryOutcome outcome;
    const int attempts = std::max(1, policy.max_attempts);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (limiter) limiter->acquire();
        outcome.response = transport.send(request);
        outcome.attempts = attempt + 1;
        if (!is_retryable(outcome.response) || attempt + 1 == attempts) break;
        auto delay = policy.delay_for(attempt);
        if (outcome.response.retry_after) {
            const auto hinted = std::chrono::duration_cast<std::chrono::milliseconds>(*outcome.response.retry_after);
            delay = std::min(std::max(delay, hinted), policy.max_delay);
        }
        std::this_thread::sleep_for(delay);
    }
    return outcome;
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("crypto", "SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

} // namespace values_miner
