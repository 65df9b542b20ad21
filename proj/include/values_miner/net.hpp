#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace values_miner {

struct HttpRequest {
    std::string method = "GET";
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::string content_type;
};

struct HttpResponse {
    int status = 0;      // 0: no response (connection failure, timeout)
    std::string body;
    std::string error;   // transport error text when status == 0
    std::optional<std::chrono::seconds> retry_after;

    bool ok() const noexcept { return status >= 200 && status < 300; }
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport; http:// and https:// URLs.
std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout = std::chrono::seconds(30));

// Decorator that counts requests passed to the wrapped transport.
class CountingTransport final : public HttpTransport {
public:
    explicit CountingTransport(HttpTransport& inner) : inner_(inner) {}
    HttpResponse send(const HttpRequest& request) override {
        ++count_;
        return inner_.send(request);
    }
    std::size_t count() const noexcept { return count_.load(); }

private:
    HttpTransport& inner_;
    std::atomic<std::size_t> count_{0};
};

// Spaces requests at least 1/rps apart. Thread-safe; rps <= 0 disables it.
class RateLimiter {
public:
    explicit RateLimiter(double requests_per_second = 0.0);
    void acquire();

private:
    std::chrono::nanoseconds interval_{0};
    std::chrono::steady_clock::time_point next_{};
    std::mutex mutex_;
};

struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds base_delay{500};
    std::chrono::milliseconds max_delay{8000};

    /// base * 2^retry, capped at max_delay.
    std::chrono::milliseconds delay_for(int retry) const;
};

/// Connection failures, 429 and 5xx are worth another attempt.
bool is_retryable(const HttpResponse& response) noexcept;

struct RetryOutcome {
    HttpResponse response;
    int attempts = 0;
};

/// Sends with exponential backoff. Each attempt first waits on the limiter
/// (when given). A Retry-After header longer than the computed backoff wins,
/// but never beyond max_delay.
RetryOutcome send_with_retry(HttpTransport& transport, const HttpRequest& request, const RetryPolicy& policy,
                             RateLimiter* limiter = nullptr);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

} // namespace values_miner
