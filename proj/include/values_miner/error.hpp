#pragma once

#include <stdexcept>
#include <string>

namespace values_miner {

// Every failure surfaced to callers carries a short machine-readable kind
// ("io", "parse", "config", "usage", ...) next to the human message.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

} // namespace values_miner
