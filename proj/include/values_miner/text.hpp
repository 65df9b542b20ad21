#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace values_miner {

/// NFKC-normalizes, lowercases, and splits text into tokens. A token is a
/// maximal run of letters, digits and combining marks, where a hyphen or an
/// apostrophe is kept only when it sits between two such characters.
/// U+2019 is read as an apostrophe and U+2010/U+2011 as a hyphen.
std::vector<std::string> tokenize_normalize(std::string_view text);

namespace utf8 {

struct CodePoint {
    char32_t value;
    std::size_t length; // bytes consumed; invalid sequences consume 1 byte
};

/// Decodes the code point starting at byte `pos`. Invalid bytes decode to U+FFFD.
CodePoint decode(std::string_view text, std::size_t pos) noexcept;

bool is_space(char32_t c) noexcept;
bool is_upper(char32_t c) noexcept;
bool is_digit(char32_t c) noexcept;

} // namespace utf8

} // namespace values_miner
