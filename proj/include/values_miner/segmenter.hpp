#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace values_miner {

struct SentenceSpan {
    std::size_t start = 0; // byte offset, inclusive
    std::size_t end = 0;   // byte offset, exclusive
    std::string text;

    friend bool operator==(const SentenceSpan&, const SentenceSpan&) = default;
};

// Rule-based sentence splitter for English abstracts.
//
// A boundary is placed after a run of '.', '?' or '!' (plus any closing
// quotes) when it is followed by whitespace and then an uppercase letter or a
// digit. No boundary is placed:
//  - after a period that ends a listed abbreviation ("et al.", "e.g.", ...),
//  - while a '(' or '[' opened in the current sentence is still unclosed.
// Decimal points never qualify because they are not followed by whitespace.
//
// Spans are trimmed; the bytes between consecutive spans are whitespace only.
class Segmenter {
public:
    /// Uses the built-in abbreviation list.
    Segmenter();
    explicit Segmenter(std::vector<std::string> abbreviations);

    /// Reads one abbreviation per line; '#' starts a comment.
    static Segmenter from_file(const std::filesystem::path& path);

    static const std::vector<std::string>& default_abbreviations();

    std::vector<SentenceSpan> segment(std::string_view text) const;

    const std::vector<std::string>& abbreviations() const noexcept { return abbreviations_; }

private:
    bool ends_with_abbreviation(std::string_view sentence_prefix) const;

    std::vector<std::string> abbreviations_;
};

} // namespace values_miner
