#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "values_miner/segmenter.hpp"
#include "values_miner/taxonomy.hpp"

namespace values_miner {

// A lexicon pattern: a contiguous token sequence. When `prefix_final` is set
// the last token matches any token that starts with it ("efficien*").
struct Pattern {
    std::vector<std::string> tokens;
    bool prefix_final = false;

    /// Canonical text form: tokens joined by single spaces, '*' appended when
    /// the final token is a prefix.
    std::string str() const;

    /// Parses and validates a pattern string. Throws Error("lexicon", ...)
    /// naming the pattern when it is empty, contains a token that would not
    /// survive tokenize_normalize unchanged, or places '*' anywhere but at the
    /// end of the final token.
    static Pattern parse(std::string_view text);

    /// Reference semantics, used by tests and as the definition the compiled
    /// matcher must agree with.
    bool occurs_in(std::span<const std::string> tokens) const;
};

struct ValueLexicon {
    int threshold = 1;
    std::vector<std::string> patterns;
};

struct LexiconSpec {
    std::array<ValueLexicon, kNumValues> values;

    ValueLexicon& operator[](ResearchValue v) { return values[index_of(v)]; }
    const ValueLexicon& operator[](ResearchValue v) const { return values[index_of(v)]; }

    std::size_t pattern_count() const;
};

/// Lexicon file: JSON object mapping each value id to
/// {"threshold": int, "patterns": [string, ...]}. Values not present get an
/// empty pattern list and threshold 1.
LexiconSpec load_lexicon(const std::filesystem::path& path);
LexiconSpec lexicon_from_json_text(std::string_view json_text);
std::string lexicon_to_json_text(const LexiconSpec& spec);
void save_lexicon(const LexiconSpec& spec, const std::filesystem::path& path);

using MatchList = std::array<std::vector<std::string>, kNumValues>;

struct SentenceClassification {
    ValueLabelVector labels;
    MatchList matches; // distinct matched patterns per value, in lexicon order
};

// Immutable token trie over every pattern of every value.
class CompiledLexicon {
public:
    /// Validates every pattern (see Pattern::parse), rejects duplicates within
    /// a value and thresholds below 1.
    static CompiledLexicon compile(const LexiconSpec& spec);

    /// Ids of the distinct patterns occurring in the token list, ascending.
    std::vector<std::size_t> match(std::span<const std::string> tokens) const;

    std::size_t size() const noexcept { return patterns_.size(); }
    ResearchValue value_of(std::size_t id) const { return owners_[id]; }
    const std::string& pattern_text(std::size_t id) const { return texts_[id]; }
    const Pattern& pattern(std::size_t id) const { return patterns_[id]; }
    int threshold(ResearchValue v) const { return thresholds_[index_of(v)]; }

    SentenceClassification classify_tokens(std::span<const std::string> tokens) const;

private:
    struct Node {
        std::unordered_map<std::string, std::size_t> children;
        std::vector<std::size_t> exact_ends;                        // patterns ending here
        std::vector<std::pair<std::string, std::size_t>> prefix_ends; // (prefix, id) for the next token
    };

    std::vector<Node> nodes_;
    std::vector<Pattern> patterns_;
    std::vector<std::string> texts_;
    std::vector<ResearchValue> owners_;
    std::array<int, kNumValues> thresholds_{};
};

SentenceClassification classify_sentence(const CompiledLexicon& lexicon, std::string_view sentence);

struct AbstractClassification {
    ValueLabelVector labels;                        // OR over sentences
    std::vector<SentenceClassification> sentences;  // one per segmented sentence
};

AbstractClassification classify_abstract(const CompiledLexicon& lexicon, std::string_view abstract,
                                         const Segmenter& segmenter = Segmenter());

} // namespace values_miner
