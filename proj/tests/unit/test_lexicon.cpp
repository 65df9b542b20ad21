#include <doctest.h>

#include <random>

#include "../support.hpp"
#include "values_miner/error.hpp"
#include "values_miner/lexicon.hpp"
#include "values_miner/text.hpp"

using namespace values_miner;

namespace {

LexiconSpec spec_of(std::initializer_list<std::pair<ResearchValue, std::vector<std::string>>> entries) {
    LexiconSpec spec;
    for (const auto& [v, p] : entries) spec[v].patterns = p;
    return spec;
}

ValueLabelVector labels_of(const LexiconSpec& spec, const std::string& s) {
    return classify_sentence(CompiledLexicon::compile(spec), s).labels;
}

} // namespace

TEST_CASE("pattern parsing") {
    CHECK(Pattern::parse("propose a").tokens == std::vector<std::string>{"propose", "a"});
    CHECK(Pattern::parse("efficien*").prefix_final);
    CHECK(Pattern::parse("state-of-the-art").str() == "state-of-the-art");
    CHECK_THROWS_AS(Pattern::parse(""), Error);
    CHECK_THROWS_AS(Pattern::parse("*"), Error);
    CHECK_THROWS_AS(Pattern::parse("eff* method"), Error);
    CHECK_THROWS_AS(Pattern::parse("Novel"), Error);
    CHECK_THROWS_AS(Pattern::parse("novel,"), Error);
}

TEST_CASE("compile") {
    const auto empty = CompiledLexicon::compile(LexiconSpec{});
    CHECK(empty.size() == 0);
    CHECK(empty.match(std::vector<std::string>{"a", "novel", "idea"}).empty());

    const auto one = CompiledLexicon::compile(spec_of({{ResearchValue::Novelty, {"novel"}}}));
    CHECK(one.match(std::vector<std::string>{"a", "novel", "idea"}).size() == 1);

    CHECK_THROWS_AS(CompiledLexicon::compile(spec_of({{ResearchValue::Novelty, {"novel", "novel"}}})), Error);
    LexiconSpec bad;
    bad[ResearchValue::Novelty].threshold = 0;
    CHECK_THROWS_AS(CompiledLexicon::compile(bad), Error);
}

TEST_CASE("classify_sentence") {
    const auto spec = spec_of({{ResearchValue::Novelty, {"novel"}}, {ResearchValue::Efficiency, {"efficient*"}}});
    const auto l = labels_of(spec, "We propose a novel and efficient method");
    CHECK(l[ResearchValue::Novelty]);
    CHECK(l[ResearchValue::Efficiency]);
    CHECK(l.count() == 2);

    CHECK_FALSE(labels_of(spec, "a novella about systems")[ResearchValue::Novelty]);

    auto two = spec;
    two[ResearchValue::Novelty].threshold = 2;
    CHECK_FALSE(labels_of(two, "A novel idea")[ResearchValue::Novelty]);
    two[ResearchValue::Novelty].patterns.push_back("idea");
    CHECK(labels_of(two, "A novel idea")[ResearchValue::Novelty]);
    // one pattern repeated is still a single distinct match
    CHECK_FALSE(labels_of(two, "novel novel novel")[ResearchValue::Novelty]);
}

TEST_CASE("classify_abstract ORs sentences") {
    const auto lex = CompiledLexicon::compile(
        spec_of({{ResearchValue::Novelty, {"novel"}}, {ResearchValue::Efficiency, {"fast"}}}));
    CHECK(classify_abstract(lex, "Nothing here. Or here.").labels.none());
    const auto both = classify_abstract(lex, "A novel idea. It is fast.");
    CHECK(both.sentences.size() == 2);
    CHECK(both.labels[ResearchValue::Novelty]);
    CHECK(both.labels[ResearchValue::Efficiency]);
    CHECK(classify_abstract(lex, "A novel idea.").labels == classify_sentence(lex, "A novel idea.").labels);
}

TEST_CASE("lexicon JSON round trip") {
    auto spec = spec_of({{ResearchValue::Usability, {"easy to use", "usab*"}}});
    spec[ResearchValue::Usability].threshold = 2;
    const auto text = lexicon_to_json_text(spec);
    const auto back = lexicon_from_json_text(text);
    CHECK(back[ResearchValue::Usability].patterns == spec[ResearchValue::Usability].patterns);
    CHECK(back[ResearchValue::Usability].threshold == 2);
    CHECK(lexicon_to_json_text(back) == text);
    CHECK_THROWS_AS(lexicon_from_json_text("{\"nonsense\": {}}"), Error);
    CHECK_THROWS_AS(lexicon_from_json_text("[1,2"), Error);
}

namespace {

const std::vector<std::string> kVocab = {"eff", "efficient", "efficiency", "novel", "nov", "a", "the",
                                         "method", "fast", "faster", "state-of-the-art", "we"};

std::pair<LexiconSpec, std::vector<std::vector<std::string>>> random_case(std::mt19937_64& rng) {
    LexiconSpec spec;
    for (auto v : kAllValues) {
        const std::size_t n = rng() % 4;
        for (std::size_t i = 0; i < n; ++i) {
            std::string p;
            const std::size_t len = 1 + rng() % 3;
            for (std::size_t k = 0; k < len; ++k) p += (k ? " " : "") + kVocab[rng() % kVocab.size()];
            if (rng() % 3 == 0) p += "*";
            auto& list = spec[v].patterns;
            if (std::find(list.begin(), list.end(), p) == list.end()) list.push_back(p);
        }
        spec[v].threshold = 1 + int(rng() % 2);
    }
    std::vector<std::vector<std::string>> sentences;
    for (int i = 0; i < 5; ++i) {
        std::vector<std::string> toks(rng() % 15);
        for (auto& t : toks) t = kVocab[rng() % kVocab.size()];
        sentences.push_back(std::move(toks));
    }
    return {spec, sentences};
}

} // namespace

TEST_CASE("compiled matcher agrees with a per-pattern scan") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 200; ++round) {
        const auto [spec, sentences] = random_case(rng);
        const auto lex = CompiledLexicon::compile(spec);
        for (const auto& toks : sentences) {
            std::vector<std::size_t> expected;
            for (std::size_t id = 0; id < lex.size(); ++id) {
                const auto& p = lex.pattern(id);
                if (vm_test::naive_occurs(p.tokens, p.prefix_final, toks)) expected.push_back(id);
            }
            REQUIRE(lex.match(toks) == expected);
        }
    }
}

TEST_CASE("adding a pattern never clears a flag at threshold 1") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 100; ++round) {
        auto [spec, sentences] = random_case(rng);
        for (auto v : kAllValues) spec[v].threshold = 1;
        const auto before = CompiledLexicon::compile(spec);
        auto grown = spec;
        const auto v = kAllValues[rng() % kNumValues];
        const std::string extra = "zz" + std::to_string(round);
        grown[v].patterns.push_back(rng() % 2 ? extra : "method");
        if (std::count(grown[v].patterns.begin(), grown[v].patterns.end(), grown[v].patterns.back()) > 1) continue;
        const auto after = CompiledLexicon::compile(grown);
        for (const auto& toks : sentences) {
            const auto a = before.classify_tokens(toks).labels;
            const auto b = after.classify_tokens(toks).labels;
            for (auto w : kAllValues) CHECK((!a[w] || b[w]));
        }
    }
}

TEST_CASE("classification ignores case and is per value") {
    const auto spec = spec_of({{ResearchValue::Novelty, {"novel"}}, {ResearchValue::Openness, {"open-source"}}});
    CHECK(labels_of(spec, "A NOVEL, Open-Source tool") == labels_of(spec, "a novel, open-source tool"));
    auto only_novel = spec;
    only_novel[ResearchValue::Openness].patterns.clear();
    CHECK(labels_of(spec, "A novel tool")[ResearchValue::Novelty] ==
          labels_of(only_novel, "A novel tool")[ResearchValue::Novelty]);
}

TEST_CASE("surrounding whitespace does not matter") {
    const auto spec = spec_of({{ResearchValue::Novelty, {"novel idea"}}});
    CHECK(labels_of(spec, "  \tA novel idea \n") == labels_of(spec, "A novel idea"));
}

TEST_CASE("abstract flags equal the OR of independently classified sentences") {
    std::mt19937_64 rng(12);
    const Segmenter seg;
    for (int round = 0; round < 100; ++round) {
        auto [spec, sentences] = random_case(rng);
        const auto lex = CompiledLexicon::compile(spec);
        std::string abstract;
        for (const auto& toks : sentences) {
            std::string s = "Start";
            for (const auto& t : toks) s += " " + t;
            abstract += s + ". ";
        }
        ValueLabelVector expected;
        for (const auto& span : seg.segment(abstract)) expected |= classify_sentence(lex, span.text).labels;
        CHECK(classify_abstract(lex, abstract, seg).labels == expected);
    }
}

TEST_CASE("editing one value's lexicon leaves the others alone") {
    std::mt19937_64 rng(13);
    for (int round = 0; round < 100; ++round) {
        auto [spec, sentences] = random_case(rng);
        auto edited = spec;
        const auto v = kAllValues[rng() % kNumValues];
        edited[v].patterns = {"method", "the fast*"};
        edited[v].threshold = 1;
        const auto a = CompiledLexicon::compile(spec), b = CompiledLexicon::compile(edited);
        for (const auto& toks : sentences) {
            const auto la = a.classify_tokens(toks).labels, lb = b.classify_tokens(toks).labels;
            for (auto w : kAllValues)
                if (w != v) CHECK(la[w] == lb[w]);
        }
    }
}
