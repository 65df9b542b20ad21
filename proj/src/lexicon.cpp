#include "values_miner/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "values_miner/error.hpp"
#include "values_miner/text.hpp"

namespace values_miner {

using json = nlohmann::json;

std::string Pattern::str() const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    if (prefix_final) out.push_back('*');
    return out;
}

Pattern Pattern::parse(std::string_view text) {
    auto fail = [&](const std::string& why) {
        throw Error("lexicon", "invalid pattern \"" + std::string(text) + "\": " + why);
    };
    Pattern p;
    std::istringstream words{std::string(text)};
    std::string word;
    std::vector<std::string> raw;
    while (words >> word) raw.push_back(word);
    if (raw.empty()) fail("empty pattern");

    for (std::size_t i = 0; i < raw.size(); ++i) {
        std::string token = raw[i];
        const auto star = token.find('*');
        if (star != std::string::npos) {
            if (i + 1 != raw.size() || star + 1 != token.size()) fail("'*' is only allowed at the end");
            token.pop_back();
            p.prefix_final = true;
            if (token.empty()) fail("'*' needs a non-empty prefix");
        }
        const auto normalized = tokenize_normalize(token);
        if (normalized.size() != 1 || normalized.front() != token) {
            fail("token \"" + token + "\" is not a normalized word token");
        }
        p.tokens.push_back(std::move(token));
    }
    return p;
}

bool Pattern::occurs_in(std::span<const std::string> sentence) const {
    if (tokens.empty() || sentence.size() < tokens.size()) return false;
    for (std::size_t start = 0; start + tokens.size() <= sentence.size(); ++start) {
        bool ok = true;
        for (std::size_t k = 0; k < tokens.size() && ok; ++k) {
            const auto& have = sentence[start + k];
            if (prefix_final && k + 1 == tokens.size()) {
                ok = have.starts_with(tokens[k]);
            } else {
                ok = have == tokens[k];
            }
        }
        if (ok) return true;
    }
    return false;
}

std::size_t LexiconSpec::pattern_count() const {
    std::size_t n = 0;
    for (const auto& v : values) n += v.patterns.size();
    return n;
}

LexiconSpec lexicon_from_json_text(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error("parse", std::string("lexicon file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error("parse", "lexicon file must hold a JSON object");

    LexiconSpec spec;
    for (const auto& [key, entry] : doc.items()) {
        const auto value = parse_value(key);
        if (!value) throw Error("lexicon", "unknown research value \"" + key + "\" in lexicon file");
        if (!entry.is_object()) throw Error("parse", "lexicon entry for \"" + key + "\" must be an object");
        auto& target = spec[*value];
        try {
            target.threshold = entry.value("threshold", 1);
            if (entry.contains("patterns")) {
                target.patterns = entry.at("patterns").get<std::vector<std::string>>();
            }
        } catch (const json::exception& e) {
            throw Error("parse", "malformed lexicon entry for \"" + key + "\": " + e.what());
        }
    }
    return spec;
}

LexiconSpec load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot read lexicon file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return lexicon_from_json_text(buffer.str());
}

std::string lexicon_to_json_text(const LexiconSpec& spec) {
    // Ordered by taxonomy, not alphabetically.
    std::string out = "{\n";
    for (std::size_t i = 0; i < kNumValues; ++i) {
        const auto v = kAllValues[i];
        json entry = {{"threshold", spec[v].threshold}, {"patterns", spec[v].patterns}};
        out += "  " + json(std::string(value_id(v))).dump() + ": " + entry.dump();
        out += (i + 1 < kNumValues) ? ",\n" : "\n";
    }
    out += "}\n";
    return out;
}

void save_lexicon(const LexiconSpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write lexicon file " + path.string());
    out << lexicon_to_json_text(spec);
}

CompiledLexicon CompiledLexicon::compile(const LexiconSpec& spec) {
    CompiledLexicon c;
    c.nodes_.emplace_back();
    for (auto v : kAllValues) {
        const auto& entry = spec[v];
        if (entry.threshold < 1) {
            throw Error("lexicon", "threshold for " + std::string(value_id(v)) + " must be >= 1");
        }
        c.thresholds_[index_of(v)] = entry.threshold;

        std::unordered_set<std::string> seen;
        for (const auto& text : entry.patterns) {
            Pattern p = Pattern::parse(text);
            std::string canonical = p.str();
            if (!seen.insert(canonical).second) {
                throw Error("lexicon", "duplicate pattern \"" + text + "\" under " + std::string(value_id(v)));
            }
            const std::size_t id = c.patterns_.size();

            std::size_t node = 0;
            const std::size_t walk = p.prefix_final ? p.tokens.size() - 1 : p.tokens.size();
            for (std::size_t k = 0; k < walk; ++k) {
                auto it = c.nodes_[node].children.find(p.tokens[k]);
                if (it == c.nodes_[node].children.end()) {
                    c.nodes_.emplace_back();
                    it = c.nodes_[node].children.emplace(p.tokens[k], c.nodes_.size() - 1).first;
                }
                node = it->second;
            }
            if (p.prefix_final) {
                c.nodes_[node].prefix_ends.emplace_back(p.tokens.back(), id);
            } else {
                c.nodes_[node].exact_ends.push_back(id);
            }

            c.patterns_.push_back(std::move(p));
            c.texts_.push_back(std::move(canonical));
            c.owners_.push_back(v);
        }
    }
    return c;
}

std::vector<std::size_t> CompiledLexicon::match(std::span<const std::string> tokens) const {
    std::vector<std::size_t> hits;
    if (patterns_.empty()) return hits;
    for (std::size_t start = 0; start < tokens.size(); ++start) {
        std::size_t node = 0;
        for (std::size_t j = start; j < tokens.size(); ++j) {
            const Node& here = nodes_[node];
            for (const auto& [prefix, id] : here.prefix_ends) {
                if (tokens[j].starts_with(prefix)) hits.push_back(id);
            }
            const auto it = here.children.find(tokens[j]);
            if (it == here.children.end()) break;
            node = it->second;
            const Node& next = nodes_[node];
            hits.insert(hits.end(), next.exact_ends.begin(), next.exact_ends.end());
        }
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    return hits;
}

SentenceClassification CompiledLexicon::classify_tokens(std::span<const std::string> tokens) const {
    SentenceClassification result;
    for (const std::size_t id : match(tokens)) {
        result.matches[index_of(owners_[id])].push_back(texts_[id]);
    }
    for (auto v : kAllValues) {
        const auto distinct = result.matches[index_of(v)].size();
        result.labels.set(v, distinct >= static_cast<std::size_t>(thresholds_[index_of(v)]));
    }
    return result;
}

SentenceClassification classify_sentence(const CompiledLexicon& lexicon, std::string_view sentence) {
    const auto tokens = tokenize_normalize(sentence);
    return lexicon.classify_tokens(tokens);
}

AbstractClassification classify_abstract(const CompiledLexicon& lexicon, std::string_view abstract,
                                         const Segmenter& segmenter) {
    AbstractClassification result;
    for (const auto& span : segmenter.segment(abstract)) {
        auto sentence = classify_sentence(lexicon, span.text);
        result.labels |= sentence.labels;
        result.sentences.push_back(std::move(sentence));
    }
    return result;
}

} // namespace values_miner
