#pragma once
// Shared by the unit tests and the acceptance runner: independent reference
// implementations (kept deliberately naive) and synthetic data builders.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "values_miner/annotations.hpp"
#include "values_miner/corpus.hpp"
#include "values_miner/lexicon.hpp"
#include "values_miner/taxonomy.hpp"

namespace vm_test {

using namespace values_miner;

// ---- oracles -------------------------------------------------------------

struct Fraction {
    std::uint64_t num = 0, den = 0;
    double value() const { return den == 0 ? 0.0 : double(num) / double(den); }
};

inline Fraction reduced(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return {0, 0};
    const auto g = std::gcd(num, den);
    return {num / (g ? g : 1), den / (g ? g : 1)};
}

struct OracleMetrics {
    double precision, recall, f1, accuracy;
};

// Textbook definitions over exact integer ratios. F1 is taken as the harmonic
// mean of P and R in fraction form: 2PR/(P+R) = 2tp / (2tp + fp + fn).
inline OracleMetrics oracle_metrics(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn) {
    const auto p = reduced(tp, tp + fp);
    const auto r = reduced(tp, tp + fn);
    Fraction f{0, 0};
    if (p.num != 0 && r.num != 0) {
        // 2 (pn/pd)(rn/rd) / (pn/pd + rn/rd) = 2 pn rn / (pn rd + rn pd)
        f = reduced(2 * p.num * r.num, p.num * r.den + r.num * p.den);
    }
    const auto a = reduced(tp + tn, tp + fp + fn + tn);
    return {p.value(), r.value(), f.value(), a.value()};
}

inline int sign(double x) { return (x > 0) - (x < 0); }

inline long long brute_mk_s(const std::vector<double>& x) {
    long long s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) s += sign(x[j] - x[i]);
    return s;
}

inline double brute_sen_slope(const std::vector<int>& t, const std::vector<double>& x) {
    std::vector<double> slopes;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) slopes.push_back((x[j] - x[i]) / double(t[j] - t[i]));
    std::sort(slopes.begin(), slopes.end());
    const auto m = slopes.size();
    return m % 2 ? slopes[m / 2] : (slopes[m / 2 - 1] + slopes[m / 2]) / 2.0;
}

// PMI from probabilities, as the definition reads.
inline double brute_pmi(const std::vector<ValueLabelVector>& labels, std::size_t i, std::size_t j, double eps) {
    double ci = 0, cj = 0, cij = 0;
    for (const auto& l : labels) {
        ci += l.test(i);
        cj += l.test(j);
        cij += l.test(i) && l.test(j);
    }
    const double n = double(labels.size()) + eps;
    const double pij = (cij + eps) / n, pi = (ci + eps) / n, pj = (cj + eps) / n;
    return std::log2(pij / (pi * pj));
}

// Log-odds with informative prior, spelled out step by step.
inline double brute_log_odds_z(double y, double n, double y2, double n2, double alpha0) {
    const long double rate = (long double)(y + y2) / (long double)(n + n2);
    const long double a = alpha0 * rate;
    const long double odds1 = (y + a) / (n + alpha0 - y - a);
    const long double odds2 = (y2 + a) / (n2 + alpha0 - y2 - a);
    const long double d = std::log(odds1) - std::log(odds2);
    const long double var = 1.0L / (y + a) + 1.0L / (y2 + a);
    return double(d / std::sqrt(var));
}

// Per-pattern scan over token positions.
inline bool naive_occurs(const std::vector<std::string>& pattern, bool prefix, const std::vector<std::string>& toks) {
    if (pattern.empty() || pattern.size() > toks.size()) return false;
    for (std::size_t s = 0; s + pattern.size() <= toks.size(); ++s) {
        bool ok = true;
        for (std::size_t k = 0; k < pattern.size() && ok; ++k) {
            const bool last = k + 1 == pattern.size();
            if (last && prefix) ok = toks[s + k].rfind(pattern[k], 0) == 0;
            else ok = toks[s + k] == pattern[k];
        }
        if (ok) return true;
    }
    return false;
}

// ---- synthetic data ------------------------------------------------------

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("vm_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words = {
        "we", "study", "the", "problem", "of", "graph", "data", "model", "results", "show", "that", "our",
        "system", "method", "on", "three", "tasks", "and", "a", "in", "this", "paper", "using", "large",
        "networks", "learning", "analysis", "from", "two", "sets", "experiments", "with", "an", "approach"};
    return words;
}

inline std::string filler_sentence(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
    const auto& w = filler_words();
    const std::size_t len = min_len + rng() % (max_len - min_len + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) {
        std::string word = w[rng() % w.size()];
        if (i == 0) word[0] = char(std::toupper(static_cast<unsigned char>(word[0])));
        s += (i ? " " : "") + word;
    }
    return s + ".";
}

// Every v-positive sentence carries "zebra" at a random position; no
// negative sentence does.
inline std::vector<AnnotatedInstance> zebra_dataset(std::size_t n, ResearchValue v, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<AnnotatedInstance> out;
    for (std::size_t i = 0; i < n; ++i) {
        AnnotatedInstance inst;
        inst.paper_id = "p" + std::to_string(i);
        std::string s = filler_sentence(rng, 5, 12);
        if (i % 3 == 0) {
            s.pop_back();
            auto words = std::vector<std::string>{};
            std::string cur;
            for (char c : s) {
                if (c == ' ') { words.push_back(cur); cur.clear(); }
                else cur += c;
            }
            words.push_back(cur);
            words.insert(words.begin() + 1 + std::ptrdiff_t(rng() % words.size()), "zebra");
            s.clear();
            for (std::size_t k = 0; k < words.size(); ++k) s += (k ? " " : "") + words[k];
            s += ".";
            inst.gold.set(v);
        }
        inst.sentence_text = s;
        out.push_back(std::move(inst));
    }
    return out;
}

inline VenueRegistry synthetic_registry(std::size_t venues) {
    static const FieldGroup groups[] = {FieldGroup::AI, FieldGroup::Systems, FieldGroup::Theory,
                                        FieldGroup::Interdisciplinary};
    VenueRegistry r;
    for (std::size_t i = 0; i < venues; ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "venue%02zu", i);
        r.add(name, "subfield" + std::to_string(i % 32), groups[(i % 32) % 4]);
    }
    return r;
}

// Each venue gets between min_per_venue and min_per_venue + 8 abstracts,
// with every year 2013-2022 covered at least once.
inline std::vector<PaperRecord> synthetic_corpus(const VenueRegistry& registry, std::size_t min_per_venue,
                                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<PaperRecord> out;
    for (const auto& [venue, info] : registry.entries()) {
        const std::size_t count = std::max<std::size_t>(min_per_venue, 10) + rng() % 9;
        for (std::size_t k = 0; k < count; ++k) {
            PaperRecord r;
            r.paper_id = venue + "-" + std::to_string(k);
            r.venue = venue;
            r.subfield = info.subfield;
            r.field_group = info.field_group;
            r.year = k < 10 ? 2013 + int(k) : 2013 + int(rng() % 10);
            const std::size_t sentences = 2 + rng() % 5;
            for (std::size_t s = 0; s < sentences; ++s) r.abstract += (s ? " " : "") + filler_sentence(rng, 4, 14);
            out.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace vm_test
