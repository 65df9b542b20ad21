#include "values_miner/induction.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "values_miner/analytics.hpp"
#include "values_miner/error.hpp"
#include "values_miner/metrics.hpp"
#include "values_miner/text.hpp"

namespace values_miner {

namespace {

std::vector<std::string> distinct_ngrams(const std::vector<std::string>& tokens, std::size_t n_max) {
    std::vector<std::string> grams;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::string gram;
        for (std::size_t n = 1; n <= n_max && i + n <= tokens.size(); ++n) {
            if (n > 1) gram.push_back(' ');
            gram += tokens[i + n - 1];
            grams.push_back(gram);
        }
    }
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    return grams;
}

std::vector<std::vector<std::string>> tokenize_all(std::span<const AnnotatedInstance> instances) {
    std::vector<std::vector<std::string>> out;
    out.reserve(instances.size());
    for (const auto& inst : instances) out.push_back(tokenize_normalize(inst.sentence_text));
    return out;
}

} // namespace

std::vector<ScoredPattern> rank_patterns(std::span<const std::vector<std::string>> tokenized,
                                         const std::vector<bool>& positive, const InductionParams& params) {
    if (tokenized.size() != positive.size()) throw Error("usage", "token lists and labels differ in length");
    if (params.n_max == 0) throw Error("config", "n_max must be at least 1");

    std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> counts;
    std::size_t pos_total = 0;
    for (std::size_t i = 0; i < tokenized.size(); ++i) {
        pos_total += positive[i] ? 1 : 0;
        for (auto& gram : distinct_ngrams(tokenized[i], params.n_max)) {
            auto& c = counts[std::move(gram)];
            (positive[i] ? c.first : c.second) += 1;
        }
    }
    const auto neg_total = tokenized.size() - pos_total;

    std::vector<ScoredPattern> ranked;
    for (const auto& [gram, c] : counts) {
        if (c.first + c.second < params.min_count) continue;
        const double y = static_cast<double>(c.first), n = static_cast<double>(pos_total);
        const double y2 = static_cast<double>(c.second), n2 = static_cast<double>(neg_total);
        auto score = weighted_log_odds(y, n, y2, n2, params.alpha0);
        if (params.full_variance && score.variance > 0) {
            const double a = params.alpha0 * (y + y2) / (n + n2);
            score.variance += 1.0 / (n + params.alpha0 - y - a) + 1.0 / (n2 + params.alpha0 - y2 - a);
            score.z = score.delta / std::sqrt(score.variance);
        }
        if (!(score.z > 0)) continue;
        ranked.push_back({gram, c.first, c.second, score.delta, score.z});
    }
    std::sort(ranked.begin(), ranked.end(), [](const ScoredPattern& a, const ScoredPattern& b) {
        if (a.z != b.z) return a.z > b.z;
        return a.pattern < b.pattern;
    });
    return ranked;
}

InductionResult induce_lexicon(std::span<const AnnotatedInstance> train, std::span<const AnnotatedInstance> validation,
                               const InductionParams& params, const LexiconSpec* seed) {
    if (params.k_grid.empty() || params.threshold_grid.empty()) throw Error("config", "tuning grids must be non-empty");
    for (int t : params.threshold_grid) {
        if (t < 1) throw Error("config", "thresholds must be >= 1");
    }

    InductionResult result;
    const auto train_tokens = tokenize_all(train);
    const bool tune_on_train = validation.empty();
    if (tune_on_train && !train.empty()) result.warnings.push_back("no validation instances; tuning K on train");
    const auto tuning = tune_on_train ? train : validation;
    const auto tuning_tokens = tune_on_train ? train_tokens : tokenize_all(validation);

    std::vector<std::size_t> grid(params.k_grid.begin(), params.k_grid.end());
    std::sort(grid.begin(), grid.end());

    for (auto v : kAllValues) {
        auto& out = result.per_value[index_of(v)];
        std::vector<std::string> seeds;
        if (seed) {
            for (const auto& p : (*seed)[v].patterns) seeds.push_back(Pattern::parse(p).str());
        }

        std::vector<bool> labels_vec;
        std::size_t positives = 0;
        for (const auto& inst : train) {
            labels_vec.push_back(inst.gold[v]);
            positives += inst.gold[v] ? 1 : 0;
        }
        if (positives == 0) {
            result.warnings.push_back("no positive train sentences for " + std::string(value_id(v)) +
                                      "; lexicon left empty");
            result.spec[v].patterns = seeds;
            continue;
        }
        out.ranked = rank_patterns(train_tokens, labels_vec, params);

        // Candidate lexicon: seeds first, then ranked patterns not already seeded.
        const std::set<std::string> seed_set(seeds.begin(), seeds.end());
        std::vector<std::string> ordered = seeds;
        std::vector<std::size_t> rank_of; // ordered index -> rank (seeds: none)
        const std::size_t k_max = std::min(grid.back(), out.ranked.size());
        for (std::size_t r = 0; r < out.ranked.size() && r < k_max; ++r) {
            if (seed_set.contains(out.ranked[r].pattern)) continue;
            ordered.push_back(out.ranked[r].pattern);
            rank_of.push_back(r);
        }

        LexiconSpec candidate;
        candidate[v].patterns = ordered;
        const auto compiled = CompiledLexicon::compile(candidate);

        // Per tuning sentence: how many seeds matched, and matched ranks.
        std::vector<std::size_t> seed_hits(tuning.size(), 0);
        std::vector<std::vector<std::size_t>> rank_hits(tuning.size());
        for (std::size_t i = 0; i < tuning.size(); ++i) {
            for (const std::size_t id : compiled.match(tuning_tokens[i])) {
                if (id < seeds.size()) {
                    ++seed_hits[i];
                } else {
                    rank_hits[i].push_back(rank_of[id - seeds.size()]);
                }
            }
        }

        std::vector<std::size_t> ks;
        for (const auto k : grid) ks.push_back(std::min(k, k_max));
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

        double best_f1 = -1.0;
        for (const auto k : ks) {
            for (const int t : params.threshold_grid) {
                ConfusionCounts c;
                for (std::size_t i = 0; i < tuning.size(); ++i) {
                    std::size_t hits = seed_hits[i];
                    for (const auto r : rank_hits[i]) hits += r < k ? 1 : 0;
                    const bool pred = hits >= static_cast<std::size_t>(t);
                    const bool gold = tuning[i].gold[v];
                    if (pred && gold) {
                        ++c.tp;
                    } else if (pred) {
                        ++c.fp;
                    } else if (gold) {
                        ++c.fn;
                    } else {
                        ++c.tn;
                    }
                }
                const double f1 = metrics_from_counts(v, c).f1;
                if (f1 > best_f1) {
                    best_f1 = f1;
                    out.chosen_k = k;
                    out.chosen_threshold = t;
                }
            }
        }
        out.tuning_f1 = std::max(best_f1, 0.0);

        auto& lex = result.spec[v];
        lex.threshold = out.chosen_threshold;
        lex.patterns = seeds;
        for (std::size_t r = 0; r < out.chosen_k; ++r) {
            if (!seed_set.contains(out.ranked[r].pattern)) lex.patterns.push_back(out.ranked[r].pattern);
        }
    }
    return result;
}

} // namespace values_miner
