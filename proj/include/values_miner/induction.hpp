#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "values_miner/annotations.hpp"
#include "values_miner/lexicon.hpp"
#include "values_miner/taxonomy.hpp"

namespace values_miner {

struct InductionParams {
    std::size_t n_max = 3;     // longest n-gram considered
    std::size_t min_count = 2; // sentences containing the n-gram, both classes together
    std::vector<std::size_t> k_grid{1, 2, 3, 5, 10, 20, 30, 50, 75, 100, 150, 200};
    std::vector<int> threshold_grid{1};
    double alpha0 = 1.0;
    // Also count the absent cells in the variance:
    // 1/(y+a) + 1/(n+a0-y-a) + 1/(y'+a) + 1/(n'+a0-y'-a). The two-term default
    // lets tokens present in most sentences of both classes outrank rare,
    // clean cues.
    bool full_variance = false;
};

struct ScoredPattern {
    std::string pattern;
    std::size_t positive = 0; // positive sentences containing it
    std::size_t negative = 0;
    double delta = 0.0;
    double z = 0.0;
};

/// Candidate n-grams for one value, scored by weighted log-odds (positive vs
/// negative sentences, presence counts), keeping z > 0, sorted by z
/// descending then pattern ascending.
std::vector<ScoredPattern> rank_patterns(std::span<const std::vector<std::string>> tokenized,
                                         const std::vector<bool>& positive, const InductionParams& params);

struct ValueInduction {
    std::vector<ScoredPattern> ranked;
    std::size_t chosen_k = 0;
    int chosen_threshold = 1;
    double tuning_f1 = 0.0;
};

struct InductionResult {
    LexiconSpec spec;
    std::array<ValueInduction, kNumValues> per_value;
    std::vector<std::string> warnings;
};

/// Builds a lexicon from train instances, tuning K (and the threshold) per
/// value for F1 on the validation instances; ties go to the smaller K, then
/// the smaller threshold. Seed patterns are always kept and tuned alongside.
/// A value without positive train sentences gets an empty lexicon and a
/// warning. With no validation data the train split is used for tuning.
InductionResult induce_lexicon(std::span<const AnnotatedInstance> train,
                               std::span<const AnnotatedInstance> validation, const InductionParams& params,
                               const LexiconSpec* seed = nullptr);

} // namespace values_miner
