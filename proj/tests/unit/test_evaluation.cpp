#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "../support.hpp"
#include "values_miner/annotations.hpp"
#include "values_miner/error.hpp"
#include "values_miner/metrics.hpp"

using namespace values_miner;

TEST_CASE("metrics from counts") {
    const auto m = metrics_from_counts(ResearchValue::Novelty, {2, 1, 1, 6});
    CHECK(m.precision == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(m.recall == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(m.f1 == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(m.accuracy == 0.8);

    const auto perfect = metrics_from_counts(ResearchValue::Novelty, {5, 0, 0, 5});
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);
    CHECK(perfect.accuracy == 1.0);

    const auto none = metrics_from_counts(ResearchValue::Novelty, {0, 0, 4, 6});
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);
    CHECK(none.precision == 0.0);
    CHECK(none.precision_undefined);
    CHECK_FALSE(none.recall_undefined);
}

TEST_CASE("evaluate counts and length check") {
    std::vector<ValueLabelVector> pred(4), gold(4);
    pred[0].set(ResearchValue::Novelty);
    gold[0].set(ResearchValue::Novelty);
    pred[1].set(ResearchValue::Novelty);
    gold[2].set(ResearchValue::Novelty);
    const auto m = evaluate(pred, gold, ResearchValue::Novelty);
    CHECK(m.counts == ConfusionCounts{1, 1, 1, 1});
    gold.pop_back();
    CHECK_THROWS_AS(evaluate(pred, gold, ResearchValue::Novelty), Error);
}

TEST_CASE("metrics match integer oracle on random matrices") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const ConfusionCounts c{rng() % 50, rng() % 50, rng() % 50, rng() % 50};
        if (c.total() == 0) continue;
        const auto m = metrics_from_counts(ResearchValue::Performance, c);
        const auto o = vm_test::oracle_metrics(c.tp, c.fp, c.fn, c.tn);
        CHECK(std::abs(m.precision - o.precision) <= 1e-12);
        CHECK(std::abs(m.recall - o.recall) <= 1e-12);
        CHECK(std::abs(m.f1 - o.f1) <= 1e-12);
        CHECK(std::abs(m.accuracy - o.accuracy) <= 1e-12);
        CHECK(m.f1 >= 0.0);
        CHECK(m.f1 <= 1.0);
    }
}

TEST_CASE("macro F1 averages requested values") {
    std::vector<ValueLabelVector> pred(2), gold(2);
    pred[0].set(ResearchValue::Novelty);
    gold[0].set(ResearchValue::Novelty);
    gold[1].set(ResearchValue::Society);
    const std::vector<ResearchValue> two = {ResearchValue::Novelty, ResearchValue::Society};
    const auto r = evaluate_all(pred, gold, two);
    CHECK(r.values.size() == 2);
    CHECK(r.macro_f1 == 0.5);
    CHECK(r.instances == 2);
    const auto text = metrics_to_json_text(r);
    CHECK(text.find("\"macro_f1\"") != std::string::npos);
    CHECK(text == metrics_to_json_text(evaluate_all(pred, gold, two)));
}

TEST_CASE("split sizes") {
    CHECK(split_sizes(1032, {0.4, 0.3, 0.3}) == SplitSizes{412, 309, 311});
    CHECK(split_sizes(10, {0.4, 0.3, 0.3}) == SplitSizes{4, 3, 3});
    CHECK(split_sizes(0, {0.4, 0.3, 0.3}) == SplitSizes{0, 0, 0});
    CHECK(split_sizes(1, {0.4, 0.3, 0.3}) == SplitSizes{0, 0, 1});
    CHECK_THROWS_AS(split_sizes(10, {0.5, 0.5, 0.5}), Error);
}

namespace {
std::vector<AnnotatedInstance> plain(std::size_t n) {
    std::vector<AnnotatedInstance> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i].paper_id = "p" + std::to_string(i);
        v[i].sentence_text = "s" + std::to_string(i);
        if (i % 4 == 0) v[i].gold.set(ResearchValue::Integrity);
    }
    return v;
}
} // namespace

TEST_CASE("assign_splits: partition, determinism, preservation") {
    auto a = plain(103), b = plain(103);
    SplitOptions opt;
    opt.seed = 9;
    CHECK(assign_splits(a, opt));
    assign_splits(b, opt);
    std::size_t counts[3] = {};
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].split);
        CHECK(a[i].split == b[i].split);
        ++counts[static_cast<int>(*a[i].split)];
    }
    CHECK(counts[0] == 41);
    CHECK(counts[1] == 30);
    CHECK(counts[2] == 32);

    auto kept = a;
    opt.seed = 10;
    CHECK_FALSE(assign_splits(kept, opt));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(kept[i].split == a[i].split);
    opt.resplit = true;
    CHECK(assign_splits(kept, opt));
    bool changed = false;
    for (std::size_t i = 0; i < a.size(); ++i) changed |= kept[i].split != a[i].split;
    CHECK(changed);
}

TEST_CASE("assign_splits: stratified floors per class") {
    auto a = plain(100); // 25 positive, 75 negative
    SplitOptions opt;
    opt.stratify = ResearchValue::Integrity;
    assign_splits(a, opt);
    std::size_t pos_train = 0, neg_train = 0;
    for (const auto& i : a) {
        if (i.split == Split::Train) (i.gold[ResearchValue::Integrity] ? pos_train : neg_train)++;
    }
    CHECK(pos_train == 10);
    CHECK(neg_train == 30);
}

TEST_CASE("annotation table I/O") {
    std::istringstream empty("sentence_text,paper_id,performance,novelty,efficiency,generalizability,openness,"
                             "simplicity,understanding,integrity,society,usability\n");
    CHECK(read_annotations(empty).empty());

    std::istringstream bad("paper_id,sentence_text,performance,novelty,efficiency,generalizability,openness,"
                           "simplicity,understanding,integrity,society,usability\n"
                           "p1,\"Fine, yes.\",0,0,0,0,0,0,0,0,0,0\n"
                           "p2,Bad.,0,2,0,0,0,0,0,0,0,0\n");
    try {
        read_annotations(bad);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    auto rows = plain(5);
    rows[0].sentence_text = "Has \"quotes\", commas\nand a newline.";
    assign_splits(rows, {});
    std::ostringstream out;
    write_annotations(out, rows);
    std::istringstream in(out.str());
    const auto back = read_annotations(in);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].sentence_text == rows[i].sentence_text);
        CHECK(back[i].gold == rows[i].gold);
        CHECK(back[i].split == rows[i].split);
    }
}

TEST_CASE("metric properties on random label sets") {
    std::mt19937_64 rng(14);
    for (int round = 0; round < 100; ++round) {
        const std::size_t n = 1 + rng() % 40;
        std::vector<ValueLabelVector> pred(n), gold(n);
        for (std::size_t i = 0; i < n; ++i) {
            pred[i].set(ResearchValue::Openness, rng() % 2);
            gold[i].set(ResearchValue::Openness, rng() % 3 == 0);
        }
        const auto m = evaluate(pred, gold, ResearchValue::Openness);
        for (double x : {m.precision, m.recall, m.f1, m.accuracy}) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
        }
        if (m.precision + m.recall > 0) {
            CHECK(m.f1 >= std::min(m.precision, m.recall) - 1e-12);
            CHECK(m.f1 <= std::max(m.precision, m.recall) + 1e-12);
        }

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<ValueLabelVector> p2, g2;
        for (auto i : order) {
            p2.push_back(pred[i]);
            g2.push_back(gold[i]);
        }
        const auto shuffled = evaluate(p2, g2, ResearchValue::Openness);
        CHECK(shuffled.counts == m.counts);
        CHECK(shuffled.f1 == m.f1);

        const auto swapped = evaluate(gold, pred, ResearchValue::Openness);
        CHECK(swapped.counts.fp == m.counts.fn);
        CHECK(swapped.counts.fn == m.counts.fp);
        CHECK(swapped.precision == m.recall);
        CHECK(swapped.recall == m.precision);
        CHECK(swapped.f1 == m.f1);
    }
}
