#include <doctest.h>

#include <random>
#include <sstream>

#include "../support.hpp"
#include "values_miner/analytics.hpp"
#include "values_miner/error.hpp"

using namespace values_miner;

namespace {

LabeledUnit unit(const std::string& group, int year, std::initializer_list<ResearchValue> on) {
    LabeledUnit u;
    static int next = 0;
    u.paper_id = group + std::to_string(year) + "-" + std::to_string(next++);
    u.venue = group;
    u.subfield = group;
    u.year = year;
    for (auto v : on) u.labels.set(v);
    return u;
}

std::vector<YearPoint> series(const std::vector<double>& xs, int first = 2013) {
    std::vector<YearPoint> out;
    for (std::size_t i = 0; i < xs.size(); ++i) out.push_back({first + int(i), xs[i]});
    return out;
}

} // namespace

TEST_CASE("prevalence") {
    std::vector<LabeledUnit> u = {unit("A", 2015, {ResearchValue::Novelty}), unit("A", 2015, {}),
                                  unit("A", 2016, {}), unit("A", 2017, {})};
    LabeledUnit full = unit("B", 2015, {});
    for (auto v : kAllValues) full.labels.set(v);
    u.push_back(full);
    const auto t = prevalence(u, GroupBy::Subfield);
    for (const auto& r : t.rows) {
        if (r.group == "A" && r.value == ResearchValue::Novelty) CHECK(r.proportion == 0.25);
        if (r.group == "B") CHECK(r.proportion == 1.0);
    }
    CHECK(t.groups() == std::vector<std::string>{"A", "B"});

    std::vector<LabeledUnit> y = {unit("A", 2013, {ResearchValue::Society}), unit("A", 2013, {ResearchValue::Society}),
                                  unit("A", 2013, {}), unit("A", 2013, {}), unit("A", 2014, {ResearchValue::Society}),
                                  unit("A", 2014, {}), unit("A", 2009, {ResearchValue::Society})};
    const auto by_year = prevalence(y, GroupBy::Year);
    CHECK(by_year.groups() == std::vector<std::string>{"2013", "2014"});
    for (const auto& r : by_year.rows)
        if (r.value == ResearchValue::Society) CHECK(r.proportion == 0.5);
    CHECK(prevalence(y, GroupBy::Year, AnalysisUnit::Abstract, true).groups().size() == 3);
}

TEST_CASE("weighted log-odds") {
    const auto s = weighted_log_odds(8, 10, 2, 10, 1.0);
    CHECK(std::abs(s.z - vm_test::brute_log_odds_z(8, 10, 2, 10, 1.0)) <= 1e-9);
    CHECK(s.z > 0);
    const auto same = weighted_log_odds(3, 10, 6, 20, 1.0);
    CHECK(same.delta == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(same.z == doctest::Approx(0.0).epsilon(1e-15));
    const auto none = weighted_log_odds(0, 10, 0, 10, 1.0);
    CHECK(none.z == 0.0);
    CHECK(weighted_log_odds(2, 10, 8, 10, 1.0).z == doctest::Approx(-s.z).epsilon(1e-12));

    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        const double n = 1 + double(rng() % 50), n2 = 1 + double(rng() % 50);
        const double y = double(rng() % (std::uint64_t(n) + 1)), y2 = double(rng() % (std::uint64_t(n2) + 1));
        if (y + y2 == 0 || y + y2 == n + n2) continue;
        CHECK(std::abs(weighted_log_odds(y, n, y2, n2, 1.0).z - vm_test::brute_log_odds_z(y, n, y2, n2, 1.0)) <= 1e-9);
        CHECK(weighted_log_odds(y, n, y2, n2, 1.0).z ==
              doctest::Approx(-weighted_log_odds(y2, n2, y, n, 1.0).z).epsilon(1e-12));
    }
}

TEST_CASE("distinctiveness ranks and swaps") {
    std::vector<LabeledUnit> u;
    for (int i = 0; i < 10; ++i) u.push_back(unit("G", 2015, i < 8 ? std::initializer_list<ResearchValue>{ResearchValue::Novelty} : std::initializer_list<ResearchValue>{}));
    for (int i = 0; i < 10; ++i) u.push_back(unit("H", 2015, i < 2 ? std::initializer_list<ResearchValue>{ResearchValue::Novelty} : std::initializer_list<ResearchValue>{}));
    const auto g = distinctiveness(u, GroupBy::Subfield, "G");
    REQUIRE(g.size() == kNumValues);
    CHECK(g[0].value == ResearchValue::Novelty);
    CHECK(std::abs(g[0].z - vm_test::brute_log_odds_z(8, 10, 2, 10, 1.0)) <= 1e-9);
    const auto h = distinctiveness(u, GroupBy::Subfield, "H");
    for (const auto& a : g)
        for (const auto& b : h)
            if (a.value == b.value) CHECK(a.z == doctest::Approx(-b.z).epsilon(1e-12));
    CHECK_THROWS_AS(distinctiveness(u, GroupBy::Subfield, "missing"), Error);
}

TEST_CASE("trend: goldens") {
    const auto up = trend(series({1, 2, 3, 4, 5}));
    CHECK(up.mk_s == 10);
    CHECK(up.sen_slope == 1.0);
    CHECK(up.direction == TrendDirection::Increasing);

    const auto flat = trend(series({3, 3, 3, 3, 3}));
    CHECK(flat.mk_s == 0);
    CHECK(flat.direction == TrendDirection::None);

    const auto down = trend(series({5, 4, 3, 2, 1}));
    CHECK(down.mk_s == -10);
    CHECK(down.sen_slope == -1.0);
    CHECK(down.direction == TrendDirection::Decreasing);

    CHECK_THROWS_AS(trend(series({1, 2})), Error);
    CHECK_THROWS_AS(trend(std::vector<YearPoint>{{2014, 1}, {2013, 2}, {2015, 3}}), Error);
}

TEST_CASE("trend: brute-force agreement and invariances") {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 300; ++round) {
        const std::size_t n = 3 + rng() % 10;
        std::vector<double> xs(n);
        std::vector<int> years(n);
        int y = 2013;
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = double(rng() % 6) / 4.0; // plenty of ties
            years[i] = y;
            y += 1 + int(rng() % 2);
        }
        std::vector<YearPoint> pts;
        for (std::size_t i = 0; i < n; ++i) pts.push_back({years[i], xs[i]});
        const auto r = trend(pts);
        CHECK(r.mk_s == vm_test::brute_mk_s(xs));
        CHECK(r.sen_slope == vm_test::brute_sen_slope(years, xs));

        std::vector<YearPoint> cubed = pts;
        for (auto& p : cubed) p.value = p.value * p.value * p.value + 7;
        CHECK(trend(cubed).mk_s == r.mk_s);

        std::vector<YearPoint> rev = pts;
        for (std::size_t i = 0; i < n; ++i) rev[i].value = pts[n - 1 - i].value;
        const auto rr = trend(rev);
        CHECK(rr.mk_s == -r.mk_s);
        if (r.direction == TrendDirection::Increasing) CHECK(rr.direction == TrendDirection::Decreasing);
        if (r.direction == TrendDirection::None) CHECK(rr.direction == TrendDirection::None);
    }
}

TEST_CASE("trend variance has the tie correction") {
    // ties {1,1} and {2,2,2}: n=5 -> [5*4*15 - (2*1*9) - (3*2*11)] / 18 = 216/18
    const auto r = trend(series({1, 1, 2, 2, 2}));
    CHECK(r.variance == doctest::Approx(216.0 / 18.0).epsilon(1e-12));
}

TEST_CASE("pmi: hand examples") {
    std::vector<ValueLabelVector> l(4);
    // c_i = c_j = 2, c_ij = 1, N = 4
    l[0].set(ResearchValue::Novelty);
    l[0].set(ResearchValue::Efficiency);
    l[1].set(ResearchValue::Novelty);
    l[2].set(ResearchValue::Efficiency);
    auto m = pmi_matrix(l, 0.0);
    CHECK(m.pmi[1][2] == 0.0);

    std::vector<ValueLabelVector> p(4);
    p[0].set(ResearchValue::Novelty);
    p[0].set(ResearchValue::Efficiency);
    p[1].set(ResearchValue::Novelty);
    p[1].set(ResearchValue::Efficiency);
    m = pmi_matrix(p, 0.0);
    CHECK(m.pmi[1][2] == 1.0);
    CHECK(m.joint[1][2] == 2);

    std::vector<ValueLabelVector> q(4);
    q[0].set(ResearchValue::Novelty);
    q[1].set(ResearchValue::Novelty);
    q[2].set(ResearchValue::Efficiency);
    q[3].set(ResearchValue::Efficiency);
    m = pmi_matrix(q, 0.5);
    CHECK(std::isfinite(m.pmi[1][2]));
    CHECK(m.pmi[1][2] < 0);
    CHECK(std::isfinite(m.pmi[3][4])); // both never set
    CHECK_THROWS_AS(pmi_matrix(std::vector<ValueLabelVector>{}, 0.5), Error);
}

TEST_CASE("pmi: symmetric, agrees with counting") {
    std::mt19937_64 rng(2);
    for (int round = 0; round < 30; ++round) {
        std::vector<ValueLabelVector> l(1 + rng() % 60);
        for (auto& x : l)
            for (std::size_t i = 0; i < kNumValues; ++i) x.set(i, rng() % 3 == 0);
        const auto m = pmi_matrix(l, 0.5);
        for (std::size_t i = 0; i < kNumValues; ++i)
            for (std::size_t j = 0; j < kNumValues; ++j) {
                CHECK(m.pmi[i][j] == m.pmi[j][i]);
                CHECK(std::abs(m.pmi[i][j] - vm_test::brute_pmi(l, i, j, 0.5)) <= 1e-9);
            }
    }
}

TEST_CASE("pattern frequency") {
    CHECK(pattern_frequency(std::vector<LabeledUnit>{})[1].empty());
    std::vector<LabeledUnit> u(3);
    u[0].matches[1] = {"novel", "propose a"};
    u[1].matches[1] = {"novel", "propose a"};
    u[2].matches[1] = {"novel"};
    const auto c = pattern_frequency(u);
    using P = std::pair<std::string, std::size_t>;
    CHECK(c[1] == std::vector<P>{{"novel", 3}, {"propose a", 2}});
}

TEST_CASE("labels file round trip and writers are stable") {
    std::vector<LabeledUnit> u = {unit("A", 2015, {ResearchValue::Novelty}), unit("B", 2016, {})};
    u[0].matches[1] = {"novel"};
    std::ostringstream out;
    for (const auto& x : u) out << labeled_unit_to_json_line(x, AnalysisUnit::Sentence) << "\n";
    std::istringstream in(out.str());
    AnalysisUnit kind = AnalysisUnit::Abstract;
    const auto back = read_labeled_units(in, &kind);
    CHECK(kind == AnalysisUnit::Sentence);
    REQUIRE(back.size() == 2);
    CHECK(back[0].labels == u[0].labels);
    CHECK(back[0].matches == u[0].matches);

    std::ostringstream a, b;
    write_prevalence_csv(a, prevalence(u, GroupBy::Venue));
    write_prevalence_csv(b, prevalence(back, GroupBy::Venue));
    CHECK(a.str() == b.str());
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK_THROWS_AS(parse_group_by("colour"), Error);
}
