#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "../support.hpp"
#include "values_miner/analytics.hpp"
#include "values_miner/cli.hpp"
#include "values_miner/report.hpp"

using namespace values_miner;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spill(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

} // namespace

TEST_CASE("cli: usage errors exit 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"classify", "--bogus"}).code == 2);
    CHECK(run({"analyze"}).code == 2);
    const auto r = run({"evaluate", "--data", "x.csv"});
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);
}

TEST_CASE("cli: runtime errors are one line, exit 1") {
    const auto r = run({"classify", "--lexicons", "/nonexistent/lex.json", "--sentences", "a", "--out", "b"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: io: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

TEST_CASE("cli: classify on an empty sentence file") {
    const auto dir = vm_test::scratch_dir("cli_empty");
    spill(dir / "lex.json", R"({"novelty":{"threshold":1,"patterns":["novel"]}})");
    spill(dir / "s.txt", "");
    const auto r = run({"classify", "--lexicons", (dir / "lex.json").string(), "--sentences", (dir / "s.txt").string(),
                        "--out", (dir / "labels.csv").string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "labels.csv"));
    CHECK(fs::file_size(dir / "labels.csv") == 0);
    CHECK(fs::exists(dir / "labels.csv.config.json"));
}

TEST_CASE("cli: induce then evaluate end to end") {
    const auto dir = vm_test::scratch_dir("cli_eval");
    auto data = vm_test::zebra_dataset(90, ResearchValue::Novelty, 21);
    {
        std::ofstream f(dir / "annotated.csv");
        write_annotations(f, data);
    }
    const std::string csv = (dir / "annotated.csv").string(), lex = (dir / "lex.json").string();
    const std::string before = slurp(csv);
    REQUIRE(run({"induce-lexicon", "--data", csv, "--out", lex, "--seed", "3"}).code == 0);
    const auto r = run({"evaluate", "--data", csv, "--lexicons", lex, "--split", "test", "--seed", "3", "--out",
                        (dir / "metrics.json").string()});
    CHECK(r.code == 0);
    const auto metrics = nlohmann::json::parse(slurp(dir / "metrics.json"));
    CHECK(metrics["values"][1]["f1"].get<double>() == 1.0);
    const auto echo = nlohmann::json::parse(slurp(dir / "metrics.json.config.json"));
    CHECK(echo["command"] == "evaluate");
    CHECK(echo["splitting"]["seed"] == 3);
    CHECK(slurp(csv) == before); // inputs untouched
}

TEST_CASE("report: files, empty case, determinism") {
    std::vector<LabeledUnit> u(4);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i].paper_id = "p" + std::to_string(i);
        u[i].subfield = i < 2 ? "A" : "B";
        u[i].year = 2015;
        if (i % 2) u[i].labels.set(ResearchValue::Novelty);
    }
    ReportResults res;
    res.prevalence = prevalence(u, GroupBy::Subfield);
    const auto dir = vm_test::scratch_dir("report");
    const auto out = emit_report(res, dir / "one");
    CHECK(out.files.size() == 2);
    CHECK(fs::exists(dir / "one" / "prevalence_subfield.csv"));
    CHECK(fs::exists(dir / "one" / "prevalence_subfield.svg"));

    const auto again = emit_report(res, dir / "two");
    for (const auto& f : {"prevalence_subfield.csv", "prevalence_subfield.svg"})
        CHECK(slurp(dir / "one" / f) == slurp(dir / "two" / f));

    ReportResults empty;
    empty.prevalence = prevalence(std::vector<LabeledUnit>{}, GroupBy::Subfield);
    const auto e = emit_report(empty, dir / "empty");
    CHECK(e.files.size() == 1);
    CHECK_FALSE(e.warnings.empty());
    CHECK(slurp(dir / "empty" / "prevalence_subfield.csv").rfind("subfield,value,", 0) == 0);

    spill(dir / "file", "x");
    CHECK_THROWS(emit_report(res, dir / "file" / "sub"));
}
