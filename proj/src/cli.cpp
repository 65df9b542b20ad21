#include "values_miner/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "values_miner/analytics.hpp"
#include "values_miner/annotations.hpp"
#include "values_miner/corpus.hpp"
#include "values_miner/csv.hpp"
#include "values_miner/error.hpp"
#include "values_miner/fetch.hpp"
#include "values_miner/induction.hpp"
#include "values_miner/lexicon.hpp"
#include "values_miner/llm_adapter.hpp"
#include "values_miner/metrics.hpp"
#include "values_miner/report.hpp"
#include "values_miner/sampling.hpp"
#include "values_miner/segmenter.hpp"

namespace values_miner {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write " + path.string());
    out << content;
    if (!out) throw Error("io", "failed writing " + path.string());
}

/// Effective parameters of a run, written beside its output.
void write_config_echo(const fs::path& output, const ojson& config, bool directory = false) {
    const fs::path echo = directory ? output / "config.json" : fs::path(output.string() + ".config.json");
    spill(echo, config.dump(2) + "\n");
}

Segmenter make_segmenter(const std::string& abbreviations) {
    return abbreviations.empty() ? Segmenter() : Segmenter::from_file(abbreviations);
}

std::vector<ResearchValue> parse_value_list(const std::vector<std::string>& names) {
    if (names.empty()) return {kAllValues.begin(), kAllValues.end()};
    std::vector<ResearchValue> out;
    for (const auto& n : names) {
        const auto v = parse_value(n);
        if (!v) throw Error("usage", "unknown research value '" + n + "'");
        out.push_back(*v);
    }
    return out;
}

std::optional<ResearchValue> parse_optional_value(const std::string& name) {
    if (name.empty()) return std::nullopt;
    const auto v = parse_value(name);
    if (!v) throw Error("usage", "unknown research value '" + name + "'");
    return v;
}

Split parse_split_flag(const std::string& s) {
    const auto split = parse_split(s);
    if (!split) throw Error("usage", "unknown split '" + s + "'");
    return *split;
}

ojson value_names(std::span<const ResearchValue> values) {
    ojson arr = ojson::array();
    for (auto v : values) arr.push_back(value_id(v));
    return arr;
}

bool wants_json(const std::string& path, const std::string& format) {
    if (!format.empty()) return format == "json";
    return fs::path(path).extension() == ".json";
}

/// Runs fn(i) for i in [0, n) over `jobs` threads; each index is written by
/// exactly one thread, so results stored by index keep input order.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> failures(jobs);
    {
        std::vector<std::jthread> threads;
        for (std::size_t w = 0; w < jobs; ++w) {
            threads.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += jobs) fn(i);
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
}

std::vector<AnnotatedInstance> load_split_annotations(const std::string& path, const SplitOptions& options,
                                                      std::ostream& err) {
    auto instances = load_annotations(path);
    const bool had_split = std::all_of(instances.begin(), instances.end(),
                                       [](const AnnotatedInstance& i) { return i.split.has_value(); });
    if (!had_split && std::any_of(instances.begin(), instances.end(),
                                  [](const AnnotatedInstance& i) { return i.split.has_value(); })) {
        err << "warning: split column is incomplete; assigning fresh splits\n";
    }
    assign_splits(instances, options);
    return instances;
}

ojson split_config(const SplitOptions& o) {
    ojson c;
    c["ratios"] = o.ratios;
    c["seed"] = o.seed;
    c["resplit"] = o.resplit;
    c["stratify"] = o.stratify ? ojson(value_id(*o.stratify)) : ojson(nullptr);
    return c;
}

// ---------------------------------------------------------------------------
// Subcommand option bundles

struct IngestOptions {
    std::string ids, input, registry, out, base_url = ApiConfig{}.base_url;
    double rps = 1.0;
    int retries = 4;
    int backoff_ms = 500;
};

struct SegmentOptions {
    std::string corpus, text, out, abbreviations;
};

struct SampleOptions {
    std::string corpus, registry, out, abbreviations;
    std::size_t per_venue = 12;
    std::uint64_t seed = 0;
};

struct SplitFlags {
    std::uint64_t seed = 0;
    bool resplit = false;
    std::string stratify;

    SplitOptions options() const {
        SplitOptions o;
        o.seed = seed;
        o.resplit = resplit;
        o.stratify = parse_optional_value(stratify);
        return o;
    }
};

struct InduceOptions {
    std::string data, out, seed_lexicon, ranking;
    SplitFlags split;
    InductionParams params;
};

struct ClassifyOptions {
    std::string lexicons, sentences, corpus, out, abbreviations, unit = "abstract";
    std::size_t jobs = 1;
};

struct EvaluateOptions {
    std::string data, lexicons, split = "test", out = "metrics.json", predictions;
    std::vector<std::string> values;
    SplitFlags split_flags;
};

struct LlmOptions {
    std::string data, split = "test", out = "llm_metrics.json", predictions, cache = "llm_cache.jsonl", url,
                      codebook;
    std::vector<std::string> values;
    SplitFlags split_flags;
    PromptSpec prompt;
    bool offline = false;
    std::size_t jobs = 1;
    int retries = 3;
    int backoff_ms = 500;
};

struct AnalyzeOptions {
    std::string labels, out, group_by = "subfield", group, format;
    double alpha0 = 1.0;
    double alpha = 0.05;
    double epsilon = 0.5;
    bool include_out_of_window = false;
};

struct ReportOptions {
    std::string labels, outdir, group_by = "subfield", trend_group_by = "field_group";
    double alpha0 = 1.0;
    double alpha = 0.05;
    double epsilon = 0.5;
};

// ---------------------------------------------------------------------------

int run_ingest(const IngestOptions& o, std::ostream& out, std::ostream& err) {
    if (o.ids.empty() == o.input.empty()) throw Error("usage", "ingest needs exactly one of --ids or --input");
    VenueRegistry registry;
    if (!o.registry.empty()) registry = load_registry(o.registry);

    ojson config;
    config["command"] = "ingest";
    config["registry"] = o.registry;
    config["out"] = o.out;

    std::vector<PaperRecord> records;
    if (!o.input.empty()) {
        auto corpus = load_corpus(o.input);
        for (const auto& w : corpus.warnings) err << "warning: line " << w.line << ": " << w.message << "\n";
        if (!o.registry.empty()) {
            for (auto& r : corpus.records) {
                if (const auto* info = registry.find(r.venue)) {
                    r.subfield = info->subfield;
                    r.field_group = info->field_group;
                }
            }
        }
        records = std::move(corpus.records);
        config["input"] = o.input;
        out << "loaded " << records.size() << " records (" << corpus.warnings.size() << " warnings)\n";
    } else {
        std::vector<std::string> ids;
        std::istringstream lines(slurp(o.ids));
        std::string line;
        while (std::getline(lines, line)) {
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            const auto last = line.find_last_not_of(" \t\r");
            ids.push_back(line.substr(first, last - first + 1));
        }
        ApiConfig api;
        api.base_url = o.base_url;
        api.requests_per_second = o.rps;
        api.retry.max_attempts = o.retries;
        api.retry.base_delay = std::chrono::milliseconds(o.backoff_ms);
        apply_api_key_from_env(api);
        auto transport = make_http_transport();
        auto result = fetch_abstracts(ids, api, registry, *transport);

        std::ostringstream skipped;
        for (const auto& s : result.skipped) {
            skipped << ojson{{"paper_id", s.paper_id}, {"reason", s.reason}}.dump() << "\n";
        }
        spill(o.out + ".skipped.jsonl", skipped.str());
        for (const auto& e : result.errors) err << "warning: " << e << "\n";
        out << "fetched " << result.records.size() << " of " << ids.size() << " ids; " << result.skipped.size()
            << " skipped, " << result.errors.size() << " failed, " << result.requests << " requests\n";
        records = std::move(result.records);
        config["ids"] = o.ids;
        config["base_url"] = o.base_url;
        config["rps"] = o.rps;
        config["retries"] = o.retries;
        config["backoff_ms"] = o.backoff_ms;
        config["api_key_set"] = !api.api_key.empty();
    }
    save_corpus(o.out, records);
    write_config_echo(o.out, config);
    return 0;
}

int run_segment(const SegmentOptions& o, std::ostream& out, std::ostream& err) {
    if (o.corpus.empty() == o.text.empty()) throw Error("usage", "segment needs exactly one of --corpus or --text");
    const auto segmenter = make_segmenter(o.abbreviations);

    std::ostringstream lines;
    std::size_t count = 0;
    auto emit = [&](const std::string& paper_id, std::string_view text) {
        const auto spans = segmenter.segment(text);
        for (std::size_t i = 0; i < spans.size(); ++i) {
            ojson obj;
            if (!paper_id.empty()) obj["paper_id"] = paper_id;
            obj["sentence_index"] = i;
            obj["start"] = spans[i].start;
            obj["end"] = spans[i].end;
            obj["text"] = spans[i].text;
            lines << obj.dump() << "\n";
            ++count;
        }
    };
    if (!o.corpus.empty()) {
        const auto corpus = load_corpus(o.corpus);
        for (const auto& w : corpus.warnings) err << "warning: line " << w.line << ": " << w.message << "\n";
        for (const auto& r : corpus.records) emit(r.paper_id, r.abstract);
    } else {
        emit("", slurp(o.text));
    }
    spill(o.out, lines.str());
    write_config_echo(o.out, ojson{{"command", "segment"},
                                   {"corpus", o.corpus},
                                   {"text", o.text},
                                   {"abbreviations", o.abbreviations},
                                   {"out", o.out}});
    out << "wrote " << count << " sentences\n";
    return 0;
}

int run_sample(const SampleOptions& o, std::ostream& out, std::ostream& err) {
    const auto corpus = load_corpus(o.corpus);
    for (const auto& w : corpus.warnings) err << "warning: line " << w.line << ": " << w.message << "\n";
    VenueRegistry registry;
    if (!o.registry.empty()) registry = load_registry(o.registry);
    const auto result = sample_for_annotation(corpus.records, registry, o.per_venue, o.seed,
                                              make_segmenter(o.abbreviations));
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
    std::ostringstream lines;
    write_samples(lines, result.sentences);
    spill(o.out, lines.str());
    write_config_echo(o.out, ojson{{"command", "sample"},
                                   {"corpus", o.corpus},
                                   {"registry", o.registry},
                                   {"per_venue", o.per_venue},
                                   {"seed", o.seed},
                                   {"abbreviations", o.abbreviations},
                                   {"out", o.out}});
    out << "sampled " << result.sentences.size() << " sentences\n";
    return 0;
}

int run_induce(const InduceOptions& o, std::ostream& out, std::ostream& err) {
    const auto split = o.split.options();
    const auto instances = load_split_annotations(o.data, split, err);
    const auto train = select_split(instances, Split::Train);
    const auto validation = select_split(instances, Split::Validation);

    std::optional<LexiconSpec> seed;
    if (!o.seed_lexicon.empty()) seed = load_lexicon(o.seed_lexicon);
    const auto result = induce_lexicon(train, validation, o.params, seed ? &*seed : nullptr);
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
    save_lexicon(result.spec, o.out);

    if (!o.ranking.empty()) {
        std::ostringstream csv_out;
        csv::write_row(csv_out, {"value", "rank", "pattern", "positive", "negative", "delta", "z", "selected"});
        for (auto v : kAllValues) {
            const auto& info = result.per_value[index_of(v)];
            for (std::size_t r = 0; r < info.ranked.size(); ++r) {
                const auto& p = info.ranked[r];
                csv::write_row(csv_out, {std::string(value_id(v)), std::to_string(r + 1), p.pattern,
                                         std::to_string(p.positive), std::to_string(p.negative),
                                         format_double(p.delta), format_double(p.z), r < info.chosen_k ? "1" : "0"});
            }
        }
        spill(o.ranking, csv_out.str());
    }

    ojson config;
    config["command"] = "induce-lexicon";
    config["data"] = o.data;
    config["split"] = split_config(split);
    config["n_max"] = o.params.n_max;
    config["min_count"] = o.params.min_count;
    config["k_grid"] = o.params.k_grid;
    config["thresholds"] = o.params.threshold_grid;
    config["alpha0"] = o.params.alpha0;
    config["full_variance"] = o.params.full_variance;
    config["seed_lexicon"] = o.seed_lexicon;
    config["out"] = o.out;
    ojson chosen = ojson::object();
    for (auto v : kAllValues) {
        const auto& info = result.per_value[index_of(v)];
        chosen[std::string(value_id(v))] = {{"k", info.chosen_k},
                                            {"threshold", info.chosen_threshold},
                                            {"tuning_f1", info.tuning_f1}};
    }
    config["chosen"] = std::move(chosen);
    write_config_echo(o.out, config);

    out << "train " << train.size() << ", validation " << validation.size() << "; " << result.spec.pattern_count()
        << " patterns written\n";
    return 0;
}

int run_classify(const ClassifyOptions& o, std::ostream& out, std::ostream& err) {
    if (o.sentences.empty() == o.corpus.empty()) {
        throw Error("usage", "classify needs exactly one of --sentences or --corpus");
    }
    const auto unit = parse_unit(o.unit);
    if (!unit) throw Error("usage", "unknown unit '" + o.unit + "'");
    const auto lexicon = CompiledLexicon::compile(load_lexicon(o.lexicons));
    const auto segmenter = make_segmenter(o.abbreviations);

    std::ostringstream body;
    std::size_t rows = 0;
    if (!o.sentences.empty()) {
        std::vector<std::string> sentences;
        std::istringstream in(slurp(o.sentences));
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            sentences.push_back(line);
        }
        std::vector<SentenceClassification> results(sentences.size());
        parallel_for(sentences.size(), o.jobs, [&](std::size_t i) { results[i] = classify_sentence(lexicon, sentences[i]); });

        std::vector<std::string> header = {"sentence_text"};
        for (auto v : kAllValues) header.emplace_back(value_id(v));
        if (!sentences.empty()) csv::write_row(body, header);
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            std::vector<std::string> row = {sentences[i]};
            for (auto v : kAllValues) row.emplace_back(results[i].labels[v] ? "1" : "0");
            csv::write_row(body, row);
        }
        rows = sentences.size();
    } else {
        const auto corpus = load_corpus(o.corpus);
        for (const auto& w : corpus.warnings) err << "warning: line " << w.line << ": " << w.message << "\n";
        std::vector<std::vector<LabeledUnit>> per_record(corpus.records.size());
        parallel_for(corpus.records.size(), o.jobs, [&](std::size_t i) {
            const auto& r = corpus.records[i];
            const auto classified = classify_abstract(lexicon, r.abstract, segmenter);
            LabeledUnit base{r.paper_id, r.venue, r.subfield, r.field_group, r.year, 0, {}, {}};
            if (*unit == AnalysisUnit::Abstract) {
                base.labels = classified.labels;
                for (const auto& s : classified.sentences) {
                    for (std::size_t v = 0; v < kNumValues; ++v) {
                        base.matches[v].insert(base.matches[v].end(), s.matches[v].begin(), s.matches[v].end());
                    }
                }
                per_record[i].push_back(std::move(base));
            } else {
                for (std::size_t s = 0; s < classified.sentences.size(); ++s) {
                    LabeledUnit u = base;
                    u.sentence_index = s;
                    u.labels = classified.sentences[s].labels;
                    u.matches = classified.sentences[s].matches;
                    per_record[i].push_back(std::move(u));
                }
            }
        });
        for (const auto& units : per_record) {
            for (const auto& u : units) {
                body << labeled_unit_to_json_line(u, *unit) << "\n";
                ++rows;
            }
        }
    }
    spill(o.out, body.str());
    // jobs is deliberately left out of the echo: output does not depend on it.
    write_config_echo(o.out, ojson{{"command", "classify"},
                                   {"lexicons", o.lexicons},
                                   {"sentences", o.sentences},
                                   {"corpus", o.corpus},
                                   {"unit", o.unit},
                                   {"abbreviations", o.abbreviations},
                                   {"out", o.out}});
    out << "classified " << rows << " " << (o.sentences.empty() ? std::string(unit_name(*unit)) : "sentence")
        << " rows\n";
    return 0;
}

void write_predictions(const std::string& path, std::span<const AnnotatedInstance> instances,
                       std::span<const ValueLabelVector> predictions, std::span<const ResearchValue> values) {
    std::ostringstream body;
    std::vector<std::string> header = {"sentence_text", "paper_id"};
    for (auto v : values) {
        header.push_back(std::string(value_id(v)) + "_gold");
        header.push_back(std::string(value_id(v)) + "_pred");
    }
    csv::write_row(body, header);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        std::vector<std::string> row = {instances[i].sentence_text, instances[i].paper_id};
        for (auto v : values) {
            row.emplace_back(instances[i].gold[v] ? "1" : "0");
            row.emplace_back(predictions[i][v] ? "1" : "0");
        }
        csv::write_row(body, row);
    }
    spill(path, body.str());
}

int run_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
    const auto split = o.split_flags.options();
    const auto values = parse_value_list(o.values);
    const auto which = parse_split_flag(o.split);
    const auto instances = load_split_annotations(o.data, split, err);
    const auto selected = select_split(instances, which);
    const auto lexicon = CompiledLexicon::compile(load_lexicon(o.lexicons));

    std::vector<ValueLabelVector> predictions, gold;
    for (const auto& inst : selected) {
        predictions.push_back(classify_sentence(lexicon, inst.sentence_text).labels);
        gold.push_back(inst.gold);
    }
    const auto report = evaluate_all(predictions, gold, values);
    spill(o.out, metrics_to_json_text(report));
    if (!o.predictions.empty()) write_predictions(o.predictions, selected, predictions, values);

    ojson config;
    config["command"] = "evaluate";
    config["data"] = o.data;
    config["lexicons"] = o.lexicons;
    config["split"] = o.split;
    config["splitting"] = split_config(split);
    config["values"] = value_names(values);
    config["out"] = o.out;
    config["predictions"] = o.predictions;
    write_config_echo(o.out, config);

    out << "evaluated " << selected.size() << " " << o.split << " instances; macro-F1 "
        << format_double(report.macro_f1) << "\n";
    return 0;
}

int run_llm(LlmOptions o, std::ostream& out, std::ostream& err) {
    const auto split = o.split_flags.options();
    const auto values = parse_value_list(o.values);
    const auto which = parse_split_flag(o.split);
    const auto instances = load_split_annotations(o.data, split, err);
    const auto targets = select_split(instances, which);

    if (!o.codebook.empty()) {
        const auto doc = nlohmann::json::parse(slurp(o.codebook));
        for (const auto& [key, text] : doc.items()) {
            const auto v = parse_value(key);
            if (!v) throw Error("config", "unknown value '" + key + "' in codebook");
            o.prompt.definitions[index_of(*v)] = text.get<std::string>();
        }
    }
    o.prompt.seed = o.split_flags.seed;

    auto endpoint = endpoint_from_env();
    if (!o.url.empty()) endpoint.url = o.url;
    endpoint.retry.max_attempts = o.retries;
    endpoint.retry.base_delay = std::chrono::milliseconds(o.backoff_ms);

    ResponseCache cache(o.cache);
    std::unique_ptr<HttpTransport> http;
    std::optional<CountingTransport> counted;
    HttpTransport* transport = nullptr;
    if (!o.offline && !endpoint.url.empty()) {
        http = make_http_transport();
        counted.emplace(*http);
        transport = &*counted;
    }

    for (auto v : values) {
        for (const auto& w : build_prompt(o.prompt, v, instances, "").warnings) err << "warning: " << w << "\n";
    }
    const auto batch = llm_classify_batch(targets, values, o.prompt, instances, cache, endpoint, transport, o.jobs);

    std::vector<ValueLabelVector> predictions(targets.size()), gold;
    for (const auto& t : targets) gold.push_back(t.gold);
    for (const auto& item : batch.items) {
        if (item.result.label == 1) predictions[item.instance].set(item.value);
        if (item.result.error) {
            err << "warning: instance " << item.instance << " / " << value_id(item.value) << ": " << *item.result.error
                << "\n";
        }
    }
    const auto report = evaluate_all(predictions, gold, values);
    auto doc = ojson::parse(metrics_to_json_text(report));
    doc["backend"] = "llm";
    doc["model"] = o.prompt.model;
    doc["parse_failures"] = batch.parse_failures;
    doc["errors"] = batch.errors;
    spill(o.out, doc.dump(2) + "\n");
    if (!o.predictions.empty()) write_predictions(o.predictions, targets, predictions, values);

    ojson config;
    config["command"] = "llm-classify";
    config["data"] = o.data;
    config["split"] = o.split;
    config["splitting"] = split_config(split);
    config["values"] = value_names(values);
    config["model"] = o.prompt.model;
    config["k"] = o.prompt.k;
    config["template"] = o.prompt.template_id;
    config["temperature"] = o.prompt.temperature;
    config["codebook"] = o.codebook;
    config["cache"] = o.cache;
    config["offline"] = o.offline;
    config["retries"] = o.retries;
    config["backoff_ms"] = o.backoff_ms;
    config["out"] = o.out;
    write_config_echo(o.out, config);

    out << "llm-classified " << targets.size() << " instances x " << values.size() << " values; " << batch.cache_hits
        << " cache hits, " << (counted ? counted->count() : 0) << " network requests, " << batch.errors
        << " errors; macro-F1 " << format_double(report.macro_f1) << "\n";
    return 0;
}

std::vector<LabeledUnit> load_labels(const std::string& path, AnalysisUnit& unit) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot read labels file " + path);
    return read_labeled_units(in, &unit);
}

std::vector<ValueLabelVector> label_vectors(std::span<const LabeledUnit> units) {
    std::vector<ValueLabelVector> out;
    out.reserve(units.size());
    for (const auto& u : units) out.push_back(u.labels);
    return out;
}

std::vector<DistinctivenessScore> all_group_distinctiveness(std::span<const LabeledUnit> units, GroupBy by,
                                                            double alpha0) {
    std::vector<std::string> groups;
    for (const auto& u : units) groups.push_back(group_key(u, by));
    std::sort(groups.begin(), groups.end());
    groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
    std::vector<DistinctivenessScore> all;
    if (groups.size() < 2) return all;
    for (const auto& g : groups) {
        auto scores = distinctiveness(units, by, g, alpha0);
        all.insert(all.end(), scores.begin(), scores.end());
    }
    return all;
}

int run_analyze(const std::string& which, const AnalyzeOptions& o, std::ostream& out) {
    AnalysisUnit unit = AnalysisUnit::Abstract;
    const auto units = load_labels(o.labels, unit);
    const bool json = wants_json(o.out, o.format);
    if (!o.format.empty() && o.format != "json" && o.format != "csv") {
        throw Error("usage", "unknown format '" + o.format + "'");
    }

    ojson config;
    config["command"] = "analyze " + which;
    config["labels"] = o.labels;
    config["unit"] = unit_name(unit);
    config["out"] = o.out;
    config["format"] = json ? "json" : "csv";

    std::ostringstream body;
    if (which == "freq") {
        const auto by = parse_group_by(o.group_by);
        const auto table = prevalence(units, by, unit, o.include_out_of_window);
        json ? void(body << to_json_text(table)) : write_prevalence_csv(body, table);
        config["group_by"] = o.group_by;
        config["include_out_of_window"] = o.include_out_of_window;
    } else if (which == "distinct") {
        const auto by = parse_group_by(o.group_by);
        const auto scores = o.group.empty() ? all_group_distinctiveness(units, by, o.alpha0)
                                            : distinctiveness(units, by, o.group, o.alpha0);
        json ? void(body << to_json_text(std::span<const DistinctivenessScore>(scores)))
             : write_distinctiveness_csv(body, scores);
        config["group_by"] = o.group_by;
        config["group"] = o.group;
        config["alpha0"] = o.alpha0;
    } else if (which == "trend") {
        const auto by = parse_group_by(o.group_by);
        const auto trends = group_trends(units, by, o.alpha);
        json ? void(body << to_json_text(std::span<const GroupTrend>(trends))) : write_trends_csv(body, trends);
        config["group_by"] = o.group_by;
        config["alpha"] = o.alpha;
    } else if (which == "pmi") {
        auto matrix = pmi_matrix(label_vectors(units), o.epsilon);
        matrix.unit = unit;
        json ? void(body << to_json_text(matrix)) : write_pmi_csv(body, matrix);
        config["epsilon"] = o.epsilon;
    } else {
        const auto counts = pattern_frequency(units);
        json ? void(body << to_json_text(counts)) : write_patterns_csv(body, counts);
    }
    spill(o.out, body.str());
    write_config_echo(o.out, config);
    out << "analyze " << which << ": " << units.size() << " " << unit_name(unit) << " rows -> " << o.out << "\n";
    return 0;
}

int run_report(const ReportOptions& o, std::ostream& out, std::ostream& err) {
    AnalysisUnit unit = AnalysisUnit::Abstract;
    const auto units = load_labels(o.labels, unit);
    const auto by = parse_group_by(o.group_by);
    const auto trend_by = parse_group_by(o.trend_group_by);

    ReportResults results;
    results.prevalence = prevalence(units, by, unit);
    results.trend_grouping = trend_by;
    results.trends = group_trends(units, trend_by, o.alpha);
    if (!units.empty()) {
        results.pmi = pmi_matrix(label_vectors(units), o.epsilon);
        results.pmi->unit = unit;
    } else {
        err << "warning: no labeled rows; PMI skipped\n";
    }
    results.distinctiveness = all_group_distinctiveness(units, by, o.alpha0);
    results.patterns = pattern_frequency(units);

    const auto written = emit_report(results, o.outdir);
    for (const auto& w : written.warnings) err << "warning: " << w << "\n";
    write_config_echo(o.outdir,
                      ojson{{"command", "report"},
                            {"labels", o.labels},
                            {"unit", unit_name(unit)},
                            {"group_by", o.group_by},
                            {"trend_group_by", o.trend_group_by},
                            {"alpha0", o.alpha0},
                            {"alpha", o.alpha},
                            {"epsilon", o.epsilon}},
                      true);
    out << "report: " << written.files.size() << " files in " << o.outdir << "\n";
    return 0;
}

void add_split_flags(CLI::App* cmd, SplitFlags& f) {
    cmd->add_option("--seed", f.seed, "Seed for split assignment");
    cmd->add_flag("--resplit", f.resplit, "Ignore an existing split column");
    cmd->add_option("--stratify", f.stratify, "Stratify splits on this value");
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

} // namespace

int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Detects research values in paper abstracts and analyses their prevalence", "values-miner"};
    app.require_subcommand(1);

    IngestOptions ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Fetch abstracts by id, or validate a local corpus file");
    c_ingest->add_option("--ids", ingest.ids, "File with one paper id per line");
    c_ingest->add_option("--input", ingest.input, "Existing corpus file (line-delimited JSON)");
    c_ingest->add_option("--registry", ingest.registry, "Venue registry file");
    c_ingest->add_option("--out", ingest.out, "Corpus output file")->required();
    c_ingest->add_option("--base-url", ingest.base_url, "Metadata API base URL");
    c_ingest->add_option("--rps", ingest.rps, "Requests per second")->check(CLI::PositiveNumber);
    c_ingest->add_option("--retries", ingest.retries, "Attempts per id")->check(CLI::Range(1, 20));
    c_ingest->add_option("--backoff-ms", ingest.backoff_ms, "Initial backoff")->check(CLI::NonNegativeNumber);

    SegmentOptions segment;
    auto* c_segment = app.add_subcommand("segment", "Split abstracts into sentences");
    c_segment->add_option("--corpus", segment.corpus, "Corpus file");
    c_segment->add_option("--text", segment.text, "Plain text file treated as one document");
    c_segment->add_option("--out", segment.out, "Sentence output file")->required();
    c_segment->add_option("--abbreviations", segment.abbreviations, "Abbreviation list file");

    SampleOptions sample;
    auto* c_sample = app.add_subcommand("sample", "Draw the per-venue annotation sample");
    c_sample->add_option("--corpus", sample.corpus, "Corpus file")->required();
    c_sample->add_option("--registry", sample.registry, "Venue registry file");
    c_sample->add_option("--per-venue", sample.per_venue, "Abstracts per venue")->check(CLI::PositiveNumber);
    c_sample->add_option("--seed", sample.seed, "Random seed");
    c_sample->add_option("--out", sample.out, "Sample output file")->required();
    c_sample->add_option("--abbreviations", sample.abbreviations, "Abbreviation list file");

    InduceOptions induce;
    auto* c_induce = app.add_subcommand("induce-lexicon", "Induce value lexicons from annotated sentences");
    c_induce->add_option("--data", induce.data, "Annotations file")->required();
    c_induce->add_option("--out", induce.out, "Lexicon output file")->required();
    c_induce->add_option("--seed-lexicon", induce.seed_lexicon, "Hand-curated patterns to merge in");
    c_induce->add_option("--ranking", induce.ranking, "Write the scored candidate list here");
    c_induce->add_option("--n-max", induce.params.n_max, "Longest n-gram")->check(CLI::Range(1, 6));
    c_induce->add_option("--min-count", induce.params.min_count, "Minimum sentence frequency");
    c_induce->add_option("--k-grid", induce.params.k_grid, "Candidate lexicon sizes")->delimiter(',');
    c_induce->add_option("--thresholds", induce.params.threshold_grid, "Candidate thresholds")->delimiter(',');
    c_induce->add_option("--alpha0", induce.params.alpha0, "Prior strength")->check(CLI::PositiveNumber);
    c_induce->add_flag("--full-variance", induce.params.full_variance, "Four-cell variance when ranking n-grams");
    add_split_flags(c_induce, induce.split);

    ClassifyOptions classify;
    auto* c_classify = app.add_subcommand("classify", "Label sentences or abstracts with a lexicon");
    c_classify->add_option("--lexicons", classify.lexicons, "Lexicon file")->required();
    c_classify->add_option("--sentences", classify.sentences, "One sentence per line");
    c_classify->add_option("--corpus", classify.corpus, "Corpus file");
    c_classify->add_option("--out", classify.out, "Labels output file")->required();
    c_classify->add_option("--unit", classify.unit, "abstract or sentence (corpus input)");
    c_classify->add_option("--jobs", classify.jobs, "Worker threads")->check(CLI::PositiveNumber);
    c_classify->add_option("--abbreviations", classify.abbreviations, "Abbreviation list file");

    EvaluateOptions evaluate;
    auto* c_evaluate = app.add_subcommand("evaluate", "Score a lexicon against annotated sentences");
    c_evaluate->add_option("--data", evaluate.data, "Annotations file")->required();
    c_evaluate->add_option("--lexicons", evaluate.lexicons, "Lexicon file")->required();
    c_evaluate->add_option("--split", evaluate.split, "train, validation or test");
    c_evaluate->add_option("--values", evaluate.values, "Subset of values")->delimiter(',');
    c_evaluate->add_option("--out", evaluate.out, "Metrics output file");
    c_evaluate->add_option("--predictions", evaluate.predictions, "Per-instance predictions file");
    add_split_flags(c_evaluate, evaluate.split_flags);

    LlmOptions llm;
    auto* c_llm = app.add_subcommand("llm-classify", "Few-shot prompting backend with an on-disk cache");
    c_llm->add_option("--data", llm.data, "Annotations file")->required();
    c_llm->add_option("--split", llm.split, "Split to classify");
    c_llm->add_option("--values", llm.values, "Subset of values")->delimiter(',');
    c_llm->add_option("--k", llm.prompt.k, "Exemplars per class")->check(CLI::NonNegativeNumber);
    c_llm->add_option("--model", llm.prompt.model, "Model id");
    c_llm->add_option("--temperature", llm.prompt.temperature, "Sampling temperature");
    c_llm->add_option("--codebook", llm.codebook, "JSON object of value definitions");
    c_llm->add_option("--cache", llm.cache, "Response cache file");
    c_llm->add_option("--url", llm.url, "Endpoint URL (default: VALUES_MINER_LLM_URL)");
    c_llm->add_flag("--offline", llm.offline, "Serve from cache only; never touch the network");
    c_llm->add_option("--jobs", llm.jobs, "Requests in flight")->check(CLI::PositiveNumber);
    c_llm->add_option("--retries", llm.retries, "Attempts per request")->check(CLI::Range(1, 20));
    c_llm->add_option("--backoff-ms", llm.backoff_ms, "Initial backoff")->check(CLI::NonNegativeNumber);
    c_llm->add_option("--out", llm.out, "Metrics output file");
    c_llm->add_option("--predictions", llm.predictions, "Per-instance predictions file");
    add_split_flags(c_llm, llm.split_flags);

    AnalyzeOptions analyze;
    auto* c_analyze = app.add_subcommand("analyze", "Corpus statistics over a labels file");
    c_analyze->require_subcommand(1);
    std::string analyze_kind;
    for (const char* kind : {"freq", "distinct", "trend", "pmi", "patterns"}) {
        auto* sub = c_analyze->add_subcommand(kind);
        sub->add_option("--labels", analyze.labels, "Labels file from classify --corpus")->required();
        sub->add_option("--out", analyze.out, "Output file (.csv or .json)")->required();
        sub->add_option("--format", analyze.format, "csv or json (default: by extension)");
        if (std::string_view(kind) != "pmi" && std::string_view(kind) != "patterns") {
            sub->add_option("--group-by", analyze.group_by, "venue, subfield, field_group, year, subfield_year");
        }
        if (std::string_view(kind) == "freq") {
            sub->add_flag("--include-out-of-window", analyze.include_out_of_window, "Keep years outside 2013-2022");
        }
        if (std::string_view(kind) == "distinct") {
            sub->add_option("--group", analyze.group, "Single group (default: every group)");
            sub->add_option("--alpha0", analyze.alpha0, "Prior strength")->check(CLI::PositiveNumber);
        }
        if (std::string_view(kind) == "trend") {
            sub->add_option("--alpha", analyze.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
        }
        if (std::string_view(kind) == "pmi") {
            sub->add_option("--epsilon", analyze.epsilon, "Additive smoothing")->check(CLI::NonNegativeNumber);
        }
        sub->callback([&analyze_kind, kind] { analyze_kind = kind; });
    }

    ReportOptions report;
    auto* c_report = app.add_subcommand("report", "Tables and SVG charts for a labels file");
    c_report->add_option("--labels", report.labels, "Labels file")->required();
    c_report->add_option("--outdir", report.outdir, "Output directory")->required();
    c_report->add_option("--group-by", report.group_by, "Grouping for prevalence and distinctiveness");
    c_report->add_option("--trend-group-by", report.trend_group_by, "Grouping for yearly trends");
    c_report->add_option("--alpha0", report.alpha0, "Prior strength")->check(CLI::PositiveNumber);
    c_report->add_option("--alpha", report.alpha, "Trend significance level")->check(CLI::Range(0.0, 1.0));
    c_report->add_option("--epsilon", report.epsilon, "PMI smoothing")->check(CLI::NonNegativeNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << one_line(e.what()) << "\n" << app.help();
        return 2;
    }

    try {
        if (c_ingest->parsed()) return run_ingest(ingest, out, err);
        if (c_segment->parsed()) return run_segment(segment, out, err);
        if (c_sample->parsed()) return run_sample(sample, out, err);
        if (c_induce->parsed()) return run_induce(induce, out, err);
        if (c_classify->parsed()) return run_classify(classify, out, err);
        if (c_evaluate->parsed()) return run_evaluate(evaluate, out, err);
        if (c_llm->parsed()) return run_llm(llm, out, err);
        if (c_analyze->parsed()) return run_analyze(analyze_kind, analyze, out);
        if (c_report->parsed()) return run_report(report, out, err);
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << one_line(e.what()) << "\n";
        return e.kind() == "usage" ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << one_line(e.what()) << "\n";
        return 1;
    }
    err << app.help();
    return 2;
}

} // namespace values_miner
