// dialeval: evaluate MT metrics on non-standardized dialect data.
//
// Subcommands mirror the pipeline: score | noise | challenge build |
// challenge eval | evaluate | report. Exit codes: 0 success, 1 IO failure,
// 2 validation failure.

#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dialeval/challenge.hpp"
#include "dialeval/corpus.hpp"
#include "dialeval/metrics.hpp"
#include "dialeval/noise.hpp"
#include "dialeval/report.hpp"
#include "dialeval/stats.hpp"
#include "dialeval/unicode.hpp"
#include "dialeval/util.hpp"

namespace fs = std::filesystem;
using namespace dialeval;
using ordered_json = nlohmann::ordered_json;

namespace {

struct KeyedPath {
    std::string key;    // dialect label
    std::string path;
};

KeyedPath parse_keyed_path(const std::string& arg, const std::string& flag) {
    std::size_t eq = arg.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) {
        throw ValidationError(flag + " expects DIALECT=PATH, got '" + arg + "'");
    }
    return {arg.substr(0, eq), arg.substr(eq + 1)};
}

void require_file(const std::string& path) {
    if (!fs::exists(path)) throw IoError("no such file: " + path);
}

void ensure_dir(const std::string& path) {
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

std::vector<std::string> read_lines(const std::string& path) {
    std::string content = read_file(path);
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string::npos) end = content.size();
        std::string line = content.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(nfc_normalize(line));
        start = end + 1;
    }
    return lines;
}

MetricConfig metric_preset(const std::string& name) {
    MetricConfig metric;
    if (name == "bleu") {
        metric.kind = MetricKind::bleu;
    } else if (name == "chrf") {
        metric.kind = MetricKind::chrf;
    } else if (name == "chrf++") {
        metric.kind = MetricKind::chrf;
        metric.chrf.word_order = 2;
    } else {
        throw ValidationError("unknown metric '" + name + "' (expected bleu, chrf or chrf++)");
    }
    return metric;
}

std::string metric_signature(const MetricConfig& metric) {
    return metric.kind == MetricKind::bleu ? metric.bleu.signature() : metric.chrf.signature();
}

// ----------------------------------------------------------------------
// score

struct ScoreArgs {
    std::string dataset_path;
    std::string lang_pair = "src-tgt";
    std::string dialect = "all";
    std::string metric_name = "bleu";
    std::string out_dir;
    int word_order = -1;
    int char_order = -1;
    double beta = -1.0;
    int max_order = -1;
    bool effective_order = false;
    bool lowercase = false;
    bool keep_space = false;
    bool allow_missing_reference = false;
    int threads = 1;
};

int cmd_score(const ScoreArgs& args) {
    require_file(args.dataset_path);
    EvalDataset dataset = load_dataset(
        args.dataset_path, {.lang_pair = args.lang_pair,
                            .dialect_region = args.dialect,
                            .allow_missing_reference = args.allow_missing_reference});

    MetricConfig metric = metric_preset(args.metric_name);
    if (metric.kind == MetricKind::bleu) {
        if (args.max_order > 0) metric.bleu.max_order = args.max_order;
        metric.bleu.effective_order = args.effective_order;
        metric.bleu.lowercase = args.lowercase;
    } else {
        if (args.word_order >= 0) metric.chrf.word_order = args.word_order;
        if (args.char_order > 0) metric.chrf.char_order = args.char_order;
        if (args.beta > 0) metric.chrf.beta = args.beta;
        if (args.keep_space) metric.chrf.remove_space = false;
    }

    auto [segment_table, system_table] = score_dataset(metric, dataset, args.threads);
    ensure_dir(args.out_dir);
    std::string base = args.out_dir + "/" + metric.metric_id();
    write_scores(base + "_segment.tsv", segment_table);
    write_scores(base + "_system.tsv", system_table);

    std::cout << "# " << metric.metric_id() << " signature: " << metric_signature(metric) << "\n";
    for (const auto& [system_id, value] : system_table.system_entries) {
        std::cout << metric.metric_id() << "\t" << system_id << "\t" << format_double(value, 4)
                  << "\n";
    }
    return 0;
}

// ----------------------------------------------------------------------
// noise

struct NoiseArgs {
    std::string dataset_path;
    std::string lang_pair = "src-tgt";
    std::string dialect = "all";
    std::string out_dir;
    double rate = 0.15;
    std::uint64_t seed = 0;
    long long min_count = 1000;
    std::vector<std::string> targets = {"source", "hypothesis", "reference"};
    std::vector<std::string> operations = {"substitute", "delete", "insert"};
    std::vector<std::string> source_corpus;
    std::vector<std::string> target_corpus;
    bool allow_missing_reference = false;
    int threads = 1;
};

int cmd_noise(const NoiseArgs& args) {
    require_file(args.dataset_path);
    EvalDataset dataset = load_dataset(
        args.dataset_path, {.lang_pair = args.lang_pair,
                            .dialect_region = args.dialect,
                            .allow_missing_reference = args.allow_missing_reference});

    NoiseConfig cfg;
    cfg.rate = args.rate;
    cfg.seed = args.seed;
    cfg.targets.clear();
    for (const auto& name : args.targets) cfg.targets.insert(noise_target_from_name(name));
    cfg.operations.clear();
    for (const auto& name : args.operations) cfg.operations.insert(noise_op_from_name(name));

    // Alphabets come from external corpora when given, otherwise from the
    // dataset's own text.
    std::vector<std::string> source_text, target_text;
    if (args.source_corpus.empty()) {
        for (const auto& seg : dataset.segments) source_text.push_back(seg.source);
    } else {
        for (const auto& path : args.source_corpus) {
            require_file(path);
            auto lines = read_lines(path);
            source_text.insert(source_text.end(), lines.begin(), lines.end());
        }
    }
    if (args.target_corpus.empty()) {
        for (const auto& seg : dataset.segments) {
            if (!seg.reference_missing) target_text.push_back(seg.reference);
        }
        for (const auto& [system_id, hyps] : dataset.hypotheses) {
            target_text.insert(target_text.end(), hyps.begin(), hyps.end());
        }
    } else {
        for (const auto& path : args.target_corpus) {
            require_file(path);
            auto lines = read_lines(path);
            target_text.insert(target_text.end(), lines.begin(), lines.end());
        }
    }

    std::map<std::string, Alphabet> alphabets;
    alphabets[dataset.source_language()] =
        build_alphabet(source_text, dataset.source_language(), args.min_count);
    alphabets[dataset.target_language()] =
        build_alphabet(target_text, dataset.target_language(), args.min_count);

    for (const auto& [language, alphabet] : alphabets) {
        bool needed = (language == dataset.source_language() &&
                       cfg.targets.count(NoiseTarget::source)) ||
                      (language == dataset.target_language() &&
                       (cfg.targets.count(NoiseTarget::hypothesis) ||
                        cfg.targets.count(NoiseTarget::reference)));
        if (needed && alphabet.empty() && cfg.rate > 0.0) {
            throw ValidationError(
                "alphabet for language '" + language + "' is empty: no character occurs more "
                "than " + std::to_string(args.min_count) +
                " times; lower --min-count or provide a larger corpus");
        }
    }

    auto [noised, logs] = noise_dataset(dataset, alphabets, cfg, args.threads);

    ensure_dir(args.out_dir);
    write_dataset(args.out_dir + "/noised.jsonl", noised);
    write_file(args.out_dir + "/noise_log.jsonl", noise_log_to_jsonl(logs));

    ordered_json manifest;
    manifest["command"] = "noise";
    manifest["version"] = DIALEVAL_VERSION;
    manifest["dataset"] = args.dataset_path;
    manifest["lang_pair"] = dataset.lang_pair;
    manifest["rate"] = cfg.rate;
    manifest["seed"] = cfg.seed;
    manifest["min_count"] = args.min_count;
    manifest["targets"] = args.targets;
    manifest["operations"] = args.operations;
    ordered_json hashes = ordered_json::object();
    char buf[32];
    for (const auto& [language, alphabet] : alphabets) {
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(alphabet.content_hash()));
        hashes[language] = buf;
    }
    manifest["alphabet_hash"] = hashes;
    write_file(args.out_dir + "/manifest.json", manifest.dump(2) + "\n");

    long long edits = 0;
    for (const auto& log : logs) edits += static_cast<long long>(log.edits.size());
    std::cout << "noised " << dataset.segments.size() << " segments, " << edits
              << " edits -> " << args.out_dir << "/noised.jsonl\n";
    return 0;
}

// ----------------------------------------------------------------------
// challenge

struct ChallengeBuildArgs {
    std::string dataset_path;
    std::string judgments_path;
    std::string lang_pair = "src-tgt";
    std::string dialect = "all";
    double threshold = 100.0;
    std::uint64_t seed = 0;
    std::string out_path;
};

int cmd_challenge_build(const ChallengeBuildArgs& args) {
    require_file(args.dataset_path);
    require_file(args.judgments_path);
    EvalDataset dataset = load_dataset(
        args.dataset_path, {.lang_pair = args.lang_pair, .dialect_region = args.dialect});
    JudgmentSet judgments = load_judgments(args.judgments_path, dataset);
    auto pairs = extract_perfect_pairs(dataset, judgments, args.threshold);
    auto rows = make_worksheet(pairs, args.seed);
    write_worksheet(args.out_path, rows);
    std::cout << "wrote " << rows.size() << " worksheet rows -> " << args.out_path << "\n";
    return 0;
}

struct ChallengeEvalArgs {
    std::string triples_path;
    std::vector<std::string> metrics;
    std::vector<std::string> triple_scores;
    std::string out_path;
};

// metric_id \t pair_id \t s_a \t s_b \t s_c
std::map<std::string, std::map<std::string, std::array<double, 3>>> load_triple_scores(
    const std::string& path) {
    auto rows = read_tsv(path, {"metric_id", "pair_id", "s_a", "s_b", "s_c"});
    std::map<std::string, std::map<std::string, std::array<double, 3>>> by_metric;
    std::size_t rowno = 1;
    for (const auto& row : rows) {
        ++rowno;
        std::string where = path + ":" + std::to_string(rowno);
        auto& slot = by_metric[row[0]][row[1]];
        slot[0] = parse_double(row[2], where);
        slot[1] = parse_double(row[3], where);
        slot[2] = parse_double(row[4], where);
    }
    return by_metric;
}

// Aligns precomputed (s_a, s_b, s_c) rows with the triple list by pair_id.
std::vector<std::array<double, 3>> align_triple_scores(
    const std::string& metric_id,
    const std::map<std::string, std::array<double, 3>>& scores,
    const std::vector<ChallengeTriple>& triples) {
    std::vector<std::array<double, 3>> aligned;
    aligned.reserve(triples.size());
    for (const auto& triple : triples) {
        auto it = scores.find(triple.pair.pair_id);
        if (it == scores.end()) {
            throw ValidationError("triple scores for metric '" + metric_id + "' missing pair " +
                                  triple.pair.pair_id);
        }
        aligned.push_back(it->second);
    }
    return aligned;
}

int cmd_challenge_eval(const ChallengeEvalArgs& args) {
    require_file(args.triples_path);
    auto triples = load_triples(args.triples_path);

    std::vector<std::pair<std::string, SuccessReport>> reports;
    for (const auto& name : args.metrics) {
        MetricConfig metric = metric_preset(name);
        TripleScorer scorer = [&metric](const std::string&, const std::string& reference,
                                        const std::string& hyp) {
            return metric.score_sentence(hyp, reference);
        };
        reports.emplace_back(metric.metric_id(), success_rate(triples, scorer));
    }
    for (const auto& path : args.triple_scores) {
        require_file(path);
        for (const auto& [metric_id, scores] : load_triple_scores(path)) {
            reports.emplace_back(metric_id,
                                 success_rate_from_scores(
                                     triples, align_triple_scores(metric_id, scores, triples)));
        }
    }
    if (reports.empty()) {
        throw ValidationError("challenge eval: no metrics given (use --metric or "
                              "--triple-scores)");
    }

    std::string detail = "metric_id\tpair_id\ts_a\ts_b\ts_c\tsuccess\n";
    for (const auto& [metric_id, report] : reports) {
        std::cout << metric_id << "\tsuccess_rate\t" << format_double(report.success_rate, 4)
                  << "\t(n=" << report.triples.size() << ")\n";
        for (const auto& outcome : report.triples) {
            detail += metric_id + "\t" + outcome.pair_id + "\t" +
                      format_double(outcome.score_a) + "\t" + format_double(outcome.score_b) +
                      "\t" + format_double(outcome.score_c) + "\t" +
                      (outcome.success ? "1" : "0") + "\n";
        }
    }
    if (!args.out_path.empty()) write_file(args.out_path, detail);
    return 0;
}

// ----------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
    std::vector<std::string> datasets;       // DIALECT=PATH
    std::vector<std::string> judgments;      // DIALECT=PATH
    std::vector<std::string> metrics;        // internal metric presets
    std::vector<std::string> scores;         // DIALECT=PATH external score TSVs
    std::vector<std::string> triples;        // DIALECT=PATH completed worksheets
    std::vector<std::string> triple_scores;  // DIALECT=PATH external triple scores
    std::string baseline;
    std::string out_dir;
    std::string lang_pair = "en-gsw";
    double alpha = 0.05;
    int iterations = 1000;
    std::uint64_t seed = 0;
    int threads = 1;
    bool allow_undefined = false;
};

int cmd_evaluate(const EvaluateArgs& args) {
    if (args.datasets.empty()) throw ValidationError("evaluate: at least one --dataset required");

    // Load per-dialect datasets, judgments, triples.
    std::vector<std::string> dialect_order;
    std::map<std::string, EvalDataset> datasets;
    for (const auto& arg : args.datasets) {
        KeyedPath kp = parse_keyed_path(arg, "--dataset");
        require_file(kp.path);
        datasets[kp.key] = load_dataset(kp.path, {.lang_pair = args.lang_pair,
                                                  .dialect_region = kp.key});
        dialect_order.push_back(kp.key);
    }
    std::map<std::string, JudgmentSet> judgments;
    for (const auto& arg : args.judgments) {
        KeyedPath kp = parse_keyed_path(arg, "--judgments");
        require_file(kp.path);
        if (!datasets.count(kp.key)) {
            throw ValidationError("--judgments dialect '" + kp.key + "' has no --dataset");
        }
        judgments[kp.key] = load_judgments(kp.path, datasets.at(kp.key));
    }
    for (const auto& dialect : dialect_order) {
        if (!judgments.count(dialect)) {
            throw ValidationError("no --judgments for dialect '" + dialect + "'");
        }
    }
    std::map<std::string, std::vector<ChallengeTriple>> triples;
    for (const auto& arg : args.triples) {
        KeyedPath kp = parse_keyed_path(arg, "--triples");
        require_file(kp.path);
        triples[kp.key] = load_triples(kp.path);
    }

    // Human gold tables.
    std::vector<DialectBlock> blocks;
    for (const auto& dialect : dialect_order) {
        DialectBlock block;
        block.dialect = dialect;
        block.human_seg = average_judgments(judgments.at(dialect));
        auto missing = missing_grid_keys(block.human_seg, datasets.at(dialect));
        if (!missing.empty()) {
            throw ValidationError("judgments for dialect '" + dialect + "' do not cover the "
                                  "full grid (" + std::to_string(missing.size()) +
                                  " entries missing; every system needs a rating per segment)");
        }
        block.human_sys = system_average(block.human_seg);
        blocks.push_back(std::move(block));
    }

    // Metric tables: internal metrics computed here, external ones loaded.
    std::vector<MetricTables> metric_tables;
    std::vector<std::string> metric_order;
    auto table_for = [&](const std::string& metric_id) -> MetricTables& {
        for (auto& tables : metric_tables) {
            if (tables.metric_id == metric_id) return tables;
        }
        metric_tables.emplace_back();
        metric_tables.back().metric_id = metric_id;
        metric_order.push_back(metric_id);
        return metric_tables.back();
    };

    std::map<std::string, MetricConfig> internal_configs;
    for (const auto& name : args.metrics) {
        MetricConfig metric = metric_preset(name);
        internal_configs[metric.metric_id()] = metric;
        MetricTables& tables = table_for(metric.metric_id());
        for (const auto& dialect : dialect_order) {
            auto [seg, sys] = score_dataset(metric, datasets.at(dialect), args.threads);
            tables.seg[dialect] = std::move(seg);
            tables.sys[dialect] = std::move(sys);
        }
    }
    for (const auto& arg : args.scores) {
        KeyedPath kp = parse_keyed_path(arg, "--scores");
        require_file(kp.path);
        if (!datasets.count(kp.key)) {
            throw ValidationError("--scores dialect '" + kp.key + "' has no --dataset");
        }
        ScoreTable table = load_scores(kp.path, datasets.at(kp.key));
        MetricTables& tables = table_for(table.metric_id);
        if (table.level == ScoreLevel::segment) {
            tables.sys[kp.key] = system_average(table);
            tables.seg[kp.key] = std::move(table);
        } else {
            tables.sys[kp.key] = std::move(table);
        }
    }
    if (metric_tables.empty()) {
        throw ValidationError("evaluate: no metrics (use --metric and/or --scores)");
    }

    // Challenge success per metric per dialect.
    std::map<std::string, std::map<std::string, std::map<std::string, std::array<double, 3>>>>
        external_triple_scores;  // dialect -> metric -> pair -> scores
    for (const auto& arg : args.triple_scores) {
        KeyedPath kp = parse_keyed_path(arg, "--triple-scores");
        require_file(kp.path);
        external_triple_scores[kp.key] = load_triple_scores(kp.path);
    }
    for (auto& tables : metric_tables) {
        for (const auto& [dialect, dialect_triples] : triples) {
            if (internal_configs.count(tables.metric_id)) {
                const MetricConfig& metric = internal_configs.at(tables.metric_id);
                TripleScorer scorer = [&metric](const std::string&, const std::string& reference,
                                                const std::string& hyp) {
                    return metric.score_sentence(hyp, reference);
                };
                tables.success[dialect] = success_rate(dialect_triples, scorer);
            } else {
                auto dialect_it = external_triple_scores.find(dialect);
                if (dialect_it == external_triple_scores.end()) continue;
                auto metric_it = dialect_it->second.find(tables.metric_id);
                if (metric_it == dialect_it->second.end()) continue;
                tables.success[dialect] = success_rate_from_scores(
                    dialect_triples,
                    align_triple_scores(tables.metric_id, metric_it->second, dialect_triples));
            }
        }
    }

    ReportConfig config;
    config.alpha = args.alpha;
    config.baseline_metric = args.baseline;
    config.perm_iterations = args.iterations;
    config.seed = args.seed;
    config.threads = args.threads;
    EvaluationReport report = build_report(blocks, metric_tables, config);

    ensure_dir(args.out_dir);
    ensure_dir(args.out_dir + "/plots");
    ensure_dir(args.out_dir + "/scores");
    write_file(args.out_dir + "/report.tsv", report_to_tsv(report));
    write_file(args.out_dir + "/report.txt", report_to_text(report, args.alpha));

    for (const auto& tables : metric_tables) {
        for (const auto& block : blocks) {
            auto points = pairwise_plot_data(block.human_sys, tables.sys.at(block.dialect),
                                             block.human_seg, args.alpha);
            write_file(args.out_dir + "/plots/" + tables.metric_id + "_" + block.dialect + ".tsv",
                       plot_data_to_tsv(points));
            write_scores(args.out_dir + "/scores/" + tables.metric_id + "_" + block.dialect +
                             "_segment.tsv",
                         tables.seg.at(block.dialect));
            write_scores(args.out_dir + "/scores/" + tables.metric_id + "_" + block.dialect +
                             "_system.tsv",
                         tables.sys.at(block.dialect));
        }
    }

    ordered_json manifest;
    manifest["command"] = "evaluate";
    manifest["version"] = DIALEVAL_VERSION;
    manifest["datasets"] = args.datasets;
    manifest["judgments"] = args.judgments;
    manifest["metrics"] = args.metrics;
    manifest["scores"] = args.scores;
    manifest["triples"] = args.triples;
    manifest["triple_scores"] = args.triple_scores;
    manifest["baseline"] = args.baseline;
    manifest["alpha"] = args.alpha;
    manifest["iterations"] = args.iterations;
    manifest["seed"] = args.seed;
    manifest["lang_pair"] = args.lang_pair;
    ordered_json signatures = ordered_json::object();
    for (const auto& [metric_id, metric] : internal_configs) {
        signatures[metric_id] = metric_signature(metric);
    }
    manifest["metric_signatures"] = signatures;
    write_file(args.out_dir + "/manifest.json", manifest.dump(2) + "\n");

    std::cout << report_to_text(report, args.alpha);

    // Undefined computed statistics fail the run unless waived. Cells whose
    // inputs were never supplied (success rate without triples) do not.
    std::vector<std::string> undefined;
    for (const auto& [key, cell] : report.cells) {
        if (cell.value || cell.undefined_reason == "not_computed") continue;
        undefined.push_back(std::get<0>(key) + "/" + std::get<1>(key) + "/" + std::get<2>(key) +
                            ": " + cell.undefined_reason);
    }
    if (!undefined.empty() && !args.allow_undefined) {
        std::cerr << "undefined statistics (pass --allow-undefined to accept):\n";
        for (const auto& line : undefined) std::cerr << "  " << line << "\n";
        return 2;
    }
    return 0;
}

// ----------------------------------------------------------------------
// report

int cmd_report(const std::string& input, const std::string& out, double alpha) {
    require_file(input);
    EvaluationReport report = report_from_tsv(input);
    std::string text = report_to_text(report, alpha);
    if (out.empty()) {
        std::cout << text;
    } else {
        write_file(out, text);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MT metric robustness evaluation for non-standardized dialects"};
    app.require_subcommand(1);
    app.set_version_flag("--version", DIALEVAL_VERSION);

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "Score a dataset with a string metric");
    score->add_option("--dataset", score_args.dataset_path, "Dataset JSONL")->required();
    score->add_option("--lang-pair", score_args.lang_pair, "Language pair, e.g. en-gsw_be");
    score->add_option("--dialect", score_args.dialect, "Dialect region label");
    score->add_option("--metric", score_args.metric_name, "bleu | chrf | chrf++");
    score->add_option("--out", score_args.out_dir, "Output directory")->required();
    score->add_option("--word-order", score_args.word_order, "chrF word n-gram order (2 = chrF++)");
    score->add_option("--char-order", score_args.char_order, "chrF character n-gram order");
    score->add_option("--beta", score_args.beta, "chrF beta");
    score->add_option("--max-order", score_args.max_order, "BLEU max n-gram order");
    score->add_flag("--effective-order", score_args.effective_order,
                    "BLEU: average only over orders with n-grams");
    score->add_flag("--lowercase", score_args.lowercase, "BLEU: lowercase before scoring");
    score->add_flag("--keep-space", score_args.keep_space, "chrF: keep whitespace in n-grams");
    score->add_flag("--allow-missing-reference", score_args.allow_missing_reference,
                    "Accept records with null references");
    score->add_option("--threads", score_args.threads, "Worker threads");

    NoiseArgs noise_args;
    auto* noise = app.add_subcommand("noise", "Inject character-level noise into a dataset");
    noise->add_option("--dataset", noise_args.dataset_path, "Dataset JSONL")->required();
    noise->add_option("--lang-pair", noise_args.lang_pair, "Language pair, e.g. en-gsw_be");
    noise->add_option("--dialect", noise_args.dialect, "Dialect region label");
    noise->add_option("--out", noise_args.out_dir, "Output directory")->required();
    noise->add_option("--rate", noise_args.rate, "Fraction of tokens to edit (default 0.15)");
    noise->add_option("--seed", noise_args.seed, "RNG seed");
    noise->add_option("--min-count", noise_args.min_count,
                      "Alphabet threshold: keep chars occurring more than this many times");
    noise->add_option("--targets", noise_args.targets,
                      "Fields to noise: source hypothesis reference")->delimiter(',');
    noise->add_option("--operations", noise_args.operations,
                      "Edit operations: substitute delete insert")->delimiter(',');
    noise->add_option("--source-corpus", noise_args.source_corpus,
                      "Plain-text corpus for the source-language alphabet");
    noise->add_option("--target-corpus", noise_args.target_corpus,
                      "Plain-text corpus for the target-language alphabet");
    noise->add_flag("--allow-missing-reference", noise_args.allow_missing_reference,
                    "Accept records with null references");
    noise->add_option("--threads", noise_args.threads, "Worker threads");

    auto* challenge = app.add_subcommand("challenge", "Build or evaluate the challenge set");
    challenge->require_subcommand(1);

    ChallengeBuildArgs build_args;
    auto* challenge_build = challenge->add_subcommand(
        "build", "Extract perfect-rated hypothesis pairs into an annotation worksheet");
    challenge_build->add_option("--dataset", build_args.dataset_path, "Dataset JSONL")->required();
    challenge_build->add_option("--judgments", build_args.judgments_path, "Judgments TSV")
        ->required();
    challenge_build->add_option("--lang-pair", build_args.lang_pair, "Language pair");
    challenge_build->add_option("--dialect", build_args.dialect, "Dialect region label");
    challenge_build->add_option("--threshold", build_args.threshold,
                                "Perfect-rating threshold (default 100)");
    challenge_build->add_option("--seed", build_args.seed, "RNG seed for operation assignment");
    challenge_build->add_option("--out", build_args.out_path, "Worksheet TSV path")->required();

    ChallengeEvalArgs eval_args;
    auto* challenge_eval = challenge->add_subcommand(
        "eval", "Compute success rates over completed challenge triples");
    challenge_eval->add_option("--triples", eval_args.triples_path, "Completed worksheet TSV")
        ->required();
    challenge_eval->add_option("--metric", eval_args.metrics,
                               "Internal metric(s): bleu | chrf | chrf++");
    challenge_eval->add_option("--triple-scores", eval_args.triple_scores,
                               "Precomputed triple scores TSV (metric_id, pair_id, s_a, s_b, s_c)");
    challenge_eval->add_option("--out", eval_args.out_path, "Per-triple outcome TSV");

    EvaluateArgs evaluate_args;
    auto* evaluate = app.add_subcommand(
        "evaluate", "Run the full meta-evaluation and emit a report");
    evaluate->add_option("--dataset", evaluate_args.datasets, "DIALECT=PATH dataset JSONL")
        ->required();
    evaluate->add_option("--judgments", evaluate_args.judgments, "DIALECT=PATH judgments TSV")
        ->required();
    evaluate->add_option("--metric", evaluate_args.metrics,
                         "Internal metric(s): bleu | chrf | chrf++");
    evaluate->add_option("--scores", evaluate_args.scores, "DIALECT=PATH external score TSV");
    evaluate->add_option("--triples", evaluate_args.triples,
                         "DIALECT=PATH completed challenge worksheet");
    evaluate->add_option("--triple-scores", evaluate_args.triple_scores,
                         "DIALECT=PATH precomputed triple scores for external metrics");
    evaluate->add_option("--baseline", evaluate_args.baseline,
                         "Baseline metric id for significance");
    evaluate->add_option("--out", evaluate_args.out_dir, "Output directory")->required();
    evaluate->add_option("--lang-pair", evaluate_args.lang_pair, "Language pair");
    evaluate->add_option("--alpha", evaluate_args.alpha, "Wilcoxon gate level (default 0.05)");
    evaluate->add_option("--iterations", evaluate_args.iterations,
                         "Permutation iterations (default 1000)");
    evaluate->add_option("--seed", evaluate_args.seed, "RNG seed");
    evaluate->add_option("--threads", evaluate_args.threads, "Worker threads");
    evaluate->add_flag("--allow-undefined", evaluate_args.allow_undefined,
                       "Do not fail on undefined statistics");

    std::string report_input, report_out;
    double report_alpha = 0.05;
    auto* report = app.add_subcommand("report", "Render a report TSV as an aligned text table");
    report->add_option("--input", report_input, "report.tsv from evaluate")->required();
    report->add_option("--out", report_out, "Write the table here instead of stdout");
    report->add_option("--alpha", report_alpha, "Significance marker level");

    try {
        app.parse(argc, argv);
        if (*score) return cmd_score(score_args);
        if (*noise) return cmd_noise(noise_args);
        if (*challenge_build) return cmd_challenge_build(build_args);
        if (*challenge_eval) return cmd_challenge_eval(eval_args);
        if (*evaluate) return cmd_evaluate(evaluate_args);
        if (*report) return cmd_report(report_input, report_out, report_alpha);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
