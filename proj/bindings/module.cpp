#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dialeval/challenge.hpp"
#include "dialeval/corpus.hpp"
#include "dialeval/metrics.hpp"
#include "dialeval/noise.hpp"
#include "dialeval/report.hpp"
#include "dialeval/stats.hpp"
#include "dialeval/tokenize.hpp"
#include "dialeval/unicode.hpp"
#include "dialeval/util.hpp"

namespace py = pybind11;
using namespace dialeval;

namespace {

py::dict ngram_dict(const NgramCounts& counts) {
    py::dict out;
    for (const auto& [key, count] : counts.counts) out[py::str(key)] = count;
    return out;
}

py::dict edit_dict(const NoiseEdit& edit) {
    py::dict out;
    out["token"] = edit.token_index;
    out["op"] = noise_op_name(edit.op);
    out["pos"] = edit.char_position;
    if (!edit.old_char.empty()) out["old"] = edit.old_char;
    if (!edit.new_char.empty()) out["new"] = edit.new_char;
    return out;
}

ScoreTable segment_table_from_dict(const std::string& metric_id, const py::dict& entries) {
    ScoreTable table;
    table.metric_id = metric_id;
    table.level = ScoreLevel::segment;
    for (const auto& item : entries) {
        auto key = item.first.cast<std::tuple<std::string, std::string, int>>();
        table.segment_entries[{std::get<0>(key), std::get<1>(key), std::get<2>(key)}] =
            item.second.cast<double>();
    }
    return table;
}

ScoreTable system_table_from_dict(const std::string& metric_id, const py::dict& entries) {
    ScoreTable table;
    table.metric_id = metric_id;
    table.level = ScoreLevel::system;
    for (const auto& item : entries) {
        table.system_entries[item.first.cast<std::string>()] = item.second.cast<double>();
    }
    return table;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "MT metric robustness evaluation for non-standardized dialects";
    m.attr("__version__") = DIALEVAL_VERSION;

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    // ---- tokenize ----
    m.def("nfc_normalize", [](const std::string& text) { return nfc_normalize(text); },
          py::arg("text"));
    m.def("tokenize_13a", [](const std::string& text) { return tokenize_13a(text); },
          py::arg("text"));
    m.def("whitespace_tokenize",
          [](const std::string& text) { return whitespace_tokenize(text); }, py::arg("text"));
    m.def("char_ngrams",
          [](const std::string& text, int n, bool remove_space) {
              return ngram_dict(char_ngrams(text, n, remove_space));
          },
          py::arg("text"), py::arg("n"), py::arg("remove_space") = true);
    m.def("word_ngrams",
          [](const TokenList& tokens, int n) { return ngram_dict(word_ngrams(tokens, n)); },
          py::arg("tokens"), py::arg("n"));

    // ---- corpus ----
    py::class_<Segment>(m, "Segment")
        .def_readonly("doc_id", &Segment::doc_id)
        .def_readonly("seg_index", &Segment::seg_index)
        .def_readonly("source", &Segment::source)
        .def_readonly("reference", &Segment::reference)
        .def_readonly("reference_missing", &Segment::reference_missing);

    py::class_<EvalDataset>(m, "EvalDataset")
        .def_readonly("lang_pair", &EvalDataset::lang_pair)
        .def_readonly("dialect_region", &EvalDataset::dialect_region)
        .def_readonly("segments", &EvalDataset::segments)
        .def_readonly("system_ids", &EvalDataset::system_ids)
        .def("hypothesis",
             [](const EvalDataset& ds, const std::string& system_id, const std::string& doc_id,
                int seg_index) { return ds.hypothesis(system_id, {doc_id, seg_index}); },
             py::arg("system_id"), py::arg("doc_id"), py::arg("seg_index"))
        .def("to_jsonl", &dataset_to_jsonl)
        .def("__len__", [](const EvalDataset& ds) { return ds.segments.size(); });

    m.def("load_dataset",
          [](const std::string& path, const std::string& lang_pair, const std::string& dialect,
             bool allow_missing_reference) {
              return load_dataset(path, {lang_pair, dialect, allow_missing_reference});
          },
          py::arg("path"), py::arg("lang_pair") = "", py::arg("dialect") = "",
          py::arg("allow_missing_reference") = false);
    m.def("write_dataset", &write_dataset, py::arg("path"), py::arg("dataset"));

    py::class_<JudgmentSet>(m, "JudgmentSet")
        .def("__len__", [](const JudgmentSet& j) { return j.records.size(); });
    m.def("load_judgments", &load_judgments, py::arg("path"), py::arg("dataset"));

    py::class_<ScoreTable>(m, "ScoreTable")
        .def_static("segment", &segment_table_from_dict, py::arg("metric_id"),
                    py::arg("entries"),
                    "Build a segment-level table from {(system, doc, seg): score}")
        .def_static("system", &system_table_from_dict, py::arg("metric_id"), py::arg("entries"),
                    "Build a system-level table from {system: score}")
        .def_readonly("metric_id", &ScoreTable::metric_id)
        .def_property_readonly("level",
                               [](const ScoreTable& t) {
                                   return t.level == ScoreLevel::segment ? "segment" : "system";
                               })
        .def_property_readonly("segment_entries",
                               [](const ScoreTable& t) {
                                   py::dict out;
                                   for (const auto& [key, v] : t.segment_entries) {
                                       out[py::make_tuple(key.system_id, key.doc_id,
                                                          key.seg_index)] = v;
                                   }
                                   return out;
                               })
        .def_property_readonly("system_entries",
                               [](const ScoreTable& t) {
                                   py::dict out;
                                   for (const auto& [key, v] : t.system_entries) {
                                       out[py::str(key)] = v;
                                   }
                                   return out;
                               })
        .def("to_tsv", &scores_to_tsv);

    m.def("load_scores", &load_scores, py::arg("path"), py::arg("dataset"));
    m.def("write_scores", &write_scores, py::arg("path"), py::arg("table"));
    m.def("average_judgments", &average_judgments, py::arg("judgments"));
    m.def("system_average", &system_average, py::arg("segment_table"));

    // ---- metrics ----
    py::class_<BleuConfig>(m, "BleuConfig")
        .def(py::init([](int max_order, bool effective_order, bool lowercase) {
                 BleuConfig cfg;
                 cfg.max_order = max_order;
                 cfg.effective_order = effective_order;
                 cfg.lowercase = lowercase;
                 return cfg;
             }),
             py::arg("max_order") = 4, py::arg("effective_order") = false,
             py::arg("lowercase") = false)
        .def_readwrite("max_order", &BleuConfig::max_order)
        .def_readwrite("effective_order", &BleuConfig::effective_order)
        .def_readwrite("lowercase", &BleuConfig::lowercase)
        .def("signature", &BleuConfig::signature);

    py::class_<ChrfConfig>(m, "ChrfConfig")
        .def(py::init([](int char_order, int word_order, double beta, bool remove_space,
                         bool effective_order) {
                 ChrfConfig cfg;
                 cfg.char_order = char_order;
                 cfg.word_order = word_order;
                 cfg.beta = beta;
                 cfg.remove_space = remove_space;
                 cfg.effective_order = effective_order;
                 return cfg;
             }),
             py::arg("char_order") = 6, py::arg("word_order") = 0, py::arg("beta") = 2.0,
             py::arg("remove_space") = true, py::arg("effective_order") = true)
        .def_readwrite("char_order", &ChrfConfig::char_order)
        .def_readwrite("word_order", &ChrfConfig::word_order)
        .def_readwrite("beta", &ChrfConfig::beta)
        .def_readwrite("remove_space", &ChrfConfig::remove_space)
        .def_readwrite("effective_order", &ChrfConfig::effective_order)
        .def("signature", &ChrfConfig::signature)
        .def("metric_id", &ChrfConfig::metric_id);

    py::class_<MetricScore>(m, "MetricScore")
        .def_readonly("value", &MetricScore::value)
        .def_readonly("components", &MetricScore::components)
        .def("__float__", [](const MetricScore& s) { return s.value; })
        .def("__repr__", [](const MetricScore& s) {
            return "MetricScore(" + format_double(s.value, 4) + ")";
        });

    m.def("bleu_corpus", &bleu_corpus, py::arg("hyps"), py::arg("refs"),
          py::arg("config") = BleuConfig{});
    m.def("bleu_sentence", &bleu_sentence, py::arg("hyp"), py::arg("ref"),
          py::arg("config") = BleuConfig{});
    m.def("chrf_corpus", &chrf_corpus, py::arg("hyps"), py::arg("refs"),
          py::arg("config") = ChrfConfig{});
    m.def("chrf_sentence", &chrf_sentence, py::arg("hyp"), py::arg("ref"),
          py::arg("config") = ChrfConfig{});
    m.def("parse_bleu_signature", &parse_bleu_signature, py::arg("signature"));
    m.def("parse_chrf_signature", &parse_chrf_signature, py::arg("signature"));

    m.def("score_dataset",
          [](const std::string& metric, const EvalDataset& dataset, int threads,
             const std::optional<BleuConfig>& bleu, const std::optional<ChrfConfig>& chrf) {
              MetricConfig cfg;
              if (metric == "bleu") {
                  cfg.kind = MetricKind::bleu;
                  if (bleu) cfg.bleu = *bleu;
              } else if (metric == "chrf" || metric == "chrf++") {
                  cfg.kind = MetricKind::chrf;
                  if (chrf) cfg.chrf = *chrf;
                  if (metric == "chrf++" && !chrf) cfg.chrf.word_order = 2;
              } else {
                  throw ValidationError("unknown metric '" + metric + "'");
              }
              return score_dataset(cfg, dataset, threads);
          },
          py::arg("metric"), py::arg("dataset"), py::arg("threads") = 1,
          py::arg("bleu_config") = std::nullopt, py::arg("chrf_config") = std::nullopt,
          "Returns (segment_table, system_table)");

    // ---- noise ----
    py::class_<Alphabet>(m, "Alphabet")
        .def_readonly("language", &Alphabet::language)
        .def_readonly("min_count", &Alphabet::min_count)
        .def_property_readonly("chars",
                               [](const Alphabet& a) {
                                   std::vector<std::string> out;
                                   for (char32_t c : a.chars) out.push_back(utf8_encode({c}));
                                   return out;
                               })
        .def("__len__", [](const Alphabet& a) { return a.chars.size(); });

    m.def("build_alphabet", &build_alphabet, py::arg("corpus"), py::arg("language"),
          py::arg("min_count") = 1000);

    py::class_<NoiseConfig>(m, "NoiseConfig")
        .def(py::init([](double rate, std::uint64_t seed,
                         const std::vector<std::string>& operations,
                         const std::vector<std::string>& targets) {
                 NoiseConfig cfg;
                 cfg.rate = rate;
                 cfg.seed = seed;
                 cfg.operations.clear();
                 for (const auto& name : operations) {
                     cfg.operations.insert(noise_op_from_name(name));
                 }
                 cfg.targets.clear();
                 for (const auto& name : targets) {
                     cfg.targets.insert(noise_target_from_name(name));
                 }
                 return cfg;
             }),
             py::arg("rate") = 0.15, py::arg("seed") = 0,
             py::arg("operations") =
                 std::vector<std::string>{"substitute", "delete", "insert"},
             py::arg("targets") =
                 std::vector<std::string>{"source", "hypothesis", "reference"})
        .def_readwrite("rate", &NoiseConfig::rate)
        .def_readwrite("seed", &NoiseConfig::seed);

    m.def("noise_sentence",
          [](const TokenList& tokens, const Alphabet& alphabet, const NoiseConfig& cfg,
             std::uint64_t stream_seed) {
              Rng rng(stream_seed);
              auto [out, log] = noise_sentence(tokens, alphabet, cfg, rng);
              py::list edits;
              for (const auto& edit : log) edits.append(edit_dict(edit));
              return py::make_tuple(out, edits);
          },
          py::arg("tokens"), py::arg("alphabet"), py::arg("config"), py::arg("stream_seed"),
          "Apply one seeded noise pass to a token list; returns (tokens, edits)");

    m.def("noise_dataset",
          [](const EvalDataset& dataset, const std::map<std::string, Alphabet>& alphabets,
             const NoiseConfig& cfg, int threads) {
              auto [out, logs] = noise_dataset(dataset, alphabets, cfg, threads);
              py::list log_list;
              for (const auto& log : logs) {
                  py::dict rec;
                  rec["doc_id"] = log.doc_id;
                  rec["seg_index"] = log.seg_index;
                  rec["field"] = log.field;
                  py::list edits;
                  for (const auto& edit : log.edits) edits.append(edit_dict(edit));
                  rec["edits"] = edits;
                  log_list.append(rec);
              }
              return py::make_tuple(out, log_list);
          },
          py::arg("dataset"), py::arg("alphabets"), py::arg("config"), py::arg("threads") = 1);

    // ---- challenge ----
    py::class_<EquivalentPair>(m, "EquivalentPair")
        .def_readonly("pair_id", &EquivalentPair::pair_id)
        .def_readonly("doc_id", &EquivalentPair::doc_id)
        .def_readonly("seg_index", &EquivalentPair::seg_index)
        .def_readonly("source", &EquivalentPair::source)
        .def_readonly("reference", &EquivalentPair::reference)
        .def_readonly("hyp_a", &EquivalentPair::hyp_a)
        .def_readonly("hyp_b", &EquivalentPair::hyp_b)
        .def_readonly("system_a", &EquivalentPair::system_a)
        .def_readonly("system_b", &EquivalentPair::system_b);

    py::class_<WorksheetRow>(m, "WorksheetRow")
        .def_readonly("pair", &WorksheetRow::pair)
        .def_property_readonly("operation",
                               [](const WorksheetRow& row) {
                                   return edit_operation_name(row.operation);
                               })
        .def_property_readonly("edited_from", [](const WorksheetRow& row) {
            return std::string(1, row.edited_from);
        });

    py::class_<ChallengeTriple>(m, "ChallengeTriple")
        .def_readonly("pair", &ChallengeTriple::pair)
        .def_readonly("hyp_c", &ChallengeTriple::hyp_c)
        .def_property_readonly("operation", [](const ChallengeTriple& t) {
            return edit_operation_name(t.operation);
        });

    py::class_<TripleOutcome>(m, "TripleOutcome")
        .def_readonly("pair_id", &TripleOutcome::pair_id)
        .def_readonly("score_a", &TripleOutcome::score_a)
        .def_readonly("score_b", &TripleOutcome::score_b)
        .def_readonly("score_c", &TripleOutcome::score_c)
        .def_readonly("success", &TripleOutcome::success);

    py::class_<SuccessReport>(m, "SuccessReport")
        .def_readonly("triples", &SuccessReport::triples)
        .def_readonly("successes", &SuccessReport::successes)
        .def_readonly("success_rate", &SuccessReport::success_rate);

    m.def("extract_perfect_pairs", &extract_perfect_pairs, py::arg("dataset"),
          py::arg("judgments"), py::arg("threshold") = 100.0);
    m.def("make_worksheet", &make_worksheet, py::arg("pairs"), py::arg("seed"));
    m.def("write_worksheet", &write_worksheet, py::arg("path"), py::arg("rows"));
    m.def("load_triples", &load_triples, py::arg("path"));
    m.def("success_rate",
          [](const std::vector<ChallengeTriple>& triples, const py::function& scorer) {
              TripleScorer wrapped = [&scorer](const std::string& source,
                                               const std::string& reference,
                                               const std::string& hyp) {
                  return scorer(source, reference, hyp).cast<double>();
              };
              return success_rate(triples, wrapped);
          },
          py::arg("triples"), py::arg("scorer"),
          "scorer(source, reference, hypothesis) -> float");
    m.def("success_rate_from_scores", &success_rate_from_scores, py::arg("triples"),
          py::arg("scores"));

    // ---- stats ----
    py::class_<CorrelationResult>(m, "CorrelationResult")
        .def_readonly("statistic", &CorrelationResult::statistic)
        .def_readonly("n", &CorrelationResult::n)
        .def_readonly("p_value", &CorrelationResult::p_value);

    py::class_<PairwiseComparison>(m, "PairwiseComparison")
        .def_readonly("sys_i", &PairwiseComparison::sys_i)
        .def_readonly("sys_j", &PairwiseComparison::sys_j)
        .def_readonly("human_delta", &PairwiseComparison::human_delta)
        .def_readonly("metric_delta", &PairwiseComparison::metric_delta)
        .def_readonly("significant", &PairwiseComparison::significant)
        .def_readonly("agree", &PairwiseComparison::agree);

    py::class_<PairwiseResult>(m, "PairwiseResult")
        .def_readonly("pairs", &PairwiseResult::pairs)
        .def_readonly("accuracy", &PairwiseResult::accuracy)
        .def_readonly("n_significant", &PairwiseResult::n_significant);

    py::class_<TieOptimizedResult>(m, "TieOptimizedResult")
        .def_readonly("epsilon_star", &TieOptimizedResult::epsilon_star)
        .def_readonly("accuracy", &TieOptimizedResult::accuracy)
        .def_readonly("n_pairs", &TieOptimizedResult::n_pairs);

    m.def("pearson", &pearson, py::arg("x"), py::arg("y"));
    m.def("wilcoxon_two_sided", &wilcoxon_two_sided, py::arg("x"), py::arg("y"));
    m.def("pairwise_accuracy", &pairwise_accuracy, py::arg("human_sys"), py::arg("metric_sys"),
          py::arg("human_seg"), py::arg("alpha") = 0.05, py::arg("gate") = true);
    m.def("kendall_segment", &kendall_segment, py::arg("human_seg"), py::arg("metric_seg"));
    m.def("tie_optimized_accuracy", &tie_optimized_accuracy, py::arg("human_seg"),
          py::arg("metric_seg"));
    m.def("perm_significance",
          [](const std::string& statistic, const ScoreTable& human_sys,
             const ScoreTable& metric_a_sys, const ScoreTable& metric_b_sys,
             const ScoreTable& human_seg, const ScoreTable& metric_a_seg,
             const ScoreTable& metric_b_seg, int iterations, std::uint64_t seed, double alpha,
             int threads) {
              PermStatistic stat;
              if (statistic == "pairwise_accuracy") {
                  stat = PermStatistic::pairwise_accuracy;
              } else if (statistic == "kendall") {
                  stat = PermStatistic::kendall;
              } else if (statistic == "pearson") {
                  stat = PermStatistic::pearson;
              } else if (statistic == "tie_optimized") {
                  stat = PermStatistic::tie_optimized;
              } else {
                  throw ValidationError("unknown statistic '" + statistic + "'");
              }
              PermInputs inputs;
              inputs.human_sys = human_sys;
              inputs.metric_a_sys = metric_a_sys;
              inputs.metric_b_sys = metric_b_sys;
              inputs.human_seg = human_seg;
              inputs.metric_a_seg = metric_a_seg;
              inputs.metric_b_seg = metric_b_seg;
              inputs.alpha = alpha;
              return perm_significance(stat, inputs, iterations, seed, threads);
          },
          py::arg("statistic"), py::arg("human_sys") = ScoreTable{},
          py::arg("metric_a_sys") = ScoreTable{}, py::arg("metric_b_sys") = ScoreTable{},
          py::arg("human_seg") = ScoreTable{}, py::arg("metric_a_seg") = ScoreTable{},
          py::arg("metric_b_seg") = ScoreTable{}, py::arg("iterations") = 1000,
          py::arg("seed") = 0, py::arg("alpha") = 0.05, py::arg("threads") = 1);

    // ---- report ----
    py::class_<PairwisePlotPoint>(m, "PairwisePlotPoint")
        .def_readonly("sys_i", &PairwisePlotPoint::sys_i)
        .def_readonly("sys_j", &PairwisePlotPoint::sys_j)
        .def_readonly("human_delta", &PairwisePlotPoint::human_delta)
        .def_readonly("metric_delta", &PairwisePlotPoint::metric_delta)
        .def_readonly("significant", &PairwisePlotPoint::significant);

    m.def("pairwise_plot_data", &pairwise_plot_data, py::arg("human_sys"),
          py::arg("metric_sys"), py::arg("human_seg"), py::arg("alpha") = 0.05);
    m.def("plot_data_to_tsv", &plot_data_to_tsv, py::arg("points"));
}
