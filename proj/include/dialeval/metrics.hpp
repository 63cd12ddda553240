#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dialeval/corpus.hpp"
#include "dialeval/tokenize.hpp"

namespace dialeval {

enum class BleuTokenizer { thirteen_a };
enum class BleuSmoothing { exponential };

struct BleuConfig {
    int max_order = 4;
    BleuTokenizer tokenizer = BleuTokenizer::thirteen_a;
    BleuSmoothing smoothing = BleuSmoothing::exponential;
    bool effective_order = false;
    bool lowercase = false;

    std::string signature() const;
};

struct ChrfConfig {
    int char_order = 6;
    int word_order = 0;  // 2 gives chrF++
    double beta = 2.0;
    bool remove_space = true;
    bool effective_order = true;

    std::string signature() const;
    std::string metric_id() const;  // "chrf" or "chrf++"
};

BleuConfig parse_bleu_signature(std::string_view signature);
ChrfConfig parse_chrf_signature(std::string_view signature);

struct MetricScore {
    double value = 0.0;                       // always in [0, 100]
    std::map<std::string, double> components; // precisions, bp, lengths, ...
};

// Corpus-level BLEU; n-gram statistics pooled over segments before scoring.
MetricScore bleu_corpus(const std::vector<std::string>& hyps,
                        const std::vector<std::string>& refs, const BleuConfig& cfg = {});

// Same formula over a single segment (smooth:exp applies at both levels).
MetricScore bleu_sentence(const std::string& hyp, const std::string& ref,
                          const BleuConfig& cfg = {});

MetricScore chrf_corpus(const std::vector<std::string>& hyps,
                        const std::vector<std::string>& refs, const ChrfConfig& cfg = {});

MetricScore chrf_sentence(const std::string& hyp, const std::string& ref,
                          const ChrfConfig& cfg = {});

enum class MetricKind { bleu, chrf };

struct MetricConfig {
    MetricKind kind = MetricKind::bleu;
    BleuConfig bleu;
    ChrfConfig chrf;

    std::string metric_id() const;
    double score_sentence(const std::string& hyp, const std::string& ref) const;
};

// Segment table holds sentence-level scores; system table holds corpus-level
// scores over each system's full output (not segment means).
std::pair<ScoreTable, ScoreTable> score_dataset(const MetricConfig& metric,
                                                const EvalDataset& dataset, int threads = 1);

}  // namespace dialeval
