#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dialeval/corpus.hpp"

namespace dialeval {

struct CorrelationResult {
    double statistic = 0.0;  // in [-1, 1]
    long long n = 0;
    std::optional<double> p_value;
};

struct PairwiseComparison {
    std::string sys_i;
    std::string sys_j;
    double human_delta = 0.0;
    double metric_delta = 0.0;
    bool significant = false;
    bool agree = false;
};

struct PairwiseResult {
    std::vector<PairwiseComparison> pairs;
    std::optional<double> accuracy;  // unset when no significant pairs
    long long n_significant = 0;
};

struct TieOptimizedResult {
    double epsilon_star = 0.0;
    double accuracy = 0.0;
    long long n_pairs = 0;
};

// Sample Pearson r. Throws ValidationError on constant input.
CorrelationResult pearson(const std::vector<double>& x, const std::vector<double>& y);

// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
// are dropped; all-zero input gives p = 1. Exact enumeration over sign
// assignments for m <= 20 nonzero differences, normal approximation with
// midrank tie correction and continuity correction beyond that.
double wilcoxon_two_sided(const std::vector<double>& x, const std::vector<double>& y);

// Fraction of significantly-human-separated system pairs where the metric's
// sign of the delta matches the human sign. The gate is a two-sided Wilcoxon
// over paired per-segment human scores at level alpha; magnitudes are
// ignored. gate=false counts every pair as significant.
PairwiseResult pairwise_accuracy(const ScoreTable& human_sys, const ScoreTable& metric_sys,
                                 const ScoreTable& human_seg, double alpha = 0.05,
                                 bool gate = true);

// Within-segment Kendall: pairs are formed only between systems on the same
// (doc, seg); human-tied pairs are discarded; metric ties count 1/2 toward
// concordant and discordant each; tau = (C - D) / (C + D). Unset when no
// comparable pairs exist.
std::optional<CorrelationResult> kendall_segment(const ScoreTable& human_seg,
                                                 const ScoreTable& metric_seg);

// Within-segment three-way label accuracy over {<, =, >}. Humans tie on
// exact equality; the metric ties when |delta| <= epsilon. epsilon* is
// searched over {0}, midpoints of consecutive distinct |delta| values, and
// max |delta|; smallest epsilon wins ties on accuracy.
std::optional<TieOptimizedResult> tie_optimized_accuracy(const ScoreTable& human_seg,
                                                         const ScoreTable& metric_seg);

enum class PermStatistic { pairwise_accuracy, kendall, pearson, tie_optimized };

struct PermInputs {
    // System-level tables (pearson, pairwise_accuracy).
    ScoreTable human_sys;
    ScoreTable metric_a_sys;
    ScoreTable metric_b_sys;
    // Segment-level tables (kendall, tie_optimized; human_seg also gates
    // pairwise_accuracy).
    ScoreTable human_seg;
    ScoreTable metric_a_seg;
    ScoreTable metric_b_seg;
    double alpha = 0.05;  // pairwise gate
};

// Paired permutation test, one-sided for improvement of metric A over B.
// The null swaps A and B scores per system (system-level statistics) or per
// within-segment group (segment-level statistics); p is the fraction of
// permuted statistic deltas >= the observed delta.
double perm_significance(PermStatistic statistic, const PermInputs& inputs,
                         int iterations = 1000, std::uint64_t seed = 0, int threads = 1);

}  // namespace dialeval
