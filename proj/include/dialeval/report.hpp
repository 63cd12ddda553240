#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "dialeval/challenge.hpp"
#include "dialeval/corpus.hpp"
#include "dialeval/stats.hpp"

namespace dialeval {

// One dialect's human gold tables.
struct DialectBlock {
    std::string dialect;    // e.g. "BE"
    ScoreTable human_seg;   // averaged judgments
    ScoreTable human_sys;   // per-system mean of human_seg
};

// One metric's tables per dialect, plus optional challenge outcomes.
struct MetricTables {
    std::string metric_id;
    std::map<std::string, ScoreTable> seg;              // dialect -> segment table
    std::map<std::string, ScoreTable> sys;              // dialect -> system table
    std::map<std::string, SuccessReport> success;       // dialect -> challenge outcome
};

struct ReportConfig {
    double alpha = 0.05;
    std::string baseline_metric;  // empty: no significance column
    int perm_iterations = 1000;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct ReportCell {
    std::optional<double> value;
    long long n = 0;
    std::optional<double> p_vs_baseline;
    std::string undefined_reason;  // set when value is absent
};

// Statistic names used in cell keys and the TSV, in column order.
inline const std::vector<std::string> kReportStatistics = {
    "pairwise_accuracy", "pearson", "tie_optimized_accuracy", "kendall", "success_rate"};

struct EvaluationReport {
    std::vector<std::string> metric_ids;  // row order
    std::vector<std::string> dialects;    // column group order
    // (metric, statistic, dialect); dialect is "-" for the joint pairwise
    // accuracy, which pools system pairs across dialects.
    std::map<std::tuple<std::string, std::string, std::string>, ReportCell> cells;

    const ReportCell* find(const std::string& metric, const std::string& statistic,
                           const std::string& dialect) const;
};

// Computes all five statistics per metric. Pairwise accuracy is one joint
// column over every dialect's system pairs; the other four are per dialect.
// Permutation p-values against the baseline are attached to the pairwise,
// Pearson, and Kendall cells (significance for tie-optimized accuracy and
// success rate is not defined here).
EvaluationReport build_report(const std::vector<DialectBlock>& dialects,
                              const std::vector<MetricTables>& metrics,
                              const ReportConfig& config);

// metric_id \t statistic \t dialect \t value \t n \t p_vs_baseline
std::string report_to_tsv(const EvaluationReport& report);

// Inverse of report_to_tsv (value column "n/a(reason)" parses back to an
// undefined cell). Row order fixes metric and dialect order.
EvaluationReport report_from_tsv(const std::string& path);

// Aligned, human-readable table; '*' marks p < alpha vs the baseline.
std::string report_to_text(const EvaluationReport& report, double alpha);

struct PairwisePlotPoint {
    std::string sys_i;
    std::string sys_j;
    double human_delta = 0.0;
    double metric_delta = 0.0;
    bool significant = false;
};

// One point per unordered system pair, i < j lexicographically.
std::vector<PairwisePlotPoint> pairwise_plot_data(const ScoreTable& human_sys,
                                                  const ScoreTable& metric_sys,
                                                  const ScoreTable& human_seg, double alpha);

// sys_i \t sys_j \t human_delta \t metric_delta \t significant
std::string plot_data_to_tsv(const std::vector<PairwisePlotPoint>& points);

}  // namespace dialeval
