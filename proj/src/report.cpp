#include "dialeval/report.hpp"

#include <algorithm>
#include <cstdio>

#include "dialeval/util.hpp"

namespace dialeval {

namespace {

const char* kJointDialect = "-";

struct PairwiseDialectView {
    std::vector<std::string> systems;
    std::vector<double> human;
    std::vector<double> metric;
    std::vector<double> baseline;
    std::vector<std::pair<std::size_t, std::size_t>> significant_pairs;
};

long long count_agreements(const PairwiseDialectView& view, const std::vector<double>& metric) {
    long long agree = 0;
    for (const auto& [i, j] : view.significant_pairs) {
        int human_sign = (view.human[i] > view.human[j]) - (view.human[i] < view.human[j]);
        int metric_sign = (metric[i] > metric[j]) - (metric[i] < metric[j]);
        if (human_sign == metric_sign) ++agree;
    }
    return agree;
}

// Joint permutation test for the pooled pairwise accuracy: within every
// dialect, metric and baseline system scores are swapped per system.
double joint_pairwise_perm(const std::vector<PairwiseDialectView>& views, double observed_delta,
                           int iterations, std::uint64_t seed) {
    long long total_sig = 0;
    for (const auto& view : views) {
        total_sig += static_cast<long long>(view.significant_pairs.size());
    }
    long long exceedances = 0;
    for (int iter = 0; iter < iterations; ++iter) {
        Rng rng(splitmix64(splitmix64(seed) + static_cast<std::uint64_t>(iter) + 1));
        long long agree_a = 0;
        long long agree_b = 0;
        for (const auto& view : views) {
            std::vector<double> pa = view.metric;
            std::vector<double> pb = view.baseline;
            for (std::size_t s = 0; s < pa.size(); ++s) {
                if (rng.next_below(2) == 1) std::swap(pa[s], pb[s]);
            }
            agree_a += count_agreements(view, pa);
            agree_b += count_agreements(view, pb);
        }
        double delta = static_cast<double>(agree_a - agree_b) / static_cast<double>(total_sig);
        if (delta >= observed_delta) ++exceedances;
    }
    return static_cast<double>(exceedances) / static_cast<double>(iterations);
}

std::string cell_value_text(const ReportCell& cell, int precision) {
    if (!cell.value) return "n/a(" + cell.undefined_reason + ")";
    return format_double(*cell.value, precision);
}

}  // namespace

const ReportCell* EvaluationReport::find(const std::string& metric, const std::string& statistic,
                                         const std::string& dialect) const {
    auto it = cells.find({metric, statistic, dialect});
    return it == cells.end() ? nullptr : &it->second;
}

EvaluationReport build_report(const std::vector<DialectBlock>& dialects,
                              const std::vector<MetricTables>& metrics,
                              const ReportConfig& config) {
    if (dialects.empty()) throw ValidationError("build_report: no dialects");
    if (metrics.empty()) throw ValidationError("build_report: no metrics");
    const MetricTables* baseline = nullptr;
    if (!config.baseline_metric.empty()) {
        for (const auto& metric : metrics) {
            if (metric.metric_id == config.baseline_metric) baseline = &metric;
        }
        if (!baseline) {
            throw ValidationError("build_report: baseline metric '" + config.baseline_metric +
                                  "' not among the evaluated metrics");
        }
    }

    EvaluationReport report;
    for (const auto& dialect : dialects) report.dialects.push_back(dialect.dialect);

    // Misaligned grids are aggregated per metric instead of failing one at a
    // time.
    std::vector<std::string> problems;
    for (const auto& metric : metrics) {
        for (const auto& dialect : dialects) {
            if (!metric.seg.count(dialect.dialect) || !metric.sys.count(dialect.dialect)) {
                problems.push_back(metric.metric_id + ": no tables for dialect '" +
                                   dialect.dialect + "'");
                continue;
            }
            const ScoreTable& seg = metric.seg.at(dialect.dialect);
            for (const auto& [key, v] : dialect.human_seg.segment_entries) {
                if (!seg.segment_entries.count(key)) {
                    problems.push_back(metric.metric_id + " (" + dialect.dialect +
                                       "): segment table missing (" + key.system_id + ", " +
                                       key.doc_id + ", " + std::to_string(key.seg_index) + ")");
                    break;
                }
            }
        }
    }
    if (!problems.empty()) {
        throw ValidationError("build_report: misaligned inputs:\n  " + join(problems, "\n  "));
    }

    // Observed statistics.
    struct JointPairwiseState {
        std::vector<PairwiseDialectView> views;
        long long agreements = 0;
        long long significant = 0;
    };
    std::map<std::string, JointPairwiseState> pairwise_states;

    for (const auto& metric : metrics) {
        report.metric_ids.push_back(metric.metric_id);
        JointPairwiseState& state = pairwise_states[metric.metric_id];

        for (const auto& dialect : dialects) {
            const ScoreTable& metric_seg = metric.seg.at(dialect.dialect);
            const ScoreTable& metric_sys = metric.sys.at(dialect.dialect);

            // Pairwise accuracy: pooled over dialects below.
            PairwiseResult pairwise = pairwise_accuracy(dialect.human_sys, metric_sys,
                                                        dialect.human_seg, config.alpha, true);
            PairwiseDialectView view;
            for (const auto& [system_id, v] : dialect.human_sys.system_entries) {
                view.systems.push_back(system_id);
                view.human.push_back(v);
                view.metric.push_back(metric_sys.system_entries.at(system_id));
                if (baseline) {
                    view.baseline.push_back(
                        baseline->sys.at(dialect.dialect).system_entries.at(system_id));
                }
            }
            std::size_t pair_index = 0;
            for (std::size_t i = 0; i < view.systems.size(); ++i) {
                for (std::size_t j = i + 1; j < view.systems.size(); ++j, ++pair_index) {
                    const PairwiseComparison& cmp = pairwise.pairs[pair_index];
                    if (cmp.significant) {
                        view.significant_pairs.emplace_back(i, j);
                        if (cmp.agree) ++state.agreements;
                        ++state.significant;
                    }
                }
            }
            state.views.push_back(std::move(view));

            // Pearson over system scores.
            {
                ReportCell cell;
                std::vector<double> human, scores;
                for (const auto& [system_id, v] : dialect.human_sys.system_entries) {
                    human.push_back(v);
                    scores.push_back(metric_sys.system_entries.at(system_id));
                }
                try {
                    CorrelationResult r = pearson(human, scores);
                    cell.value = r.statistic;
                    cell.n = r.n;
                } catch (const ValidationError&) {
                    cell.undefined_reason = "constant_input";
                    cell.n = static_cast<long long>(human.size());
                }
                report.cells[{metric.metric_id, "pearson", dialect.dialect}] = cell;
            }

            // Tie-optimized accuracy.
            {
                ReportCell cell;
                auto r = tie_optimized_accuracy(dialect.human_seg, metric_seg);
                if (r) {
                    cell.value = r->accuracy;
                    cell.n = r->n_pairs;
                } else {
                    cell.undefined_reason = "no_pairs";
                }
                report.cells[{metric.metric_id, "tie_optimized_accuracy", dialect.dialect}] = cell;
            }

            // Kendall.
            {
                ReportCell cell;
                auto r = kendall_segment(dialect.human_seg, metric_seg);
                if (r) {
                    cell.value = r->statistic;
                    cell.n = r->n;
                } else {
                    cell.undefined_reason = "no_comparable_pairs";
                }
                report.cells[{metric.metric_id, "kendall", dialect.dialect}] = cell;
            }

            // Challenge success rate.
            {
                ReportCell cell;
                auto it = metric.success.find(dialect.dialect);
                if (it == metric.success.end()) {
                    cell.undefined_reason = "not_computed";
                } else if (it->second.triples.empty()) {
                    cell.undefined_reason = "no_triples";
                } else {
                    cell.value = it->second.success_rate;
                    cell.n = static_cast<long long>(it->second.triples.size());
                }
                report.cells[{metric.metric_id, "success_rate", dialect.dialect}] = cell;
            }
        }

        ReportCell pairwise_cell;
        pairwise_cell.n = state.significant;
        if (state.significant > 0) {
            pairwise_cell.value =
                static_cast<double>(state.agreements) / static_cast<double>(state.significant);
        } else {
            pairwise_cell.undefined_reason = "no_significant_pairs";
        }
        report.cells[{metric.metric_id, "pairwise_accuracy", kJointDialect}] = pairwise_cell;
    }

    // Permutation p-values against the baseline for pairwise accuracy,
    // Pearson and Kendall.
    if (baseline) {
        for (const auto& metric : metrics) {
            if (metric.metric_id == baseline->metric_id) continue;

            {
                auto& cell = report.cells.at({metric.metric_id, "pairwise_accuracy",
                                              kJointDialect});
                const auto& state = pairwise_states.at(metric.metric_id);
                const auto& base_state = pairwise_states.at(baseline->metric_id);
                if (cell.value && base_state.significant > 0) {
                    double base_acc = static_cast<double>(base_state.agreements) /
                                      static_cast<double>(base_state.significant);
                    double observed = *cell.value - base_acc;
                    std::uint64_t seed = derive_stream_seed(config.seed, metric.metric_id, 0,
                                                            "pairwise_accuracy:-");
                    cell.p_vs_baseline = joint_pairwise_perm(state.views, observed,
                                                             config.perm_iterations, seed);
                }
            }

            for (const auto& dialect : dialects) {
                for (const char* statistic : {"pearson", "kendall"}) {
                    auto& cell = report.cells.at({metric.metric_id, statistic, dialect.dialect});
                    if (!cell.value) continue;
                    const auto* base_cell =
                        report.find(baseline->metric_id, statistic, dialect.dialect);
                    if (!base_cell || !base_cell->value) continue;
                    PermInputs inputs;
                    inputs.alpha = config.alpha;
                    inputs.human_sys = dialect.human_sys;
                    inputs.human_seg = dialect.human_seg;
                    inputs.metric_a_sys = metric.sys.at(dialect.dialect);
                    inputs.metric_b_sys = baseline->sys.at(dialect.dialect);
                    inputs.metric_a_seg = metric.seg.at(dialect.dialect);
                    inputs.metric_b_seg = baseline->seg.at(dialect.dialect);
                    PermStatistic stat = std::string(statistic) == "pearson"
                                             ? PermStatistic::pearson
                                             : PermStatistic::kendall;
                    std::uint64_t seed = derive_stream_seed(config.seed, metric.metric_id, 0,
                                                            std::string(statistic) + ":" +
                                                                dialect.dialect);
                    cell.p_vs_baseline = perm_significance(stat, inputs, config.perm_iterations,
                                                           seed, config.threads);
                }
            }
        }
    }
    return report;
}

std::string report_to_tsv(const EvaluationReport& report) {
    std::string out = "metric_id\tstatistic\tdialect\tvalue\tn\tp_vs_baseline\n";
    for (const auto& metric_id : report.metric_ids) {
        auto emit = [&](const std::string& statistic, const std::string& dialect) {
            const ReportCell* cell = report.find(metric_id, statistic, dialect);
            if (!cell) return;
            out += metric_id + "\t" + statistic + "\t" + dialect + "\t" +
                   cell_value_text(*cell, 6) + "\t" + std::to_string(cell->n) + "\t" +
                   (cell->p_vs_baseline ? format_double(*cell->p_vs_baseline, 6) : "-") + "\n";
        };
        emit("pairwise_accuracy", kJointDialect);
        for (const auto& statistic :
             {"pearson", "tie_optimized_accuracy", "kendall", "success_rate"}) {
            for (const auto& dialect : report.dialects) emit(statistic, dialect);
        }
    }
    return out;
}

EvaluationReport report_from_tsv(const std::string& path) {
    auto rows = read_tsv(path, {"metric_id", "statistic", "dialect", "value", "n",
                                "p_vs_baseline"});
    EvaluationReport report;
    std::size_t rowno = 1;
    for (const auto& row : rows) {
        ++rowno;
        std::string where = path + ":" + std::to_string(rowno);
        const std::string& metric_id = row[0];
        const std::string& statistic = row[1];
        const std::string& dialect = row[2];
        if (std::find(kReportStatistics.begin(), kReportStatistics.end(), statistic) ==
            kReportStatistics.end()) {
            throw ValidationError(where + ": unknown statistic '" + statistic + "'");
        }
        if (std::find(report.metric_ids.begin(), report.metric_ids.end(), metric_id) ==
            report.metric_ids.end()) {
            report.metric_ids.push_back(metric_id);
        }
        if (dialect != kJointDialect &&
            std::find(report.dialects.begin(), report.dialects.end(), dialect) ==
                report.dialects.end()) {
            report.dialects.push_back(dialect);
        }
        ReportCell cell;
        if (row[3].rfind("n/a(", 0) == 0 && row[3].back() == ')') {
            cell.undefined_reason = row[3].substr(4, row[3].size() - 5);
        } else {
            cell.value = parse_double(row[3], where);
        }
        cell.n = parse_int(row[4], where);
        if (row[5] != "-") cell.p_vs_baseline = parse_double(row[5], where);
        report.cells[{metric_id, statistic, dialect}] = cell;
    }
    return report;
}

std::string report_to_text(const EvaluationReport& report, double alpha) {
    const int name_width = 24;
    const int col_width = 10;

    auto pad = [](std::string s, int width) {
        if (static_cast<int>(s.size()) < width) s.resize(static_cast<std::size_t>(width), ' ');
        return s;
    };

    struct Column {
        std::string statistic;
        std::string dialect;
    };
    std::vector<Column> columns;
    columns.push_back({"pairwise_accuracy", kJointDialect});
    for (const auto& statistic :
         {"pearson", "tie_optimized_accuracy", "kendall", "success_rate"}) {
        for (const auto& dialect : report.dialects) columns.push_back({statistic, dialect});
    }

    const std::map<std::string, std::string> labels = {
        {"pairwise_accuracy", "pairwise"},
        {"pearson", "pearson"},
        {"tie_optimized_accuracy", "tie-optim"},
        {"kendall", "kendall"},
        {"success_rate", "success"},
    };

    std::string out = pad("", name_width);
    for (const auto& column : columns) out += pad(labels.at(column.statistic), col_width);
    out += "\n" + pad("metric", name_width);
    for (const auto& column : columns) {
        out += pad(column.dialect == kJointDialect ? "all" : column.dialect, col_width);
    }
    out += "\n";
    for (const auto& metric_id : report.metric_ids) {
        out += pad(metric_id, name_width);
        for (const auto& column : columns) {
            const ReportCell* cell = report.find(metric_id, column.statistic, column.dialect);
            std::string text = "-";
            if (cell) {
                text = cell->value ? format_double(*cell->value, 3) : "n/a";
                if (cell->p_vs_baseline && *cell->p_vs_baseline < alpha) text += "*";
            }
            out += pad(text, col_width);
        }
        out += "\n";
    }
    out += "\n'*' marks p < " + format_double(alpha, 2) + " vs the baseline metric.\n";
    return out;
}

std::vector<PairwisePlotPoint> pairwise_plot_data(const ScoreTable& human_sys,
                                                  const ScoreTable& metric_sys,
                                                  const ScoreTable& human_seg, double alpha) {
    PairwiseResult result = pairwise_accuracy(human_sys, metric_sys, human_seg, alpha, true);
    std::vector<PairwisePlotPoint> points;
    points.reserve(result.pairs.size());
    for (const auto& cmp : result.pairs) {
        PairwisePlotPoint point;
        point.sys_i = cmp.sys_i;
        point.sys_j = cmp.sys_j;
        point.human_delta = cmp.human_delta;
        point.metric_delta = cmp.metric_delta;
        point.significant = cmp.significant;
        points.push_back(std::move(point));
    }
    return points;
}

std::string plot_data_to_tsv(const std::vector<PairwisePlotPoint>& points) {
    std::string out = "sys_i\tsys_j\thuman_delta\tmetric_delta\tsignificant\n";
    for (const auto& point : points) {
        out += point.sys_i + "\t" + point.sys_j + "\t" + format_double(point.human_delta) + "\t" +
               format_double(point.metric_delta) + "\t" + (point.significant ? "1" : "0") + "\n";
    }
    return out;
}

}  // namespace dialeval
