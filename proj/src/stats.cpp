#include "dialeval/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "dialeval/util.hpp"

namespace dialeval {

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// ----------------------------------------------------------------------
// Alignment of score tables onto plain vectors.

// Per-segment groups of scores, one slot per system, identically ordered in
// the human and metric views.
struct SegmentGroups {
    std::vector<std::vector<double>> human;
    std::vector<std::vector<double>> metric;
};

SegmentGroups align_segment_tables(const ScoreTable& human_seg, const ScoreTable& metric_seg,
                                   const char* caller) {
    if (human_seg.level != ScoreLevel::segment || metric_seg.level != ScoreLevel::segment) {
        throw ValidationError(std::string(caller) + ": segment-level tables required");
    }
    if (human_seg.segment_entries.size() != metric_seg.segment_entries.size()) {
        throw ValidationError(std::string(caller) + ": tables cover different grids (" +
                              std::to_string(human_seg.segment_entries.size()) + " vs " +
                              std::to_string(metric_seg.segment_entries.size()) + " entries)");
    }
    std::map<SegmentKey, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& [key, h] : human_seg.segment_entries) {
        auto it = metric_seg.segment_entries.find(key);
        if (it == metric_seg.segment_entries.end()) {
            throw ValidationError(std::string(caller) + ": metric table missing entry (" +
                                  key.system_id + ", " + key.doc_id + ", " +
                                  std::to_string(key.seg_index) + ")");
        }
        auto& group = groups[{key.doc_id, key.seg_index}];
        group.first.push_back(h);
        group.second.push_back(it->second);
    }
    SegmentGroups out;
    out.human.reserve(groups.size());
    out.metric.reserve(groups.size());
    for (auto& [key, group] : groups) {
        out.human.push_back(std::move(group.first));
        out.metric.push_back(std::move(group.second));
    }
    return out;
}

std::vector<std::string> aligned_systems(const ScoreTable& a, const ScoreTable& b,
                                         const char* caller) {
    if (a.level != ScoreLevel::system || b.level != ScoreLevel::system) {
        throw ValidationError(std::string(caller) + ": system-level tables required");
    }
    std::vector<std::string> systems;
    for (const auto& [system_id, v] : a.system_entries) systems.push_back(system_id);
    for (const auto& system_id : systems) {
        if (!b.system_entries.count(system_id)) {
            throw ValidationError(std::string(caller) + ": tables cover different systems ('" +
                                  system_id + "' missing)");
        }
    }
    if (a.system_entries.size() != b.system_entries.size()) {
        throw ValidationError(std::string(caller) + ": tables cover different systems");
    }
    return systems;
}

// Per-system per-segment human scores over one shared, complete grid.
std::vector<std::vector<double>> human_segment_matrix(const ScoreTable& human_seg,
                                                      const std::vector<std::string>& systems,
                                                      const char* caller) {
    std::set<SegmentKey> seg_keys;
    for (const auto& [key, v] : human_seg.segment_entries) {
        seg_keys.insert({key.doc_id, key.seg_index});
    }
    std::vector<std::vector<double>> matrix(systems.size());
    for (std::size_t s = 0; s < systems.size(); ++s) {
        matrix[s].reserve(seg_keys.size());
        for (const auto& seg : seg_keys) {
            auto it = human_seg.segment_entries.find({systems[s], seg.doc_id, seg.seg_index});
            if (it == human_seg.segment_entries.end()) {
                throw ValidationError(std::string(caller) + ": human segment table missing (" +
                                      systems[s] + ", " + seg.doc_id + ", " +
                                      std::to_string(seg.seg_index) + ")");
            }
            matrix[s].push_back(it->second);
        }
    }
    return matrix;
}

// ----------------------------------------------------------------------
// Statistic kernels. The public entry points and the permutation test both
// go through these, so permuted and reported values share one code path.

std::optional<double> pearson_kernel(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mean_x;
        double dy = y[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

struct KendallCounts {
    double concordant = 0.0;
    double discordant = 0.0;
    long long pairs = 0;  // human-untied pairs considered
};

KendallCounts kendall_kernel(const std::vector<std::vector<double>>& human,
                             const std::vector<std::vector<double>>& metric) {
    KendallCounts counts;
    for (std::size_t g = 0; g < human.size(); ++g) {
        const auto& h = human[g];
        const auto& m = metric[g];
        for (std::size_t i = 0; i < h.size(); ++i) {
            for (std::size_t j = i + 1; j < h.size(); ++j) {
                double dh = h[i] - h[j];
                if (dh == 0.0) continue;
                ++counts.pairs;
                double dm = m[i] - m[j];
                if (dm == 0.0) {
                    counts.concordant += 0.5;
                    counts.discordant += 0.5;
                } else if (sign_of(dm) == sign_of(dh)) {
                    counts.concordant += 1.0;
                } else {
                    counts.discordant += 1.0;
                }
            }
        }
    }
    return counts;
}

struct TieOptKernelResult {
    double epsilon_star = 0.0;
    long long matches = 0;
    long long pairs = 0;
};

std::optional<TieOptKernelResult> tieopt_kernel(const std::vector<std::vector<double>>& human,
                                                const std::vector<std::vector<double>>& metric) {
    // (human label, metric delta) per within-segment pair.
    std::vector<std::pair<int, double>> pairs;
    for (std::size_t g = 0; g < human.size(); ++g) {
        const auto& h = human[g];
        const auto& m = metric[g];
        for (std::size_t i = 0; i < h.size(); ++i) {
            for (std::size_t j = i + 1; j < h.size(); ++j) {
                pairs.emplace_back(sign_of(h[i] - h[j]), m[i] - m[j]);
            }
        }
    }
    if (pairs.empty()) return std::nullopt;

    std::set<double> magnitudes;
    for (const auto& [label, dm] : pairs) magnitudes.insert(std::abs(dm));
    std::vector<double> sorted(magnitudes.begin(), magnitudes.end());
    std::vector<double> candidates;
    candidates.push_back(0.0);
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        candidates.push_back((sorted[i] + sorted[i + 1]) / 2.0);
    }
    candidates.push_back(sorted.back());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    TieOptKernelResult best;
    best.pairs = static_cast<long long>(pairs.size());
    best.matches = -1;
    for (double eps : candidates) {
        long long matches = 0;
        for (const auto& [label, dm] : pairs) {
            int metric_label = std::abs(dm) <= eps ? 0 : sign_of(dm);
            if (metric_label == label) ++matches;
        }
        if (matches > best.matches) {  // ascending scan; smallest eps wins ties
            best.matches = matches;
            best.epsilon_star = eps;
        }
    }
    return best;
}

double wilcoxon_from_diffs(std::vector<double> diffs) {
    std::erase(diffs, 0.0);
    const std::size_t m = diffs.size();
    if (m == 0) return 1.0;  // no evidence

    // Midranks of |d|, scaled by 2 so everything stays integral.
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(diffs[a]) < std::abs(diffs[b]);
    });
    std::vector<long long> scaled_rank(m, 0);
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j + 1 < m && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
        // ranks i+1 .. j+1 share the midrank; scaled midrank = (i + j + 2)
        long long scaled = static_cast<long long>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) scaled_rank[order[k]] = scaled;
        i = j + 1;
    }

    long long w2 = 0;        // 2 * W+
    long long total2 = 0;    // 2 * sum of ranks = m * (m + 1)
    double sum_rank_sq = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        total2 += scaled_rank[k];
        if (diffs[k] > 0.0) w2 += scaled_rank[k];
        double r = static_cast<double>(scaled_rank[k]) / 2.0;
        sum_rank_sq += r * r;
    }
    const long long mu2 = total2 / 2;  // m(m+1) is even

    if (m <= 20) {
        // Exact null distribution of 2*W+ by dynamic programming over sign
        // assignments (equivalent to enumerating all 2^m subsets).
        std::vector<double> dist(static_cast<std::size_t>(total2) + 1, 0.0);
        dist[0] = 1.0;
        long long reach = 0;
        for (std::size_t k = 0; k < m; ++k) {
            long long r = scaled_rank[k];
            for (long long s = reach; s >= 0; --s) {
                if (dist[static_cast<std::size_t>(s)] > 0.0) {
                    dist[static_cast<std::size_t>(s + r)] += dist[static_cast<std::size_t>(s)];
                }
            }
            reach += r;
        }
        const long long threshold = std::llabs(w2 - mu2);
        double count = 0.0;
        for (long long s = 0; s <= total2; ++s) {
            if (std::llabs(s - mu2) >= threshold) count += dist[static_cast<std::size_t>(s)];
        }
        return count / std::pow(2.0, static_cast<double>(m));
    }

    // Normal approximation. Var(W+) = sum r_i^2 / 4 under the null; the
    // midranks carry the tie correction, 0.5 is the continuity correction.
    double w = static_cast<double>(w2) / 2.0;
    double mu = static_cast<double>(mu2) / 2.0;
    double sigma = std::sqrt(sum_rank_sq) / 2.0;
    double z = (std::abs(w - mu) - 0.5) / sigma;
    if (z < 0.0) z = 0.0;
    double p = std::erfc(z / std::sqrt(2.0));
    return std::clamp(p, 0.0, 1.0);
}

struct PairwiseAligned {
    std::vector<std::string> systems;
    std::vector<double> human;
    std::vector<std::pair<std::size_t, std::size_t>> significant_pairs;
    std::vector<std::pair<std::size_t, std::size_t>> all_pairs;
};

double pairwise_kernel(const PairwiseAligned& aligned, const std::vector<double>& metric) {
    long long agree = 0;
    for (const auto& [i, j] : aligned.significant_pairs) {
        if (sign_of(metric[i] - metric[j]) == sign_of(aligned.human[i] - aligned.human[j])) {
            ++agree;
        }
    }
    return static_cast<double>(agree) / static_cast<double>(aligned.significant_pairs.size());
}

PairwiseAligned align_pairwise(const ScoreTable& human_sys, const ScoreTable& metric_sys,
                               const ScoreTable& human_seg, double alpha, bool gate) {
    PairwiseAligned aligned;
    aligned.systems = aligned_systems(human_sys, metric_sys, "pairwise_accuracy");
    if (aligned.systems.size() < 2) {
        throw ValidationError("pairwise_accuracy: need at least 2 systems");
    }
    for (const auto& system_id : aligned.systems) {
        aligned.human.push_back(human_sys.system_entries.at(system_id));
    }
    std::vector<std::vector<double>> seg_matrix;
    if (gate) {
        seg_matrix = human_segment_matrix(human_seg, aligned.systems, "pairwise_accuracy");
    }
    for (std::size_t i = 0; i < aligned.systems.size(); ++i) {
        for (std::size_t j = i + 1; j < aligned.systems.size(); ++j) {
            aligned.all_pairs.emplace_back(i, j);
            bool significant = true;
            if (gate) {
                std::vector<double> diffs(seg_matrix[i].size());
                for (std::size_t k = 0; k < diffs.size(); ++k) {
                    diffs[k] = seg_matrix[i][k] - seg_matrix[j][k];
                }
                significant = wilcoxon_from_diffs(std::move(diffs)) < alpha;
            }
            if (significant) aligned.significant_pairs.emplace_back(i, j);
        }
    }
    return aligned;
}

}  // namespace

CorrelationResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ValidationError("pearson: length mismatch");
    if (x.size() < 2) throw ValidationError("pearson: need at least 2 points");
    auto r = pearson_kernel(x, y);
    if (!r) throw ValidationError("pearson: undefined correlation for constant input");
    CorrelationResult result;
    result.statistic = *r;
    result.n = static_cast<long long>(x.size());
    return result;
}

double wilcoxon_two_sided(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ValidationError("wilcoxon: length mismatch");
    if (x.empty()) throw ValidationError("wilcoxon: empty input");
    std::vector<double> diffs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) diffs[i] = x[i] - y[i];
    return wilcoxon_from_diffs(std::move(diffs));
}

PairwiseResult pairwise_accuracy(const ScoreTable& human_sys, const ScoreTable& metric_sys,
                                 const ScoreTable& human_seg, double alpha, bool gate) {
    PairwiseAligned aligned = align_pairwise(human_sys, metric_sys, human_seg, alpha, gate);
    std::vector<double> metric;
    for (const auto& system_id : aligned.systems) {
        metric.push_back(metric_sys.system_entries.at(system_id));
    }
    std::set<std::pair<std::size_t, std::size_t>> significant(aligned.significant_pairs.begin(),
                                                              aligned.significant_pairs.end());
    PairwiseResult result;
    long long agree = 0;
    for (const auto& [i, j] : aligned.all_pairs) {
        PairwiseComparison cmp;
        cmp.sys_i = aligned.systems[i];
        cmp.sys_j = aligned.systems[j];
        cmp.human_delta = aligned.human[i] - aligned.human[j];
        cmp.metric_delta = metric[i] - metric[j];
        cmp.significant = significant.count({i, j}) > 0;
        cmp.agree = sign_of(cmp.metric_delta) == sign_of(cmp.human_delta);
        if (cmp.significant && cmp.agree) ++agree;
        result.pairs.push_back(std::move(cmp));
    }
    result.n_significant = static_cast<long long>(aligned.significant_pairs.size());
    if (result.n_significant > 0) {
        result.accuracy = static_cast<double>(agree) / static_cast<double>(result.n_significant);
    }
    return result;
}

std::optional<CorrelationResult> kendall_segment(const ScoreTable& human_seg,
                                                 const ScoreTable& metric_seg) {
    SegmentGroups groups = align_segment_tables(human_seg, metric_seg, "kendall_segment");
    KendallCounts counts = kendall_kernel(groups.human, groups.metric);
    if (counts.pairs == 0) return std::nullopt;
    CorrelationResult result;
    result.statistic = (counts.concordant - counts.discordant) /
                       (counts.concordant + counts.discordant);
    result.n = counts.pairs;
    return result;
}

std::optional<TieOptimizedResult> tie_optimized_accuracy(const ScoreTable& human_seg,
                                                         const ScoreTable& metric_seg) {
    SegmentGroups groups = align_segment_tables(human_seg, metric_seg, "tie_optimized_accuracy");
    auto kernel = tieopt_kernel(groups.human, groups.metric);
    if (!kernel) return std::nullopt;
    TieOptimizedResult result;
    result.epsilon_star = kernel->epsilon_star;
    result.accuracy = static_cast<double>(kernel->matches) / static_cast<double>(kernel->pairs);
    result.n_pairs = kernel->pairs;
    return result;
}

double perm_significance(PermStatistic statistic, const PermInputs& inputs, int iterations,
                         std::uint64_t seed, int threads) {
    if (iterations < 100) throw ValidationError("perm_significance: need >= 100 iterations");
    if (threads < 1) throw ValidationError("perm_significance: threads must be >= 1");

    const bool system_level =
        statistic == PermStatistic::pairwise_accuracy || statistic == PermStatistic::pearson;

    // Aligned observed inputs; evaluate(metric_a_view, metric_b_view) yields
    // the statistic delta or nullopt when a permuted statistic is undefined.
    PairwiseAligned pairwise;
    std::vector<double> a_sys, b_sys, human_sys_vec;
    SegmentGroups a_groups, b_groups;

    if (system_level) {
        std::vector<std::string> systems =
            aligned_systems(inputs.metric_a_sys, inputs.metric_b_sys, "perm_significance");
        if (statistic == PermStatistic::pairwise_accuracy) {
            pairwise = align_pairwise(inputs.human_sys, inputs.metric_a_sys, inputs.human_seg,
                                      inputs.alpha, true);
            if (pairwise.significant_pairs.empty()) {
                throw ValidationError(
                    "perm_significance: pairwise accuracy undefined (no significant pairs)");
            }
            systems = pairwise.systems;
        } else {
            systems = aligned_systems(inputs.human_sys, inputs.metric_a_sys, "perm_significance");
        }
        for (const auto& system_id : systems) {
            human_sys_vec.push_back(inputs.human_sys.system_entries.at(system_id));
            a_sys.push_back(inputs.metric_a_sys.system_entries.at(system_id));
            b_sys.push_back(inputs.metric_b_sys.system_entries.at(system_id));
        }
    } else {
        a_groups = align_segment_tables(inputs.human_seg, inputs.metric_a_seg,
                                        "perm_significance");
        b_groups = align_segment_tables(inputs.human_seg, inputs.metric_b_seg,
                                        "perm_significance");
    }

    auto evaluate_sys = [&](const std::vector<double>& metric) -> std::optional<double> {
        if (statistic == PermStatistic::pairwise_accuracy) return pairwise_kernel(pairwise, metric);
        return pearson_kernel(human_sys_vec, metric);
    };
    auto evaluate_seg =
        [&](const std::vector<std::vector<double>>& metric) -> std::optional<double> {
        if (statistic == PermStatistic::kendall) {
            KendallCounts counts = kendall_kernel(a_groups.human, metric);
            if (counts.pairs == 0) return std::nullopt;
            return (counts.concordant - counts.discordant) /
                   (counts.concordant + counts.discordant);
        }
        auto kernel = tieopt_kernel(a_groups.human, metric);
        if (!kernel) return std::nullopt;
        return static_cast<double>(kernel->matches) / static_cast<double>(kernel->pairs);
    };

    double observed_delta;
    if (system_level) {
        auto sa = evaluate_sys(a_sys);
        auto sb = evaluate_sys(b_sys);
        if (!sa || !sb) {
            throw ValidationError("perm_significance: observed statistic undefined");
        }
        observed_delta = *sa - *sb;
    } else {
        auto sa = evaluate_seg(a_groups.metric);
        auto sb = evaluate_seg(b_groups.metric);
        if (!sa || !sb) {
            throw ValidationError("perm_significance: observed statistic undefined");
        }
        observed_delta = *sa - *sb;
    }

    std::atomic<long long> exceedances{0};
    auto run_iteration = [&](int iter) {
        Rng rng(splitmix64(splitmix64(seed) + static_cast<std::uint64_t>(iter) + 1));
        std::optional<double> sa, sb;
        if (system_level) {
            std::vector<double> pa = a_sys;
            std::vector<double> pb = b_sys;
            for (std::size_t s = 0; s < pa.size(); ++s) {
                if (rng.next_below(2) == 1) std::swap(pa[s], pb[s]);
            }
            sa = evaluate_sys(pa);
            sb = evaluate_sys(pb);
        } else {
            std::vector<std::vector<double>> pa = a_groups.metric;
            std::vector<std::vector<double>> pb = b_groups.metric;
            for (std::size_t g = 0; g < pa.size(); ++g) {
                if (rng.next_below(2) == 1) pa[g].swap(pb[g]);
            }
            sa = evaluate_seg(pa);
            sb = evaluate_seg(pb);
        }
        // An undefined permuted statistic counts as an exceedance; this only
        // happens in degenerate configurations and biases toward p = 1.
        if (!sa || !sb || (*sa - *sb) >= observed_delta) {
            exceedances.fetch_add(1, std::memory_order_relaxed);
        }
    };

    if (threads == 1) {
        for (int iter = 0; iter < iterations; ++iter) run_iteration(iter);
    } else {
        std::vector<std::thread> pool;
        int used = std::min(threads, iterations);
        for (int t = 0; t < used; ++t) {
            pool.emplace_back([&, t]() {
                for (int iter = t; iter < iterations; iter += used) run_iteration(iter);
            });
        }
        for (auto& th : pool) th.join();
    }
    return static_cast<double>(exceedances.load()) / static_cast<double>(iterations);
}

}  // namespace dialeval
