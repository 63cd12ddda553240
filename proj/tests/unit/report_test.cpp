#include "doctest.h"

#include "dialeval/report.hpp"
#include "helpers.hpp"

using namespace dialeval;
using testutil::make_segment_table;

namespace {

// Two dialects, 4 systems x 6 segments each, clearly separated humans.
struct ReportFixture {
    std::vector<DialectBlock> dialects;

    ReportFixture() {
        Rng rng(4242);
        for (const std::string dialect : {"BE", "ZH"}) {
            std::vector<std::tuple<std::string, std::string, int, double>> entries;
            for (int s = 0; s < 4; ++s) {
                for (int g = 0; g < 6; ++g) {
                    entries.emplace_back("sys" + std::to_string(s), dialect + "doc", g,
                                         25.0 * s + static_cast<double>(rng.next_below(4)));
                }
            }
            DialectBlock block;
            block.dialect = dialect;
            block.human_seg = make_segment_table("human", entries);
            block.human_sys = system_average(block.human_seg);
            dialects.push_back(std::move(block));
        }
    }

    MetricTables metric_from_human(const std::string& id, double scale, double offset) const {
        MetricTables tables;
        tables.metric_id = id;
        for (const auto& block : dialects) {
            ScoreTable seg = block.human_seg;
            seg.metric_id = id;
            for (auto& [key, v] : seg.segment_entries) v = v * scale + offset;
            tables.seg[block.dialect] = seg;
            tables.sys[block.dialect] = system_average(seg);
        }
        return tables;
    }
};

}  // namespace

TEST_CASE("report shape: 2 metrics x 2 dialects gives 9 cells per metric") {
    ReportFixture fx;
    std::vector<MetricTables> metrics = {fx.metric_from_human("good", 1.0, 0.0),
                                         fx.metric_from_human("scaled", 0.5, 3.0)};
    ReportConfig config;
    config.baseline_metric = "good";
    config.perm_iterations = 200;
    EvaluationReport report = build_report(fx.dialects, metrics, config);

    CHECK(report.metric_ids == std::vector<std::string>{"good", "scaled"});
    CHECK(report.dialects == std::vector<std::string>{"BE", "ZH"});
    for (const auto& metric : report.metric_ids) {
        int cells = 0;
        for (const auto& [key, cell] : report.cells) {
            if (std::get<0>(key) == metric) ++cells;
        }
        CHECK(cells == 9);  // 1 pairwise + 4 statistics x 2 dialects
    }

    // TSV: header + 18 cell rows.
    std::string tsv = report_to_tsv(report);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 19);

    // Baseline row has no p-values; the other row has them on
    // pairwise/pearson/kendall only.
    CHECK(!report.find("good", "pearson", "BE")->p_vs_baseline.has_value());
    CHECK(report.find("scaled", "pearson", "BE")->p_vs_baseline.has_value());
    CHECK(report.find("scaled", "kendall", "ZH")->p_vs_baseline.has_value());
    CHECK(report.find("scaled", "pairwise_accuracy", "-")->p_vs_baseline.has_value());
    CHECK(!report.find("scaled", "tie_optimized_accuracy", "BE")->p_vs_baseline.has_value());
}

TEST_CASE("metric identical to human scores reaches the ceilings") {
    ReportFixture fx;
    std::vector<MetricTables> metrics = {fx.metric_from_human("human_copy", 1.0, 0.0)};
    ReportConfig config;
    EvaluationReport report = build_report(fx.dialects, metrics, config);

    CHECK(*report.find("human_copy", "pairwise_accuracy", "-")->value == 1.0);
    for (const std::string dialect : {"BE", "ZH"}) {
        CHECK(*report.find("human_copy", "pearson", dialect)->value == doctest::Approx(1.0));
        CHECK(*report.find("human_copy", "kendall", dialect)->value == doctest::Approx(1.0));
        CHECK(*report.find("human_copy", "tie_optimized_accuracy", dialect)->value ==
              doctest::Approx(1.0));
        // No challenge triples were supplied.
        CHECK(report.find("human_copy", "success_rate", dialect)->undefined_reason ==
              "not_computed");
    }
}

TEST_CASE("undefined statistics are marked, not silently blank") {
    // All human scores tied: kendall has no comparable pairs, pearson is
    // constant, yet the report builds.
    std::vector<std::tuple<std::string, std::string, int, double>> tied;
    for (int s = 0; s < 3; ++s) {
        for (int g = 0; g < 4; ++g) tied.emplace_back("sys" + std::to_string(s), "d", g, 50.0);
    }
    DialectBlock block;
    block.dialect = "BE";
    block.human_seg = make_segment_table("human", tied);
    block.human_sys = system_average(block.human_seg);

    MetricTables metric;
    metric.metric_id = "m";
    ScoreTable seg = block.human_seg;
    seg.metric_id = "m";
    int i = 0;
    for (auto& [key, v] : seg.segment_entries) v = static_cast<double>(i++);
    metric.seg["BE"] = seg;
    metric.sys["BE"] = system_average(seg);

    EvaluationReport report = build_report({block}, {metric}, ReportConfig{});
    CHECK(report.find("m", "kendall", "BE")->undefined_reason == "no_comparable_pairs");
    CHECK(report.find("m", "pearson", "BE")->undefined_reason == "constant_input");
    CHECK(report.find("m", "pairwise_accuracy", "-")->undefined_reason ==
          "no_significant_pairs");

    std::string tsv = report_to_tsv(report);
    CHECK(tsv.find("n/a(no_comparable_pairs)") != std::string::npos);
    CHECK(tsv.find("n/a(constant_input)") != std::string::npos);
}

TEST_CASE("success rates flow into the report") {
    ReportFixture fx;
    MetricTables metric = fx.metric_from_human("m", 1.0, 0.0);
    SuccessReport be;
    be.triples.resize(8);
    be.successes = 2;
    be.success_rate = 0.25;
    metric.success["BE"] = be;
    EvaluationReport report = build_report(fx.dialects, {metric}, ReportConfig{});
    CHECK(*report.find("m", "success_rate", "BE")->value == doctest::Approx(0.25));
    CHECK(report.find("m", "success_rate", "BE")->n == 8);
    CHECK(report.find("m", "success_rate", "ZH")->undefined_reason == "not_computed");
}

TEST_CASE("report generation is deterministic") {
    ReportFixture fx;
    std::vector<MetricTables> metrics = {fx.metric_from_human("base", 1.0, 0.0),
                                         fx.metric_from_human("other", 2.0, -1.0)};
    ReportConfig config;
    config.baseline_metric = "base";
    config.perm_iterations = 150;
    config.seed = 77;
    std::string a = report_to_tsv(build_report(fx.dialects, metrics, config));
    std::string b = report_to_tsv(build_report(fx.dialects, metrics, config));
    CHECK(a == b);

    std::string text = report_to_text(build_report(fx.dialects, metrics, config), config.alpha);
    CHECK(text.find("pairwise") != std::string::npos);
    CHECK(text.find("base") != std::string::npos);
}

TEST_CASE("build_report rejects misaligned grids with a per-metric report") {
    ReportFixture fx;
    MetricTables metric = fx.metric_from_human("m", 1.0, 0.0);
    metric.seg["BE"].segment_entries.erase(metric.seg["BE"].segment_entries.begin());
    CHECK_THROWS_WITH_AS(build_report(fx.dialects, {metric}, ReportConfig{}),
                         doctest::Contains("m (BE): segment table missing"), ValidationError);
}

TEST_CASE("plot data covers every unordered pair") {
    ReportFixture fx;

    // 10 systems -> 45 rows.
    std::vector<std::tuple<std::string, std::string, int, double>> entries;
    Rng rng(9);
    for (int s = 0; s < 10; ++s) {
        for (int g = 0; g < 6; ++g) {
            entries.emplace_back("sys" + std::to_string(s), "d", g,
                                 10.0 * s + static_cast<double>(rng.next_below(3)));
        }
    }
    ScoreTable human_seg = make_segment_table("human", entries);
    ScoreTable human_sys = system_average(human_seg);
    auto points = pairwise_plot_data(human_sys, human_sys, human_seg, 0.05);
    CHECK(points.size() == 45);
    for (const auto& point : points) {
        CHECK(point.sys_i < point.sys_j);
        // metric == human: no disagreement quadrant.
        bool disagree = (point.human_delta > 0) != (point.metric_delta > 0);
        CHECK(!disagree);
    }

    std::string tsv = plot_data_to_tsv(points);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 46);

    // 2 systems -> 1 row.
    ScoreTable h2 = make_segment_table("human", {{"a", "d", 0, 1.0},
                                                 {"a", "d", 1, 2.0},
                                                 {"b", "d", 0, 3.0},
                                                 {"b", "d", 1, 4.0}});
    CHECK(pairwise_plot_data(system_average(h2), system_average(h2), h2, 0.05).size() == 1);
}
