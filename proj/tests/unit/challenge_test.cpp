#include "doctest.h"

#include <cmath>
#include <set>

#include "dialeval/challenge.hpp"
#include "helpers.hpp"

using namespace dialeval;
using testutil::TempDir;

namespace {

// One segment, n systems, each rated `score` by a single rater.
std::pair<EvalDataset, JudgmentSet> single_segment_fixture(
    const std::vector<std::pair<std::string, double>>& hyps_and_scores) {
    EvalDataset ds;
    ds.lang_pair = "en-gsw_be";
    ds.dialect_region = "BE";
    Segment seg;
    seg.doc_id = "d";
    seg.seg_index = 0;
    seg.source = "source";
    seg.reference = "reference";
    ds.segments.push_back(seg);
    JudgmentSet judgments;
    int i = 0;
    for (const auto& [hyp, score] : hyps_and_scores) {
        std::string sys = "mt" + std::to_string(++i);
        ds.system_ids.push_back(sys);
        ds.hypotheses[sys] = {hyp};
        judgments.records.push_back({sys, "d", 0, "r1", score});
    }
    return {ds, judgments};
}

}  // namespace

TEST_CASE("four unique perfect hypotheses give six pairs") {
    auto [ds, judgments] = single_segment_fixture(
        {{"eis", 100}, {"zwei", 100}, {"drei", 100}, {"vier", 100}});
    auto pairs = extract_perfect_pairs(ds, judgments);
    CHECK(pairs.size() == 6);
    for (const auto& pair : pairs) CHECK(pair.hyp_a != pair.hyp_b);
}

TEST_CASE("identical perfect strings collapse to one hypothesis") {
    auto [ds, judgments] = single_segment_fixture({{"glych", 100}, {"glych", 100}});
    CHECK(extract_perfect_pairs(ds, judgments).empty());
}

TEST_CASE("threshold is strict") {
    auto [ds, judgments] = single_segment_fixture({{"eis", 100}, {"zwei", 99.5}});
    CHECK(extract_perfect_pairs(ds, judgments).empty());
    // Lowering the threshold admits the 99.5 hypothesis.
    CHECK(extract_perfect_pairs(ds, judgments, 99.0).size() == 1);
}

TEST_CASE("pair count follows sum of C(u,2) over segments") {
    Rng rng(1234);
    for (int trial = 0; trial < 20; ++trial) {
        EvalDataset ds;
        ds.lang_pair = "en-x";
        JudgmentSet judgments;
        long long expected = 0;
        const int n_systems = 5;
        for (int s = 1; s <= n_systems; ++s) ds.system_ids.push_back("mt" + std::to_string(s));
        for (int segi = 0; segi < 4; ++segi) {
            Segment seg;
            seg.doc_id = "d";
            seg.seg_index = segi;
            seg.source = "s";
            seg.reference = "r";
            ds.segments.push_back(seg);
            // Each system gets a hypothesis from a tiny pool; each distinct
            // string is rated perfect or not as a whole, so the expected pair
            // count is exactly C(#perfect unique strings, 2).
            std::map<std::string, bool> verdict_by_string;
            for (int pool = 0; pool < 4; ++pool) {
                verdict_by_string["hyp" + std::to_string(pool)] = rng.next_below(2) == 0;
            }
            std::set<std::string> perfect_uniques;
            for (int s = 1; s <= n_systems; ++s) {
                std::string sys = "mt" + std::to_string(s);
                std::string hyp = "hyp" + std::to_string(rng.next_below(4));
                ds.hypotheses[sys].push_back(hyp);
                bool perfect = verdict_by_string.at(hyp);
                judgments.records.push_back({sys, "d", segi, "r1", perfect ? 100.0 : 50.0});
                if (perfect) perfect_uniques.insert(hyp);
            }
            long long u = static_cast<long long>(perfect_uniques.size());
            expected += u * (u - 1) / 2;
        }
        CHECK(static_cast<long long>(extract_perfect_pairs(ds, judgments).size()) == expected);
    }
}

TEST_CASE("make_worksheet is deterministic and near-uniform") {
    std::vector<EquivalentPair> pairs;
    for (int i = 0; i < 6000; ++i) {
        EquivalentPair pair;
        pair.pair_id = "P" + std::to_string(i);
        pair.hyp_a = "a" + std::to_string(i);
        pair.hyp_b = "b" + std::to_string(i);
        pairs.push_back(pair);
    }
    auto rows1 = make_worksheet(pairs, 42);
    auto rows2 = make_worksheet(pairs, 42);
    REQUIRE(rows1.size() == pairs.size());
    bool all_equal = true;
    for (std::size_t i = 0; i < rows1.size(); ++i) {
        if (rows1[i].operation != rows2[i].operation ||
            rows1[i].edited_from != rows2[i].edited_from) {
            all_equal = false;
        }
    }
    CHECK(all_equal);

    // Operation frequencies within 3 sigma of uniform (binomial bound).
    std::map<EditOperation, int> op_counts;
    std::map<char, int> target_counts;
    for (const auto& row : rows1) {
        ++op_counts[row.operation];
        ++target_counts[row.edited_from];
    }
    double n = 6000.0;
    double sigma_ops = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
    for (const auto& [op, count] : op_counts) {
        CHECK(std::abs(count - n / 3) <= 3.0 * sigma_ops);
    }
    double sigma_ab = std::sqrt(n * 0.25);
    CHECK(std::abs(target_counts['A'] - n / 2) <= 3.0 * sigma_ab);

    CHECK(make_worksheet({}, 1).empty());
}

TEST_CASE("triples load and validate") {
    TempDir tmp;
    std::vector<EquivalentPair> pairs;
    EquivalentPair pair;
    pair.pair_id = "P00001";
    pair.doc_id = "d";
    pair.seg_index = 0;
    pair.source = "src";
    pair.reference = "ref";
    pair.hyp_a = "Sechs Mitarbeiter";
    pair.hyp_b = "Sächs Mitarbeiter";
    pairs.push_back(pair);
    auto rows = make_worksheet(pairs, 7);
    std::string path = tmp.file("worksheet.tsv");
    write_worksheet(path, rows);

    // Unfilled hyp_c rejected.
    CHECK_THROWS_WITH_AS(load_triples(path), doctest::Contains("empty hyp_c"), ValidationError);

    std::string content = read_file(path);
    // Complete the sheet with a meaning-changed hypothesis.
    content.replace(content.rfind("\t\n"), 2, "\tSechs Chatzen\n");
    write_file(path, content);
    auto triples = load_triples(path);
    REQUIRE(triples.size() == 1);
    CHECK(triples[0].hyp_c == "Sechs Chatzen");

    // hyp_c equal to hyp_a rejected with the pair id.
    content.replace(content.rfind("\tSechs Chatzen\n"), 14, "\tSechs Mitarbeiter");
    write_file(path, content);
    CHECK_THROWS_WITH_AS(load_triples(path), doctest::Contains("hyp_c equals hyp_a"),
                         ValidationError);

    // Unknown operation column.
    std::string bad = "pair_id\tdoc_id\tseg_index\tsource\treference\thyp_a\thyp_b\toperation\t"
                      "edited_from\thyp_c\nP1\td\t0\ts\tr\ta\tb\tmunge\tA\tc\n";
    std::string bad_path = tmp.file("bad.tsv");
    write_file(bad_path, bad);
    CHECK_THROWS_WITH_AS(load_triples(bad_path), doctest::Contains("unknown edit operation"),
                         ValidationError);
}

namespace {

ChallengeTriple make_triple(const std::string& id) {
    ChallengeTriple triple;
    triple.pair.pair_id = id;
    triple.pair.source = "src";
    triple.pair.reference = "ref";
    triple.pair.hyp_a = "hyp a " + id;
    triple.pair.hyp_b = "hyp b " + id;
    triple.hyp_c = "hyp c " + id;
    return triple;
}

TripleScorer fixed_scorer(double a, double b, double c) {
    return [=](const std::string&, const std::string&, const std::string& hyp) {
        if (hyp.find("hyp a") == 0) return a;
        if (hyp.find("hyp b") == 0) return b;
        return c;
    };
}

}  // namespace

TEST_CASE("success rate boundary cases") {
    std::vector<ChallengeTriple> one = {make_triple("t")};
    // |0.90 - 0.85| < min - 0.50
    CHECK(success_rate(one, fixed_scorer(0.90, 0.85, 0.50)).success_rate == 1.0);
    // Exact ties fail: 0 < 0 is false.
    CHECK(success_rate(one, fixed_scorer(0.7, 0.7, 0.7)).success_rate == 0.0);
    // C above min(A, B) can never succeed.
    CHECK(success_rate(one, fixed_scorer(0.9, 0.4, 0.6)).success_rate == 0.0);
}

TEST_CASE("success is shift-invariant and symmetric in A and B") {
    std::vector<ChallengeTriple> one = {make_triple("t")};
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        double a = rng.next_unit();
        double b = rng.next_unit();
        double c = rng.next_unit();
        double shift = rng.next_unit() * 10 - 5;
        bool plain = success_rate(one, fixed_scorer(a, b, c)).success_rate == 1.0;
        bool shifted =
            success_rate(one, fixed_scorer(a + shift, b + shift, c + shift)).success_rate == 1.0;
        bool swapped = success_rate(one, fixed_scorer(b, a, c)).success_rate == 1.0;
        CHECK(plain == shifted);
        CHECK(plain == swapped);
    }
}

TEST_CASE("dialect-invariant and constant scorers bound the success rate") {
    std::vector<ChallengeTriple> triples;
    for (int i = 0; i < 10; ++i) triples.push_back(make_triple("t" + std::to_string(i)));
    CHECK(success_rate(triples, fixed_scorer(0.8, 0.8, 0.2)).success_rate == 1.0);
    TripleScorer constant = [](const std::string&, const std::string&, const std::string&) {
        return 0.5;
    };
    CHECK(success_rate(triples, constant).success_rate == 0.0);
}

TEST_CASE("scorer failures abort with the triple id") {
    std::vector<ChallengeTriple> one = {make_triple("T42")};
    TripleScorer failing = [](const std::string&, const std::string&,
                              const std::string& hyp) -> double {
        if (hyp.find("hyp c") == 0) throw std::runtime_error("model exploded");
        return 1.0;
    };
    CHECK_THROWS_WITH_AS(success_rate(one, failing), doctest::Contains("T42"), ValidationError);
}
