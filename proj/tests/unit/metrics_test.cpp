#include "doctest.h"

#include <cmath>

#include "dialeval/metrics.hpp"
#include "dialeval/util.hpp"
#include "helpers.hpp"

using namespace dialeval;

TEST_CASE("bleu perfect match scores 100") {
    std::vector<std::string> text = {"the quick brown fox jumps", "over the lazy dog today"};
    MetricScore s = bleu_corpus(text, text);
    CHECK(s.value == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(s.components.at("bp") == 1.0);
}

TEST_CASE("bleu worked example components") {
    MetricScore s = bleu_corpus({"the cat sat on mat"}, {"the cat sat on the mat"});
    CHECK(s.components.at("p1") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.components.at("p2") == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(s.components.at("p3") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(s.components.at("p4") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.components.at("bp") == doctest::Approx(std::exp(-0.2)).epsilon(1e-12));
    // 100 * exp(-0.2) * (1 * 3/4 * 2/3 * 1/2)^(1/4), frozen from the oracle.
    CHECK(s.value == doctest::Approx(57.89300674674101).epsilon(1e-11));
}

TEST_CASE("bleu all-zero numerators smooth to a near-zero score") {
    MetricScore s = bleu_corpus({"xx yy"}, {"aa bb"});
    CHECK(s.value == doctest::Approx(5.0).epsilon(1e-11));
    CHECK(s.value < 10.0);
}

TEST_CASE("bleu zero-length hypothesis scores 0") {
    MetricScore s = bleu_corpus({""}, {"some reference text"});
    CHECK(s.value == 0.0);
    CHECK(s.components.at("bp") == 0.0);
}

TEST_CASE("bleu corpus is invariant under segment permutation") {
    std::vector<std::string> hyps = {"a b c d", "e f g h", "a a a a"};
    std::vector<std::string> refs = {"a b c e", "e f g h", "a b a a"};
    double forward = bleu_corpus(hyps, refs).value;
    std::reverse(hyps.begin(), hyps.end());
    std::reverse(refs.begin(), refs.end());
    CHECK(bleu_corpus(hyps, refs).value == forward);
}

TEST_CASE("bleu brevity penalty bounds") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        auto sentence = [&](std::size_t max_len) {
            std::string text;
            std::size_t len = 1 + rng.next_below(max_len);
            for (std::size_t i = 0; i < len; ++i) {
                if (i) text += ' ';
                text += static_cast<char>('a' + rng.next_below(5));
            }
            return text;
        };
        std::string hyp = sentence(8);
        std::string ref = sentence(8);
        MetricScore s = bleu_corpus({hyp}, {ref});
        double bp = s.components.at("bp");
        CHECK(bp <= 1.0);
        bool hyp_not_shorter = whitespace_tokenize(hyp).size() >= whitespace_tokenize(ref).size();
        CHECK((bp == 1.0) == hyp_not_shorter);
        CHECK(s.value >= 0.0);
        CHECK(s.value <= 100.0);
    }
}

TEST_CASE("bleu input validation") {
    CHECK_THROWS_AS(bleu_corpus({}, {}, {}), ValidationError);
    CHECK_THROWS_AS(bleu_corpus({"a"}, {"a", "b"}, {}), ValidationError);
}

TEST_CASE("chrf identity and empty-hypothesis cases") {
    CHECK(chrf_corpus({"wärde glii"}, {"wärde glii"}).value == doctest::Approx(100.0));
    CHECK(chrf_corpus({"ab"}, {"ab"}).value == doctest::Approx(100.0));
    CHECK(chrf_corpus({""}, {"abc"}).value == 0.0);
}

TEST_CASE("chrf golden vector") {
    // Frozen from the independent brute-force oracle.
    MetricScore s = chrf_corpus({"abcd"}, {"abcd efgh"});
    CHECK(s.value == doctest::Approx(27.90655394964094).epsilon(1e-11));
}

TEST_CASE("chrf beta=1 is symmetric in hypothesis and reference") {
    ChrfConfig cfg;
    cfg.beta = 1.0;
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto sentence = [&]() {
            std::string text;
            std::size_t len = 1 + rng.next_below(8);
            for (std::size_t i = 0; i < len; ++i) text += static_cast<char>('a' + rng.next_below(4));
            return text;
        };
        std::string a = sentence();
        std::string b = sentence();
        CHECK(chrf_corpus({a}, {b}, cfg).value ==
              doctest::Approx(chrf_corpus({b}, {a}, cfg).value).epsilon(1e-12));
    }
}

TEST_CASE("chrf beta=2 weighs recall over precision") {
    // Junk appended to the hypothesis hurts precision only; a recall-heavy
    // beta must suffer less.
    std::string ref = "abcdef";
    std::string hyp = ref + " zzzz";
    ChrfConfig beta2;
    ChrfConfig beta1;
    beta1.beta = 1.0;
    double f2 = chrf_corpus({hyp}, {ref}, beta2).value;
    double f1 = chrf_corpus({hyp}, {ref}, beta1).value;
    CHECK(f2 > f1);
    CHECK(f2 < 100.0);
    // And the recall side is untouched.
    MetricScore s = chrf_corpus({hyp}, {ref});
    CHECK(s.components.at("avg_recall") == doctest::Approx(1.0));
    CHECK(s.components.at("avg_precision") < 1.0);
}

TEST_CASE("metric config signatures round-trip") {
    BleuConfig bleu;
    CHECK(bleu.signature() == "nrefs:1|case:mixed|eff:no|tok:13a|smooth:exp");
    BleuConfig parsed = parse_bleu_signature(bleu.signature());
    CHECK(parsed.max_order == 4);
    CHECK(parsed.effective_order == false);
    CHECK(parsed.lowercase == false);
    CHECK(parsed.signature() == bleu.signature());

    ChrfConfig chrf;
    CHECK(chrf.signature() == "nrefs:1|case:mixed|eff:yes|nc:6|nw:0|space:no");
    ChrfConfig chrf_parsed = parse_chrf_signature(chrf.signature());
    CHECK(chrf_parsed.char_order == 6);
    CHECK(chrf_parsed.word_order == 0);
    CHECK(chrf_parsed.beta == 2.0);
    CHECK(chrf_parsed.remove_space == true);
    CHECK(chrf_parsed.effective_order == true);
    CHECK(chrf_parsed.signature() == chrf.signature());

    ChrfConfig chrfpp;
    chrfpp.word_order = 2;
    CHECK(chrfpp.metric_id() == "chrf++");
    CHECK(parse_chrf_signature(chrfpp.signature()).word_order == 2);
}

namespace {

EvalDataset tiny_dataset(bool perfect) {
    EvalDataset ds;
    ds.lang_pair = "en-gsw_be";
    ds.dialect_region = "BE";
    for (int s = 0; s < 2; ++s) {
        Segment seg;
        seg.doc_id = "d";
        seg.seg_index = s;
        seg.source = "source text number " + std::to_string(s);
        seg.reference = "the reference text number " + std::to_string(s);
        ds.segments.push_back(seg);
    }
    ds.system_ids = {"mt1", "mt2"};
    for (const auto& sys : ds.system_ids) {
        for (const auto& seg : ds.segments) {
            ds.hypotheses[sys].push_back(perfect ? seg.reference
                                                 : "completely unrelated words " + sys);
        }
    }
    return ds;
}

}  // namespace

TEST_CASE("score_dataset perfect copies") {
    EvalDataset ds = tiny_dataset(true);
    MetricConfig bleu;
    bleu.kind = MetricKind::bleu;
    auto [seg, sys] = score_dataset(bleu, ds);
    CHECK(seg.segment_entries.size() == 4);
    CHECK(sys.system_entries.size() == 2);
    for (const auto& [key, v] : seg.segment_entries) CHECK(v == doctest::Approx(100.0));
    for (const auto& [key, v] : sys.system_entries) CHECK(v == doctest::Approx(100.0));
}

TEST_CASE("score_dataset handles empty hypothesis strings") {
    EvalDataset ds = tiny_dataset(true);
    ds.hypotheses["mt1"][0] = "";
    MetricConfig bleu;
    auto [seg, sys] = score_dataset(bleu, ds);
    CHECK(seg.segment_entries.at({"mt1", "d", 0}) == 0.0);
}

TEST_CASE("score_dataset is thread-count invariant") {
    EvalDataset ds = tiny_dataset(false);
    MetricConfig chrf;
    chrf.kind = MetricKind::chrf;
    auto [seg1, sys1] = score_dataset(chrf, ds, 1);
    auto [seg4, sys4] = score_dataset(chrf, ds, 4);
    CHECK(scores_to_tsv(seg1) == scores_to_tsv(seg4));
    CHECK(scores_to_tsv(sys1) == scores_to_tsv(sys4));
}

// Small brute-force reference used as a spot check; the acceptance suite
// runs the full 200-pair oracle comparison.
namespace {

double oracle_chrf(const std::string& hyp, const std::string& ref) {
    double prec_sum = 0.0, rec_sum = 0.0;
    int included = 0;
    for (int n = 1; n <= 6; ++n) {
        NgramCounts hg = char_ngrams(hyp, n, true);
        NgramCounts rg = char_ngrams(ref, n, true);
        long long overlap = intersection_size(hg, rg);
        long long ht = hg.total(), rt = rg.total();
        if (ht == 0 && rt == 0) continue;
        prec_sum += ht > 0 ? double(overlap) / double(ht) : 0.0;
        rec_sum += rt > 0 ? double(overlap) / double(rt) : 0.0;
        ++included;
    }
    if (included == 0) return 0.0;
    double p = prec_sum / included, r = rec_sum / included;
    double denom = 4.0 * p + r;
    return denom > 0 ? 100.0 * 5.0 * p * r / denom : 0.0;
}

}  // namespace

TEST_CASE("chrf spot-matches a direct recomputation") {
    Rng rng(321);
    for (int trial = 0; trial < 40; ++trial) {
        auto sentence = [&]() {
            std::string text;
            std::size_t words = 1 + rng.next_below(3);
            for (std::size_t w = 0; w < words; ++w) {
                if (w) text += ' ';
                std::size_t len = 1 + rng.next_below(5);
                for (std::size_t i = 0; i < len; ++i)
                    text += static_cast<char>('a' + rng.next_below(5));
            }
            return text;
        };
        std::string hyp = sentence();
        std::string ref = sentence();
        CHECK(chrf_sentence(hyp, ref).value ==
              doctest::Approx(oracle_chrf(hyp, ref)).epsilon(1e-12));
    }
}
