#include "doctest.h"

#include <cmath>
#include <set>

#include "dialeval/noise.hpp"
#include "helpers.hpp"

using namespace dialeval;

namespace {

Alphabet test_alphabet(const std::string& chars) {
    std::vector<std::string> corpus;
    for (char c : chars) corpus.push_back(std::string(2, c));  // count 2 > min_count 0
    return build_alphabet(corpus, "xx", 0);
}

TokenList make_tokens(int n) {
    TokenList tokens;
    for (int i = 0; i < n; ++i) tokens.push_back("word" + std::to_string(i));
    return tokens;
}

}  // namespace

TEST_CASE("build_alphabet thresholds strictly and skips whitespace") {
    std::string a_1500(1500, 'a');
    std::string b_999(999, 'b');
    std::string spaces(9999, ' ');
    Alphabet alphabet = build_alphabet({a_1500, b_999, spaces}, "xx", 1000);
    CHECK(alphabet.chars == std::vector<char32_t>{U'a'});
    CHECK(alphabet.counts.at(U'a') == 1500);
    CHECK(alphabet.counts.at(U'b') == 999);
    CHECK(alphabet.counts.count(U' ') == 0);

    // Exactly min_count occurrences is not enough.
    std::string c_1000(1000, 'c');
    CHECK(build_alphabet({c_1000}, "xx", 1000).chars.empty());
}

TEST_CASE("build_alphabet has no character-class filtering") {
    Alphabet alphabet = build_alphabet({"ab"}, "xx", 0);
    CHECK(alphabet.chars == std::vector<char32_t>{U'a', U'b'});
    Alphabet digits = build_alphabet({"0123 0123"}, "xx", 0);
    CHECK(digits.chars == std::vector<char32_t>{U'0', U'1', U'2', U'3'});
}

TEST_CASE("noise_sentence edits exactly round_half_up(rate*n) tokens") {
    Alphabet alphabet = test_alphabet("abcdef");
    NoiseConfig cfg;
    cfg.rate = 0.15;

    Rng rng(1);
    auto [out20, log20] = noise_sentence(make_tokens(20), alphabet, cfg, rng);
    CHECK(log20.size() == 3);
    std::set<int> touched;
    for (const auto& edit : log20) touched.insert(edit.token_index);
    CHECK(touched.size() == 3);

    Rng rng2(1);
    auto [out2, log2] = noise_sentence(make_tokens(2), alphabet, cfg, rng2);
    CHECK(log2.empty());
    CHECK(out2 == make_tokens(2));

    Rng rng10(1);
    auto [out10, log10] = noise_sentence(make_tokens(10), alphabet, cfg, rng10);
    CHECK(log10.size() == static_cast<std::size_t>(std::floor(0.15 * 10 + 0.5)));
}

TEST_CASE("noise_sentence is deterministic for a fixed stream") {
    Alphabet alphabet = test_alphabet("abc");
    NoiseConfig cfg;
    Rng r1(77), r2(77);
    auto a = noise_sentence(make_tokens(12), alphabet, cfg, r1);
    auto b = noise_sentence(make_tokens(12), alphabet, cfg, r2);
    CHECK(a.first == b.first);
    CHECK(a.second.size() == b.second.size());
}

TEST_CASE("delete on a single-character token falls back to substitution") {
    Alphabet alphabet = test_alphabet("xyz");
    NoiseConfig cfg;
    cfg.rate = 1.0;
    cfg.operations = {NoiseOp::del};
    Rng rng(5);
    auto [out, log] = noise_sentence({"a"}, alphabet, cfg, rng);
    REQUIRE(log.size() == 1);
    CHECK(log[0].op == NoiseOp::substitute);
    CHECK(utf8_decode(out[0]).size() == 1);
    char32_t result = utf8_decode(out[0])[0];
    CHECK(result != U'a');
    CHECK(std::set<char32_t>{U'x', U'y', U'z'}.count(result) == 1);
}

TEST_CASE("every modified token sits at Levenshtein distance exactly 1") {
    Alphabet alphabet = test_alphabet("abcde");
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        NoiseConfig cfg;
        cfg.rate = 0.4;
        Rng rng(seed);
        TokenList tokens = make_tokens(15);
        auto [out, log] = noise_sentence(tokens, alphabet, cfg, rng);
        REQUIRE(out.size() == tokens.size());
        std::set<int> modified;
        for (const auto& edit : log) modified.insert(edit.token_index);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (modified.count(static_cast<int>(i))) {
                CHECK(testutil::levenshtein(tokens[i], out[i]) == 1);
            } else {
                CHECK(tokens[i] == out[i]);
            }
        }
        // Introduced characters come from the alphabet.
        for (const auto& edit : log) {
            if (!edit.new_char.empty()) {
                char32_t c = utf8_decode(edit.new_char)[0];
                CHECK(std::binary_search(alphabet.chars.begin(), alphabet.chars.end(), c));
            }
        }
    }
}

TEST_CASE("substitution never reproduces the original character") {
    Alphabet alphabet = test_alphabet("ab");
    NoiseConfig cfg;
    cfg.rate = 1.0;
    cfg.operations = {NoiseOp::substitute};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        auto [out, log] = noise_sentence({"aaaa"}, alphabet, cfg, rng);
        REQUIRE(log.size() == 1);
        CHECK(log[0].old_char != log[0].new_char);
    }
}

namespace {

EvalDataset noise_fixture() {
    EvalDataset ds;
    ds.lang_pair = "en-gsw";
    ds.dialect_region = "BE";
    for (int d = 0; d < 2; ++d) {
        for (int s = 0; s < 4; ++s) {
            Segment seg;
            seg.doc_id = "doc" + std::to_string(d);
            seg.seg_index = s;
            seg.source = "english source words here for testing noise";
            seg.reference = "gsw reference words here for testing noise";
            ds.segments.push_back(seg);
        }
    }
    ds.system_ids = {"mt1", "mt2"};
    for (const auto& sys : ds.system_ids) {
        for (std::size_t i = 0; i < ds.segments.size(); ++i) {
            ds.hypotheses[sys].push_back("hypothesis words from " + sys + " here for noise");
        }
    }
    return ds;
}

std::map<std::string, Alphabet> fixture_alphabets(const EvalDataset& ds) {
    std::vector<std::string> source_corpus, target_corpus;
    for (const auto& seg : ds.segments) {
        source_corpus.push_back(seg.source);
        target_corpus.push_back(seg.reference);
    }
    for (const auto& [sys, hyps] : ds.hypotheses) {
        for (const auto& hyp : hyps) target_corpus.push_back(hyp);
    }
    return {{ds.source_language(), build_alphabet(source_corpus, ds.source_language(), 0)},
            {ds.target_language(), build_alphabet(target_corpus, ds.target_language(), 0)}};
}

}  // namespace

TEST_CASE("noise_dataset honors targets") {
    EvalDataset ds = noise_fixture();
    auto alphabets = fixture_alphabets(ds);
    NoiseConfig cfg;
    cfg.rate = 0.5;
    cfg.seed = 3;
    cfg.targets = {NoiseTarget::reference};
    auto [noised, logs] = noise_dataset(ds, alphabets, cfg);
    bool any_reference_changed = false;
    for (std::size_t i = 0; i < ds.segments.size(); ++i) {
        CHECK(noised.segments[i].source == ds.segments[i].source);
        if (noised.segments[i].reference != ds.segments[i].reference)
            any_reference_changed = true;
    }
    CHECK(any_reference_changed);
    for (const auto& sys : ds.system_ids) CHECK(noised.hypotheses.at(sys) == ds.hypotheses.at(sys));
}

TEST_CASE("noise_dataset rate zero leaves everything untouched") {
    EvalDataset ds = noise_fixture();
    auto alphabets = fixture_alphabets(ds);
    NoiseConfig cfg;
    cfg.rate = 0.0;
    auto [noised, logs] = noise_dataset(ds, alphabets, cfg);
    CHECK(dataset_to_jsonl(noised) == dataset_to_jsonl(ds));
    for (const auto& log : logs) CHECK(log.edits.empty());
}

TEST_CASE("noise_dataset is deterministic and thread-count invariant") {
    EvalDataset ds = noise_fixture();
    auto alphabets = fixture_alphabets(ds);
    NoiseConfig cfg;
    cfg.rate = 0.3;
    cfg.seed = 99;
    auto [a, la] = noise_dataset(ds, alphabets, cfg, 1);
    auto [b, lb] = noise_dataset(ds, alphabets, cfg, 1);
    auto [c, lc] = noise_dataset(ds, alphabets, cfg, 4);
    CHECK(dataset_to_jsonl(a) == dataset_to_jsonl(b));
    CHECK(dataset_to_jsonl(a) == dataset_to_jsonl(c));
    CHECK(noise_log_to_jsonl(la) == noise_log_to_jsonl(lc));

    NoiseConfig other = cfg;
    other.seed = 100;
    auto [d, ld] = noise_dataset(ds, alphabets, other, 1);
    CHECK(dataset_to_jsonl(a) != dataset_to_jsonl(d));
}

TEST_CASE("noise_dataset requires alphabets for targeted languages") {
    EvalDataset ds = noise_fixture();
    auto alphabets = fixture_alphabets(ds);
    alphabets.erase(ds.source_language());
    NoiseConfig cfg;
    CHECK_THROWS_WITH_AS(noise_dataset(ds, alphabets, cfg),
                         doctest::Contains("no alphabet for language 'en'"), ValidationError);
    cfg.targets = {NoiseTarget::reference, NoiseTarget::hypothesis};
    CHECK_NOTHROW(noise_dataset(ds, alphabets, cfg));
}
