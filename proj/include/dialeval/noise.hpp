#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dialeval/corpus.hpp"
#include "dialeval/tokenize.hpp"
#include "dialeval/util.hpp"

namespace dialeval {

// Character inventory of one language, thresholded by frequency. Whitespace
// never enters the inventory.
struct Alphabet {
    std::string language;
    long long min_count = 1000;
    std::map<char32_t, long long> counts;   // all non-whitespace code points seen
    std::vector<char32_t> chars;            // sorted; counts[c] > min_count

    bool empty() const { return chars.empty(); }
    std::uint64_t content_hash() const;
};

enum class NoiseOp { substitute, del, insert };

std::string noise_op_name(NoiseOp op);
NoiseOp noise_op_from_name(const std::string& name);

enum class NoiseTarget { source, hypothesis, reference };

std::string noise_target_name(NoiseTarget target);
NoiseTarget noise_target_from_name(const std::string& name);

struct NoiseConfig {
    double rate = 0.15;
    std::uint64_t seed = 0;
    std::set<NoiseOp> operations = {NoiseOp::substitute, NoiseOp::del, NoiseOp::insert};
    std::set<NoiseTarget> targets = {NoiseTarget::source, NoiseTarget::hypothesis,
                                     NoiseTarget::reference};
};

// One character-level edit applied to one token.
struct NoiseEdit {
    int token_index = 0;
    NoiseOp op = NoiseOp::substitute;
    int char_position = 0;
    std::string old_char;  // substitute/delete
    std::string new_char;  // substitute/insert
};

using NoiseLog = std::vector<NoiseEdit>;

// Identifies one noised field of one segment in the dataset-level log.
struct FieldNoiseLog {
    std::string doc_id;
    int seg_index = 0;
    std::string field;  // "source", "reference", or "hypothesis:<system_id>"
    NoiseLog edits;
};

// Counts every non-whitespace code point; keeps those occurring strictly
// more than min_count times.
Alphabet build_alphabet(const std::vector<std::string>& corpus, const std::string& language,
                        long long min_count = 1000);

// round_half_up(rate * #tokens) distinct tokens get exactly one character
// edit each; every modified token ends at Levenshtein distance 1 from its
// original. Deterministic in the rng stream.
std::pair<TokenList, NoiseLog> noise_sentence(const TokenList& tokens, const Alphabet& alphabet,
                                              const NoiseConfig& cfg, Rng& rng);

// Applies noise_sentence to each targeted field of each segment. The rng
// stream is derived from (seed, doc_id, seg_index, field), so results do not
// depend on iteration order or thread count.
std::pair<EvalDataset, std::vector<FieldNoiseLog>> noise_dataset(
    const EvalDataset& dataset, const std::map<std::string, Alphabet>& alphabets,
    const NoiseConfig& cfg, int threads = 1);

// Sidecar JSONL: {"doc_id", "seg_index", "field", "edits": [...]}.
std::string noise_log_to_jsonl(const std::vector<FieldNoiseLog>& logs);

}  // namespace dialeval
