#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dialeval/corpus.hpp"

namespace dialeval {

// Two distinct hypothesis strings for the same segment, both human-rated
// perfect: same meaning, different spellings.
struct EquivalentPair {
    std::string pair_id;
    std::string doc_id;
    int seg_index = 0;
    std::string source;
    std::string reference;
    std::string hyp_a;
    std::string hyp_b;
    std::string system_a;
    std::string system_b;
};

enum class EditOperation { deletion, insertion, substitution };

std::string edit_operation_name(EditOperation op);
EditOperation edit_operation_from_name(const std::string& name);

// A pair plus a surface-close, meaning-changed variant C.
struct ChallengeTriple {
    EquivalentPair pair;
    EditOperation operation = EditOperation::substitution;
    char edited_from = 'A';  // which hypothesis C was derived from
    std::string hyp_c;
};

// Worksheet row: a pair with its assigned operation, hyp_c still to be
// written by an annotator.
struct WorksheetRow {
    EquivalentPair pair;
    EditOperation operation = EditOperation::substitution;
    char edited_from = 'A';
};

struct TripleOutcome {
    std::string pair_id;
    double score_a = 0.0;
    double score_b = 0.0;
    double score_c = 0.0;
    bool success = false;
};

struct SuccessReport {
    std::vector<TripleOutcome> triples;
    long long successes = 0;
    double success_rate = 0.0;  // successes / triples
};

// Per segment: unique hypothesis strings whose aggregated human score is
// >= threshold, emitted as all unordered pairs.
std::vector<EquivalentPair> extract_perfect_pairs(const EvalDataset& dataset,
                                                  const JudgmentSet& judgments,
                                                  double threshold = 100.0);

// Assigns each pair a uniformly drawn operation and edit target.
std::vector<WorksheetRow> make_worksheet(const std::vector<EquivalentPair>& pairs,
                                         std::uint64_t seed);

// TSV: pair_id, doc_id, seg_index, source, reference, hyp_a, hyp_b,
// operation, edited_from, hyp_c.
std::string worksheet_to_tsv(const std::vector<WorksheetRow>& rows);
void write_worksheet(const std::string& path, const std::vector<WorksheetRow>& rows);

// Reads a completed worksheet; rows whose hyp_c equals hyp_a or hyp_b (or is
// empty) are rejected with a per-row message.
std::vector<ChallengeTriple> load_triples(const std::string& path);

// scorer(source, reference, hypothesis) -> score on the metric's own scale.
// A triple succeeds iff |s_A - s_B| < min(s_A, s_B) - s_C (strict).
using TripleScorer = std::function<double(const std::string&, const std::string&,
                                          const std::string&)>;

SuccessReport success_rate(const std::vector<ChallengeTriple>& triples,
                           const TripleScorer& scorer);

// Same decision rule over precomputed (s_a, s_b, s_c), aligned with triples.
SuccessReport success_rate_from_scores(const std::vector<ChallengeTriple>& triples,
                                       const std::vector<std::array<double, 3>>& scores);

}  // namespace dialeval
