#include "dialeval/challenge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "dialeval/util.hpp"

namespace dialeval {

std::string edit_operation_name(EditOperation op) {
    switch (op) {
        case EditOperation::deletion: return "deletion";
        case EditOperation::insertion: return "insertion";
        case EditOperation::substitution: return "substitution";
    }
    return "?";
}

EditOperation edit_operation_from_name(const std::string& name) {
    if (name == "deletion") return EditOperation::deletion;
    if (name == "insertion") return EditOperation::insertion;
    if (name == "substitution") return EditOperation::substitution;
    throw ValidationError("unknown edit operation '" + name + "'");
}

std::vector<EquivalentPair> extract_perfect_pairs(const EvalDataset& dataset,
                                                  const JudgmentSet& judgments,
                                                  double threshold) {
    ScoreTable averaged = average_judgments(judgments);

    // Per segment: unique perfect hypothesis strings with a representative
    // system id (first system producing the string, in sorted system order).
    std::vector<EquivalentPair> pairs;
    int next_id = 1;
    for (const auto& segment : dataset.segments) {
        std::vector<std::pair<std::string, std::string>> perfect;  // (hyp, system)
        std::set<std::string> seen;
        for (const auto& system_id : dataset.system_ids) {
            auto it = averaged.segment_entries.find({system_id, segment.doc_id,
                                                     segment.seg_index});
            if (it == averaged.segment_entries.end() || it->second < threshold) continue;
            const std::string& hyp = dataset.hypothesis(system_id, segment.key());
            if (seen.insert(hyp).second) perfect.emplace_back(hyp, system_id);
        }
        for (std::size_t i = 0; i < perfect.size(); ++i) {
            for (std::size_t j = i + 1; j < perfect.size(); ++j) {
                EquivalentPair pair;
                char buf[16];
                std::snprintf(buf, sizeof(buf), "P%05d", next_id++);
                pair.pair_id = buf;
                pair.doc_id = segment.doc_id;
                pair.seg_index = segment.seg_index;
                pair.source = segment.source;
                pair.reference = segment.reference;
                pair.hyp_a = perfect[i].first;
                pair.hyp_b = perfect[j].first;
                pair.system_a = perfect[i].second;
                pair.system_b = perfect[j].second;
                pairs.push_back(std::move(pair));
            }
        }
    }
    return pairs;
}

std::vector<WorksheetRow> make_worksheet(const std::vector<EquivalentPair>& pairs,
                                         std::uint64_t seed) {
    Rng rng(splitmix64(seed));
    std::vector<WorksheetRow> rows;
    rows.reserve(pairs.size());
    for (const auto& pair : pairs) {
        WorksheetRow row;
        row.pair = pair;
        switch (rng.next_below(3)) {
            case 0: row.operation = EditOperation::deletion; break;
            case 1: row.operation = EditOperation::insertion; break;
            default: row.operation = EditOperation::substitution; break;
        }
        row.edited_from = rng.next_below(2) == 0 ? 'A' : 'B';
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

const std::vector<std::string> kWorksheetHeader = {
    "pair_id", "doc_id", "seg_index", "source", "reference",
    "hyp_a",   "hyp_b",  "operation", "edited_from", "hyp_c"};

void check_tsv_safe(const std::string& value, const std::string& what) {
    if (value.find('\t') != std::string::npos || value.find('\n') != std::string::npos) {
        throw ValidationError("worksheet: " + what + " contains a tab or newline");
    }
}

}  // namespace

std::string worksheet_to_tsv(const std::vector<WorksheetRow>& rows) {
    std::string out = join(kWorksheetHeader, "\t") + "\n";
    for (const auto& row : rows) {
        const EquivalentPair& p = row.pair;
        for (const std::string* field : {&p.source, &p.reference, &p.hyp_a, &p.hyp_b}) {
            check_tsv_safe(*field, "text for pair " + p.pair_id);
        }
        out += p.pair_id + "\t" + p.doc_id + "\t" + std::to_string(p.seg_index) + "\t" +
               p.source + "\t" + p.reference + "\t" + p.hyp_a + "\t" + p.hyp_b + "\t" +
               edit_operation_name(row.operation) + "\t" + std::string(1, row.edited_from) +
               "\t\n";
    }
    return out;
}

void write_worksheet(const std::string& path, const std::vector<WorksheetRow>& rows) {
    write_file(path, worksheet_to_tsv(rows));
}

std::vector<ChallengeTriple> load_triples(const std::string& path) {
    auto rows = read_tsv(path, kWorksheetHeader);
    std::vector<ChallengeTriple> triples;
    std::vector<std::string> problems;
    std::size_t rowno = 1;
    for (const auto& row : rows) {
        ++rowno;
        std::string where = path + ":" + std::to_string(rowno);
        ChallengeTriple triple;
        triple.pair.pair_id = row[0];
        triple.pair.doc_id = row[1];
        triple.pair.seg_index = parse_int(row[2], where);
        triple.pair.source = row[3];
        triple.pair.reference = row[4];
        triple.pair.hyp_a = row[5];
        triple.pair.hyp_b = row[6];
        triple.operation = edit_operation_from_name(row[7]);
        if (row[8] != "A" && row[8] != "B") {
            throw ValidationError(where + ": edited_from must be 'A' or 'B'");
        }
        triple.edited_from = row[8][0];
        triple.hyp_c = row[9];

        if (triple.pair.hyp_a == triple.pair.hyp_b) {
            problems.push_back(where + ": hyp_a equals hyp_b (pair " + triple.pair.pair_id + ")");
            continue;
        }
        if (triple.hyp_c.empty()) {
            problems.push_back(where + ": empty hyp_c (pair " + triple.pair.pair_id + ")");
            continue;
        }
        if (triple.hyp_c == triple.pair.hyp_a || triple.hyp_c == triple.pair.hyp_b) {
            problems.push_back(where + ": hyp_c equals hyp_" +
                               (triple.hyp_c == triple.pair.hyp_a ? "a" : "b") + " (pair " +
                               triple.pair.pair_id + ")");
            continue;
        }
        triples.push_back(std::move(triple));
    }
    if (!problems.empty()) {
        throw ValidationError("invalid triples:\n  " + join(problems, "\n  "));
    }
    return triples;
}

SuccessReport success_rate_from_scores(const std::vector<ChallengeTriple>& triples,
                                       const std::vector<std::array<double, 3>>& scores) {
    if (triples.size() != scores.size()) {
        throw ValidationError("success_rate: " + std::to_string(scores.size()) +
                              " score rows for " + std::to_string(triples.size()) + " triples");
    }
    SuccessReport report;
    report.triples.reserve(triples.size());
    for (std::size_t i = 0; i < triples.size(); ++i) {
        TripleOutcome outcome;
        outcome.pair_id = triples[i].pair.pair_id;
        outcome.score_a = scores[i][0];
        outcome.score_b = scores[i][1];
        outcome.score_c = scores[i][2];
        outcome.success = std::abs(outcome.score_a - outcome.score_b) <
                          std::min(outcome.score_a, outcome.score_b) - outcome.score_c;
        if (outcome.success) ++report.successes;
        report.triples.push_back(std::move(outcome));
    }
    report.success_rate = report.triples.empty()
                              ? 0.0
                              : static_cast<double>(report.successes) /
                                    static_cast<double>(report.triples.size());
    return report;
}

SuccessReport success_rate(const std::vector<ChallengeTriple>& triples,
                           const TripleScorer& scorer) {
    std::vector<std::array<double, 3>> scores;
    scores.reserve(triples.size());
    for (const auto& triple : triples) {
        auto score_one = [&](const std::string& hyp, const char* which) {
            try {
                return scorer(triple.pair.source, triple.pair.reference, hyp);
            } catch (const std::exception& e) {
                throw ValidationError("scorer failed on hypothesis " + std::string(which) +
                                      " of triple " + triple.pair.pair_id + ": " + e.what());
            }
        };
        double a = score_one(triple.pair.hyp_a, "A");
        double b = score_one(triple.pair.hyp_b, "B");
        double c = score_one(triple.hyp_c, "C");
        scores.push_back({a, b, c});
    }
    return success_rate_from_scores(triples, scores);
}

}  // namespace dialeval
