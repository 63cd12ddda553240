#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dialeval {

struct SegmentKey {
    std::string doc_id;
    int seg_index = 0;

    auto operator<=>(const SegmentKey&) const = default;
};

struct Segment {
    std::string doc_id;
    int seg_index = 0;
    std::string source;
    std::string reference;
    bool reference_missing = false;

    SegmentKey key() const { return {doc_id, seg_index}; }
};

// One language pair + dialect region: segments plus a complete grid of
// per-system hypotheses aligned with the segment order.
struct EvalDataset {
    std::string lang_pair;            // e.g. "en-gsw_be"
    std::string dialect_region;       // "BE", "ZH", or any other label
    std::vector<Segment> segments;    // ordered by (doc_id, seg_index)
    std::vector<std::string> system_ids;                    // sorted
    std::map<std::string, std::vector<std::string>> hypotheses;  // system -> per-segment

    std::size_t segment_position(const SegmentKey& key) const;  // throws on miss
    bool has_segment(const SegmentKey& key) const;
    const std::string& hypothesis(const std::string& system_id, const SegmentKey& key) const;

    std::string source_language() const;   // lang_pair up to the first '-'
    std::string target_language() const;   // lang_pair after the first '-'
};

struct JudgmentRecord {
    std::string system_id;
    std::string doc_id;
    int seg_index = 0;
    std::string rater_id;
    double score = 0.0;  // DA in [0, 100]
};

struct JudgmentSet {
    std::vector<JudgmentRecord> records;
};

enum class ScoreLevel { segment, system };

struct ScoreEntryKey {
    std::string system_id;
    std::string doc_id;
    int seg_index = 0;

    auto operator<=>(const ScoreEntryKey&) const = default;
};

// Uniform carrier of metric or human scores at one level.
struct ScoreTable {
    std::string metric_id;
    ScoreLevel level = ScoreLevel::segment;
    bool higher_is_better = true;
    std::map<ScoreEntryKey, double> segment_entries;  // level == segment
    std::map<std::string, double> system_entries;     // level == system
};

struct DatasetLoadOptions {
    std::string lang_pair;
    std::string dialect_region;
    bool allow_missing_reference = false;
};

// JSONL, one record per segment:
//   {"doc_id": str, "seg_index": int, "source": str, "reference": str,
//    "hypotheses": {system_id: str}}
// All text is NFC-normalized on load. Every system must cover every segment.
EvalDataset load_dataset(const std::string& path, const DatasetLoadOptions& options = {});

// Inverse of load_dataset modulo NFC normalization and key ordering.
std::string dataset_to_jsonl(const EvalDataset& dataset);
void write_dataset(const std::string& path, const EvalDataset& dataset);

// TSV: system_id, doc_id, seg_index, rater_id, score. Scores in [0, 100],
// keys validated against the dataset.
JudgmentSet load_judgments(const std::string& path, const EvalDataset& dataset);

// Per-(system, doc, seg) arithmetic mean across raters; metric_id "human".
ScoreTable average_judgments(const JudgmentSet& judgments);

// TSV: metric_id, level, system_id, doc_id, seg_index, score with "-"
// placeholders at system level. One metric and one level per file.
ScoreTable load_scores(const std::string& path, const EvalDataset& dataset);

std::string scores_to_tsv(const ScoreTable& table);
void write_scores(const std::string& path, const ScoreTable& table);

// Per-system arithmetic mean of a complete segment table.
ScoreTable system_average(const ScoreTable& segment_table);

// Checks a segment table covers exactly the dataset grid; returns missing
// keys (empty when complete).
std::vector<ScoreEntryKey> missing_grid_keys(const ScoreTable& segment_table,
                                             const EvalDataset& dataset);

}  // namespace dialeval
