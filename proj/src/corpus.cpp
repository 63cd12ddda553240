#include "dialeval/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dialeval/unicode.hpp"
#include "dialeval/util.hpp"

namespace dialeval {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string segment_label(const std::string& doc_id, int seg_index) {
    return doc_id + ":" + std::to_string(seg_index);
}

}  // namespace

std::size_t EvalDataset::segment_position(const SegmentKey& key) const {
    auto it = std::lower_bound(segments.begin(), segments.end(), key,
                               [](const Segment& s, const SegmentKey& k) { return s.key() < k; });
    if (it == segments.end() || it->key() != key) {
        throw ValidationError("unknown segment (" + key.doc_id + ", " +
                              std::to_string(key.seg_index) + ")");
    }
    return static_cast<std::size_t>(it - segments.begin());
}

bool EvalDataset::has_segment(const SegmentKey& key) const {
    auto it = std::lower_bound(segments.begin(), segments.end(), key,
                               [](const Segment& s, const SegmentKey& k) { return s.key() < k; });
    return it != segments.end() && it->key() == key;
}

const std::string& EvalDataset::hypothesis(const std::string& system_id,
                                           const SegmentKey& key) const {
    auto it = hypotheses.find(system_id);
    if (it == hypotheses.end()) throw ValidationError("unknown system '" + system_id + "'");
    return it->second[segment_position(key)];
}

std::string EvalDataset::source_language() const {
    std::size_t pos = lang_pair.find('-');
    return pos == std::string::npos ? lang_pair : lang_pair.substr(0, pos);
}

std::string EvalDataset::target_language() const {
    std::size_t pos = lang_pair.find('-');
    return pos == std::string::npos ? lang_pair : lang_pair.substr(pos + 1);
}

EvalDataset load_dataset(const std::string& path, const DatasetLoadOptions& options) {
    std::string content = read_file(path);

    EvalDataset dataset;
    dataset.lang_pair = options.lang_pair;
    dataset.dialect_region = options.dialect_region;

    struct RawRecord {
        Segment segment;
        std::map<std::string, std::string> hyps;
    };
    std::vector<RawRecord> records;
    std::set<std::string> all_systems;
    std::set<SegmentKey> seen_keys;

    std::size_t lineno = 0;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        ordered_json rec;
        try {
            rec = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError(path + ":" + std::to_string(lineno) +
                                  ": JSON parse error: " + e.what());
        }
        auto require = [&](const char* field) -> const ordered_json& {
            if (!rec.contains(field)) {
                throw ValidationError(path + ":" + std::to_string(lineno) +
                                      ": missing field '" + field + "'");
            }
            return rec.at(field);
        };

        RawRecord raw;
        const auto& doc = require("doc_id");
        const auto& idx = require("seg_index");
        const auto& src = require("source");
        const auto& hyp = require("hypotheses");
        if (!doc.is_string() || !idx.is_number_integer() || !src.is_string() || !hyp.is_object()) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": bad field types");
        }
        raw.segment.doc_id = nfc_normalize(doc.get<std::string>());
        raw.segment.seg_index = idx.get<int>();
        if (raw.segment.seg_index < 0) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": negative seg_index");
        }
        raw.segment.source = nfc_normalize(src.get<std::string>());
        if (raw.segment.source.empty()) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": empty source");
        }

        const auto& ref = require("reference");
        if (ref.is_null()) {
            if (!options.allow_missing_reference) {
                throw ValidationError(path + ":" + std::to_string(lineno) +
                                      ": missing reference (enable allow_missing_reference "
                                      "for reference-free use)");
            }
            raw.segment.reference_missing = true;
        } else if (ref.is_string()) {
            raw.segment.reference = nfc_normalize(ref.get<std::string>());
            if (raw.segment.reference.empty() && !options.allow_missing_reference) {
                throw ValidationError(path + ":" + std::to_string(lineno) + ": empty reference");
            }
        } else {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": bad reference type");
        }

        if (!seen_keys.insert(raw.segment.key()).second) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": duplicate segment (" +
                                  raw.segment.doc_id + ", " +
                                  std::to_string(raw.segment.seg_index) + ")");
        }
        for (const auto& [system_id, text] : hyp.items()) {
            if (!text.is_string()) {
                throw ValidationError(path + ":" + std::to_string(lineno) +
                                      ": hypothesis for '" + system_id + "' is not a string");
            }
            raw.hyps[nfc_normalize(system_id)] = nfc_normalize(text.get<std::string>());
        }
        for (const auto& [system_id, text] : raw.hyps) all_systems.insert(system_id);
        records.push_back(std::move(raw));
    }

    if (records.empty()) throw ValidationError(path + ": no segments");

    std::sort(records.begin(), records.end(), [](const RawRecord& a, const RawRecord& b) {
        return a.segment.key() < b.segment.key();
    });

    dataset.system_ids.assign(all_systems.begin(), all_systems.end());
    for (const auto& system_id : dataset.system_ids) {
        dataset.hypotheses[system_id].reserve(records.size());
    }

    std::vector<std::string> missing;
    for (const auto& raw : records) {
        dataset.segments.push_back(raw.segment);
        for (const auto& system_id : dataset.system_ids) {
            auto it = raw.hyps.find(system_id);
            if (it == raw.hyps.end()) {
                missing.push_back("(" + system_id + ", " + raw.segment.doc_id + ", " +
                                  std::to_string(raw.segment.seg_index) + ")");
                dataset.hypotheses[system_id].emplace_back();
            } else {
                dataset.hypotheses[system_id].push_back(it->second);
            }
        }
    }
    if (!missing.empty()) {
        throw ValidationError(path + ": incomplete system grid, missing " +
                              std::to_string(missing.size()) + " hypotheses: " +
                              join(missing, ", "));
    }
    return dataset;
}

std::string dataset_to_jsonl(const EvalDataset& dataset) {
    std::string out;
    for (std::size_t i = 0; i < dataset.segments.size(); ++i) {
        const Segment& seg = dataset.segments[i];
        ordered_json rec;
        rec["doc_id"] = seg.doc_id;
        rec["seg_index"] = seg.seg_index;
        rec["source"] = seg.source;
        if (seg.reference_missing) {
            rec["reference"] = nullptr;
        } else {
            rec["reference"] = seg.reference;
        }
        ordered_json hyps = ordered_json::object();
        for (const auto& system_id : dataset.system_ids) {
            hyps[system_id] = dataset.hypotheses.at(system_id)[i];
        }
        rec["hypotheses"] = std::move(hyps);
        out += rec.dump();
        out += '\n';
    }
    return out;
}

void write_dataset(const std::string& path, const EvalDataset& dataset) {
    write_file(path, dataset_to_jsonl(dataset));
}

JudgmentSet load_judgments(const std::string& path, const EvalDataset& dataset) {
    auto rows = read_tsv(path, {"system_id", "doc_id", "seg_index", "rater_id", "score"});
    JudgmentSet judgments;
    judgments.records.reserve(rows.size());
    std::size_t rowno = 1;
    for (const auto& row : rows) {
        ++rowno;
        std::string where = path + ":" + std::to_string(rowno);
        JudgmentRecord rec;
        rec.system_id = nfc_normalize(row[0]);
        rec.doc_id = nfc_normalize(row[1]);
        rec.seg_index = parse_int(row[2], where);
        rec.rater_id = row[3];
        rec.score = parse_double(row[4], where);
        if (rec.score < 0.0 || rec.score > 100.0) {
            throw ValidationError(where + ": score " + row[4] + " outside [0, 100]");
        }
        if (!dataset.hypotheses.count(rec.system_id)) {
            throw ValidationError(where + ": unknown system '" + rec.system_id + "'");
        }
        if (!dataset.has_segment({rec.doc_id, rec.seg_index})) {
            throw ValidationError(where + ": unknown segment " +
                                  segment_label(rec.doc_id, rec.seg_index));
        }
        judgments.records.push_back(std::move(rec));
    }
    return judgments;
}

ScoreTable average_judgments(const JudgmentSet& judgments) {
    if (judgments.records.empty()) throw ValidationError("average_judgments: empty judgment set");
    std::map<ScoreEntryKey, std::pair<double, long long>> sums;
    for (const auto& rec : judgments.records) {
        auto& acc = sums[{rec.system_id, rec.doc_id, rec.seg_index}];
        acc.first += rec.score;
        acc.second += 1;
    }
    ScoreTable table;
    table.metric_id = "human";
    table.level = ScoreLevel::segment;
    table.higher_is_better = true;
    for (const auto& [key, acc] : sums) {
        table.segment_entries[key] = acc.first / static_cast<double>(acc.second);
    }
    return table;
}

ScoreTable load_scores(const std::string& path, const EvalDataset& dataset) {
    auto rows = read_tsv(path, {"metric_id", "level", "system_id", "doc_id", "seg_index", "score"});
    if (rows.empty()) throw ValidationError(path + ": no score rows");

    ScoreTable table;
    table.metric_id = rows[0][0];
    std::string level_str = rows[0][1];
    if (level_str == "segment") {
        table.level = ScoreLevel::segment;
    } else if (level_str == "system") {
        table.level = ScoreLevel::system;
    } else {
        throw ValidationError(path + ": unknown level '" + level_str + "'");
    }

    std::size_t rowno = 1;
    for (const auto& row : rows) {
        ++rowno;
        std::string where = path + ":" + std::to_string(rowno);
        if (row[0] != table.metric_id) {
            throw ValidationError(where + ": mixed metric_ids ('" + table.metric_id + "' vs '" +
                                  row[0] + "')");
        }
        if (row[1] != level_str) {
            throw ValidationError(where + ": mixed levels in one file ('" + level_str + "' vs '" +
                                  row[1] + "')");
        }
        std::string system_id = nfc_normalize(row[2]);
        if (!dataset.hypotheses.count(system_id)) {
            throw ValidationError(where + ": unknown system '" + system_id + "'");
        }
        double score = parse_double(row[5], where);
        if (table.level == ScoreLevel::system) {
            if (row[3] != "-" || row[4] != "-") {
                throw ValidationError(where + ": system-level rows need '-' placeholders");
            }
            if (!table.system_entries.emplace(system_id, score).second) {
                throw ValidationError(where + ": duplicate system entry '" + system_id + "'");
            }
        } else {
            std::string doc_id = nfc_normalize(row[3]);
            int seg_index = parse_int(row[4], where);
            if (!dataset.has_segment({doc_id, seg_index})) {
                throw ValidationError(where + ": unknown segment " +
                                      segment_label(doc_id, seg_index));
            }
            ScoreEntryKey key{system_id, doc_id, seg_index};
            if (!table.segment_entries.emplace(key, score).second) {
                throw ValidationError(where + ": duplicate segment entry (" + system_id + ", " +
                                      segment_label(doc_id, seg_index) + ")");
            }
        }
    }
    // Gaps in a segment table are a warning, not an error: downstream ops
    // that need the full grid check again and fail there.
    if (table.level == ScoreLevel::segment) {
        auto missing = missing_grid_keys(table, dataset);
        if (!missing.empty()) {
            std::fprintf(stderr, "warning: %s: segment table '%s' misses %zu grid entries\n",
                         path.c_str(), table.metric_id.c_str(), missing.size());
        }
    }
    return table;
}

std::string scores_to_tsv(const ScoreTable& table) {
    std::string out = "metric_id\tlevel\tsystem_id\tdoc_id\tseg_index\tscore\n";
    if (table.level == ScoreLevel::system) {
        for (const auto& [system_id, score] : table.system_entries) {
            out += table.metric_id + "\tsystem\t" + system_id + "\t-\t-\t" +
                   format_double(score) + "\n";
        }
    } else {
        for (const auto& [key, score] : table.segment_entries) {
            out += table.metric_id + "\tsegment\t" + key.system_id + "\t" + key.doc_id + "\t" +
                   std::to_string(key.seg_index) + "\t" + format_double(score) + "\n";
        }
    }
    return out;
}

void write_scores(const std::string& path, const ScoreTable& table) {
    write_file(path, scores_to_tsv(table));
}

std::vector<ScoreEntryKey> missing_grid_keys(const ScoreTable& segment_table,
                                             const EvalDataset& dataset) {
    std::vector<ScoreEntryKey> missing;
    for (const auto& system_id : dataset.system_ids) {
        for (const auto& seg : dataset.segments) {
            ScoreEntryKey key{system_id, seg.doc_id, seg.seg_index};
            if (!segment_table.segment_entries.count(key)) missing.push_back(key);
        }
    }
    return missing;
}

ScoreTable system_average(const ScoreTable& segment_table) {
    if (segment_table.level != ScoreLevel::segment) {
        throw ValidationError("system_average: input must be a segment-level table");
    }
    // Means over unequal supports are not comparable, so gaps are an error.
    std::map<std::string, std::pair<double, long long>> sums;
    std::set<SegmentKey> all_segments;
    for (const auto& [key, score] : segment_table.segment_entries) {
        auto& acc = sums[key.system_id];
        acc.first += score;
        acc.second += 1;
        all_segments.insert({key.doc_id, key.seg_index});
    }
    if (sums.empty()) throw ValidationError("system_average: empty table");

    std::vector<std::string> missing;
    for (const auto& [system_id, acc] : sums) {
        if (acc.second != static_cast<long long>(all_segments.size())) {
            for (const auto& seg : all_segments) {
                if (!segment_table.segment_entries.count({system_id, seg.doc_id, seg.seg_index})) {
                    missing.push_back("(" + system_id + ", " +
                                      segment_label(seg.doc_id, seg.seg_index) + ")");
                }
            }
        }
    }
    if (!missing.empty()) {
        throw ValidationError("system_average: incomplete grid, missing " + join(missing, ", "));
    }

    ScoreTable table;
    table.metric_id = segment_table.metric_id;
    table.level = ScoreLevel::system;
    table.higher_is_better = segment_table.higher_is_better;
    for (const auto& [system_id, acc] : sums) {
        table.system_entries[system_id] = acc.first / static_cast<double>(acc.second);
    }
    return table;
}

}  // namespace dialeval
