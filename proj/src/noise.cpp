#include "dialeval/noise.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <nlohmann/json.hpp>

namespace dialeval {

namespace {

constexpr const char* kFieldSource = "source";
constexpr const char* kFieldReference = "reference";

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

char32_t draw_alphabet_char(const Alphabet& alphabet, Rng& rng) {
    return alphabet.chars[rng.next_below(alphabet.chars.size())];
}

// Uniform over alphabet \ {exclude} without rejection; empty result set is
// the caller's problem.
char32_t draw_alphabet_char_excluding(const Alphabet& alphabet, char32_t exclude, Rng& rng) {
    auto it = std::lower_bound(alphabet.chars.begin(), alphabet.chars.end(), exclude);
    bool present = it != alphabet.chars.end() && *it == exclude;
    if (!present) return draw_alphabet_char(alphabet, rng);
    std::size_t skip = static_cast<std::size_t>(it - alphabet.chars.begin());
    std::size_t idx = rng.next_below(alphabet.chars.size() - 1);
    if (idx >= skip) ++idx;
    return alphabet.chars[idx];
}

NoiseEdit apply_substitute(std::vector<char32_t>& cps, int token_index, const Alphabet& alphabet,
                           Rng& rng) {
    int pos = static_cast<int>(rng.next_below(cps.size()));
    char32_t old_char = cps[static_cast<std::size_t>(pos)];
    if (alphabet.chars.size() == 1 && alphabet.chars[0] == old_char) {
        // No distinct replacement exists; an insertion is the nearest
        // distance-1 edit that still uses only alphabet characters.
        char32_t c = alphabet.chars[0];
        int ins = static_cast<int>(rng.next_below(cps.size() + 1));
        cps.insert(cps.begin() + ins, c);
        NoiseEdit edit;
        edit.token_index = token_index;
        edit.op = NoiseOp::insert;
        edit.char_position = ins;
        edit.new_char = utf8_encode({c});
        return edit;
    }
    char32_t new_char = draw_alphabet_char_excluding(alphabet, old_char, rng);
    cps[static_cast<std::size_t>(pos)] = new_char;
    NoiseEdit edit;
    edit.token_index = token_index;
    edit.op = NoiseOp::substitute;
    edit.char_position = pos;
    edit.old_char = utf8_encode({old_char});
    edit.new_char = utf8_encode({new_char});
    return edit;
}

}  // namespace

std::uint64_t Alphabet::content_hash() const {
    std::uint64_t h = fnv1a64(language);
    for (char32_t c : chars) {
        std::string entry;
        utf8_append(entry, c);
        entry += ":" + std::to_string(counts.at(c)) + ";";
        h = fnv1a64(entry, h);
    }
    return h;
}

std::string noise_op_name(NoiseOp op) {
    switch (op) {
        case NoiseOp::substitute: return "substitute";
        case NoiseOp::del: return "delete";
        case NoiseOp::insert: return "insert";
    }
    return "?";
}

NoiseOp noise_op_from_name(const std::string& name) {
    if (name == "substitute") return NoiseOp::substitute;
    if (name == "delete") return NoiseOp::del;
    if (name == "insert") return NoiseOp::insert;
    throw ValidationError("unknown noise operation '" + name + "'");
}

std::string noise_target_name(NoiseTarget target) {
    switch (target) {
        case NoiseTarget::source: return "source";
        case NoiseTarget::hypothesis: return "hypothesis";
        case NoiseTarget::reference: return "reference";
    }
    return "?";
}

NoiseTarget noise_target_from_name(const std::string& name) {
    if (name == "source") return NoiseTarget::source;
    if (name == "hypothesis") return NoiseTarget::hypothesis;
    if (name == "reference") return NoiseTarget::reference;
    throw ValidationError("unknown noise target '" + name + "'");
}

Alphabet build_alphabet(const std::vector<std::string>& corpus, const std::string& language,
                        long long min_count) {
    Alphabet alphabet;
    alphabet.language = language;
    alphabet.min_count = min_count;
    for (const auto& text : corpus) {
        for (char32_t cp : utf8_decode(text, "alphabet corpus")) {
            if (!is_unicode_space(cp)) ++alphabet.counts[cp];
        }
    }
    for (const auto& [cp, count] : alphabet.counts) {
        if (count > min_count) alphabet.chars.push_back(cp);
    }
    return alphabet;
}

std::pair<TokenList, NoiseLog> noise_sentence(const TokenList& tokens, const Alphabet& alphabet,
                                              const NoiseConfig& cfg, Rng& rng) {
    if (cfg.rate < 0.0 || cfg.rate > 1.0) throw ValidationError("noise: rate must be in [0, 1]");
    if (cfg.operations.empty()) throw ValidationError("noise: no operations enabled");

    NoiseLog log;
    if (tokens.empty()) return {tokens, log};

    int k = round_half_up(cfg.rate * static_cast<double>(tokens.size()));
    if (k == 0) return {tokens, log};
    if (alphabet.empty()) {
        throw ValidationError("noise: empty alphabet for language '" + alphabet.language + "'");
    }

    // Partial Fisher-Yates draws k distinct indices; edits then run in
    // ascending token order.
    std::vector<int> indices(tokens.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);
    for (int i = 0; i < k; ++i) {
        std::size_t j = static_cast<std::size_t>(i) +
                        rng.next_below(indices.size() - static_cast<std::size_t>(i));
        std::swap(indices[static_cast<std::size_t>(i)], indices[j]);
    }
    std::vector<int> chosen(indices.begin(), indices.begin() + k);
    std::sort(chosen.begin(), chosen.end());

    std::vector<NoiseOp> ops(cfg.operations.begin(), cfg.operations.end());
    TokenList out = tokens;
    for (int token_index : chosen) {
        std::vector<char32_t> cps =
            utf8_decode(out[static_cast<std::size_t>(token_index)], "noise token");
        NoiseOp op = ops[rng.next_below(ops.size())];
        if (op == NoiseOp::del && cps.size() == 1) op = NoiseOp::substitute;

        NoiseEdit edit;
        switch (op) {
            case NoiseOp::substitute: {
                edit = apply_substitute(cps, token_index, alphabet, rng);
                break;
            }
            case NoiseOp::del: {
                int pos = static_cast<int>(rng.next_below(cps.size()));
                edit.token_index = token_index;
                edit.op = NoiseOp::del;
                edit.char_position = pos;
                edit.old_char = utf8_encode({cps[static_cast<std::size_t>(pos)]});
                cps.erase(cps.begin() + pos);
                break;
            }
            case NoiseOp::insert: {
                char32_t c = draw_alphabet_char(alphabet, rng);
                int pos = static_cast<int>(rng.next_below(cps.size() + 1));
                cps.insert(cps.begin() + pos, c);
                edit.token_index = token_index;
                edit.op = NoiseOp::insert;
                edit.char_position = pos;
                edit.new_char = utf8_encode({c});
                break;
            }
        }
        out[static_cast<std::size_t>(token_index)] = utf8_encode(cps);
        log.push_back(std::move(edit));
    }
    return {out, log};
}

std::pair<EvalDataset, std::vector<FieldNoiseLog>> noise_dataset(
    const EvalDataset& dataset, const std::map<std::string, Alphabet>& alphabets,
    const NoiseConfig& cfg, int threads) {
    if (threads < 1) throw ValidationError("noise_dataset: threads must be >= 1");

    auto alphabet_for = [&](const std::string& language) -> const Alphabet& {
        auto it = alphabets.find(language);
        if (it == alphabets.end()) {
            throw ValidationError("noise_dataset: no alphabet for language '" + language + "'");
        }
        return it->second;
    };
    // Resolve alphabets up front so coverage errors fire before any work.
    const Alphabet* source_alphabet = nullptr;
    const Alphabet* target_alphabet = nullptr;
    if (cfg.targets.count(NoiseTarget::source)) {
        source_alphabet = &alphabet_for(dataset.source_language());
    }
    if (cfg.targets.count(NoiseTarget::hypothesis) || cfg.targets.count(NoiseTarget::reference)) {
        target_alphabet = &alphabet_for(dataset.target_language());
    }

    EvalDataset out = dataset;
    const std::size_t n_segments = dataset.segments.size();

    // One log slot per (segment, field) in a fixed order: source, reference,
    // then hypotheses by sorted system id.
    std::vector<std::string> fields;
    if (cfg.targets.count(NoiseTarget::source)) fields.push_back(kFieldSource);
    if (cfg.targets.count(NoiseTarget::reference)) fields.push_back(kFieldReference);
    if (cfg.targets.count(NoiseTarget::hypothesis)) {
        for (const auto& system_id : dataset.system_ids) fields.push_back("hypothesis:" + system_id);
    }

    std::vector<FieldNoiseLog> logs(n_segments * fields.size());
    auto job = [&](std::size_t idx) {
        std::size_t seg = idx / fields.size();
        const std::string& field = fields[idx % fields.size()];
        const Segment& segment = dataset.segments[seg];

        FieldNoiseLog& slot = logs[idx];
        slot.doc_id = segment.doc_id;
        slot.seg_index = segment.seg_index;
        slot.field = field;

        std::string* text = nullptr;
        const Alphabet* alphabet = nullptr;
        if (field == kFieldSource) {
            text = &out.segments[seg].source;
            alphabet = source_alphabet;
        } else if (field == kFieldReference) {
            if (segment.reference_missing) return;
            text = &out.segments[seg].reference;
            alphabet = target_alphabet;
        } else {
            std::string system_id = field.substr(std::string("hypothesis:").size());
            text = &out.hypotheses.at(system_id)[seg];
            alphabet = target_alphabet;
        }

        Rng rng(derive_stream_seed(cfg.seed, segment.doc_id, segment.seg_index, field));
        auto [tokens, edit_log] = noise_sentence(whitespace_tokenize(*text), *alphabet, cfg, rng);
        if (!edit_log.empty()) {
            *text = join(tokens, " ");
            slot.edits = std::move(edit_log);
        }
    };

    const std::size_t total_jobs = logs.size();
    if (threads == 1 || total_jobs < 2) {
        for (std::size_t i = 0; i < total_jobs; ++i) job(i);
    } else {
        std::vector<std::thread> pool;
        std::size_t used = std::min<std::size_t>(static_cast<std::size_t>(threads), total_jobs);
        for (std::size_t t = 0; t < used; ++t) {
            pool.emplace_back([&, t]() {
                for (std::size_t i = t; i < total_jobs; i += used) job(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    return {std::move(out), std::move(logs)};
}

std::string noise_log_to_jsonl(const std::vector<FieldNoiseLog>& logs) {
    std::string out;
    for (const auto& log : logs) {
        nlohmann::ordered_json rec;
        rec["doc_id"] = log.doc_id;
        rec["seg_index"] = log.seg_index;
        rec["field"] = log.field;
        nlohmann::ordered_json edits = nlohmann::ordered_json::array();
        for (const auto& edit : log.edits) {
            nlohmann::ordered_json e;
            e["token"] = edit.token_index;
            e["op"] = noise_op_name(edit.op);
            e["pos"] = edit.char_position;
            if (!edit.old_char.empty()) e["old"] = edit.old_char;
            if (!edit.new_char.empty()) e["new"] = edit.new_char;
            edits.push_back(std::move(e));
        }
        rec["edits"] = std::move(edits);
        out += rec.dump();
        out += '\n';
    }
    return out;
}

}  // namespace dialeval
