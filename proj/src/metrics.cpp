#include "dialeval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "dialeval/util.hpp"

namespace dialeval {

namespace {

bool is_ascii_punct(char32_t cp) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
}

// chrF word tokenization: whitespace split, then one leading or trailing
// punctuation character separated per token (trailing wins).
TokenList split_edge_punctuation(const TokenList& tokens) {
    TokenList out;
    out.reserve(tokens.size());
    for (const auto& token : tokens) {
        std::vector<char32_t> cps = utf8_decode(token, "chrf words");
        if (cps.size() <= 1) {
            out.push_back(token);
            continue;
        }
        if (is_ascii_punct(cps.back())) {
            out.push_back(utf8_encode({cps.begin(), cps.end() - 1}));
            out.push_back(utf8_encode({cps.back()}));
        } else if (is_ascii_punct(cps.front())) {
            out.push_back(utf8_encode({cps.front()}));
            out.push_back(utf8_encode({cps.begin() + 1, cps.end()}));
        } else {
            out.push_back(token);
        }
    }
    return out;
}

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

struct BleuStats {
    std::vector<long long> matches;  // per order, clipped
    std::vector<long long> totals;   // per order, hypothesis n-gram counts
    long long hyp_len = 0;
    long long ref_len = 0;

    explicit BleuStats(int max_order)
        : matches(static_cast<std::size_t>(max_order), 0),
          totals(static_cast<std::size_t>(max_order), 0) {}

    void add_pair(const std::string& hyp, const std::string& ref, const BleuConfig& cfg) {
        std::string h = cfg.lowercase ? ascii_lower(hyp) : hyp;
        std::string r = cfg.lowercase ? ascii_lower(ref) : ref;
        TokenList hyp_tokens = tokenize_13a(h);
        TokenList ref_tokens = tokenize_13a(r);
        hyp_len += static_cast<long long>(hyp_tokens.size());
        ref_len += static_cast<long long>(ref_tokens.size());
        for (int n = 1; n <= cfg.max_order; ++n) {
            NgramCounts hg = word_ngrams(hyp_tokens, n);
            NgramCounts rg = word_ngrams(ref_tokens, n);
            matches[static_cast<std::size_t>(n - 1)] += intersection_size(hg, rg);
            totals[static_cast<std::size_t>(n - 1)] += hg.total();
        }
    }
};

MetricScore bleu_from_stats(const BleuStats& stats, const BleuConfig& cfg) {
    MetricScore score;
    score.components["hyp_len"] = static_cast<double>(stats.hyp_len);
    score.components["ref_len"] = static_cast<double>(stats.ref_len);

    double bp = 1.0;
    if (stats.hyp_len == 0) {
        bp = 0.0;  // guards exp(1 - ref/hyp)
    } else if (stats.hyp_len < stats.ref_len) {
        bp = std::exp(1.0 - static_cast<double>(stats.ref_len) /
                                static_cast<double>(stats.hyp_len));
    }
    score.components["bp"] = bp;

    // Precisions are kept on the percent scale; orders whose denominator is
    // zero (hypotheses shorter than the order) drop out of the sum while the
    // divisor stays at the configured order count unless effective_order.
    double smooth_multiplier = 1.0;
    int effective = 0;
    std::vector<double> precisions(static_cast<std::size_t>(cfg.max_order), 0.0);
    for (int n = 1; n <= cfg.max_order; ++n) {
        long long match = stats.matches[static_cast<std::size_t>(n - 1)];
        long long total = stats.totals[static_cast<std::size_t>(n - 1)];
        if (total == 0) continue;
        effective = n;
        if (match == 0) {
            smooth_multiplier *= 2.0;
            precisions[static_cast<std::size_t>(n - 1)] =
                100.0 / (smooth_multiplier * static_cast<double>(total));
        } else {
            precisions[static_cast<std::size_t>(n - 1)] =
                100.0 * static_cast<double>(match) / static_cast<double>(total);
        }
        score.components["p" + std::to_string(n)] =
            static_cast<double>(match) / static_cast<double>(total);
    }

    int order = cfg.effective_order ? std::max(effective, 1) : cfg.max_order;
    double log_sum = 0.0;
    for (int n = 1; n <= order; ++n) {
        double p = precisions[static_cast<std::size_t>(n - 1)];
        if (p > 0.0) log_sum += std::log(p);
    }
    score.value = stats.hyp_len == 0 ? 0.0 : bp * std::exp(log_sum / order);
    return score;
}

struct ChrfStats {
    // One slot per order: char orders 1..nc first, then word orders 1..nw.
    std::vector<long long> matches;
    std::vector<long long> hyp_totals;
    std::vector<long long> ref_totals;

    explicit ChrfStats(const ChrfConfig& cfg)
        : matches(static_cast<std::size_t>(cfg.char_order + cfg.word_order), 0),
          hyp_totals(matches.size(), 0),
          ref_totals(matches.size(), 0) {}

    void add_pair(const std::string& hyp, const std::string& ref, const ChrfConfig& cfg) {
        for (int n = 1; n <= cfg.char_order; ++n) {
            NgramCounts hg = char_ngrams(hyp, n, cfg.remove_space);
            NgramCounts rg = char_ngrams(ref, n, cfg.remove_space);
            accumulate(n - 1, hg, rg);
        }
        if (cfg.word_order > 0) {
            TokenList hyp_tokens = split_edge_punctuation(whitespace_tokenize(hyp));
            TokenList ref_tokens = split_edge_punctuation(whitespace_tokenize(ref));
            for (int n = 1; n <= cfg.word_order; ++n) {
                NgramCounts hg = word_ngrams(hyp_tokens, n);
                NgramCounts rg = word_ngrams(ref_tokens, n);
                accumulate(cfg.char_order + n - 1, hg, rg);
            }
        }
    }

    void accumulate(int slot, const NgramCounts& hg, const NgramCounts& rg) {
        matches[static_cast<std::size_t>(slot)] += intersection_size(hg, rg);
        hyp_totals[static_cast<std::size_t>(slot)] += hg.total();
        ref_totals[static_cast<std::size_t>(slot)] += rg.total();
    }
};

MetricScore chrf_from_stats(const ChrfStats& stats, const ChrfConfig& cfg) {
    // Precision and recall averaged across orders first, then one F-score.
    double prec_sum = 0.0;
    double rec_sum = 0.0;
    int included = 0;
    for (std::size_t i = 0; i < stats.matches.size(); ++i) {
        long long hyp_total = stats.hyp_totals[i];
        long long ref_total = stats.ref_totals[i];
        if (cfg.effective_order && hyp_total == 0 && ref_total == 0) continue;
        long long match = stats.matches[i];
        prec_sum += hyp_total > 0 ? static_cast<double>(match) / static_cast<double>(hyp_total)
                                  : 0.0;
        rec_sum += ref_total > 0 ? static_cast<double>(match) / static_cast<double>(ref_total)
                                 : 0.0;
        ++included;
    }

    MetricScore score;
    score.components["effective_orders"] = included;
    if (included == 0) {
        score.components["avg_precision"] = 0.0;
        score.components["avg_recall"] = 0.0;
        score.value = 0.0;
        return score;
    }
    double precision = prec_sum / included;
    double recall = rec_sum / included;
    score.components["avg_precision"] = precision;
    score.components["avg_recall"] = recall;

    double beta_sq = cfg.beta * cfg.beta;
    double denom = beta_sq * precision + recall;
    double f = denom > 0.0 ? (1.0 + beta_sq) * precision * recall / denom : 0.0;
    score.value = 100.0 * f;
    return score;
}

void validate_corpus(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                     const char* name) {
    if (hyps.empty()) throw ValidationError(std::string(name) + ": empty corpus");
    if (hyps.size() != refs.size()) {
        throw ValidationError(std::string(name) + ": " + std::to_string(hyps.size()) +
                              " hypotheses vs " + std::to_string(refs.size()) + " references");
    }
}

void validate_bleu(const BleuConfig& cfg) {
    if (cfg.max_order < 1) throw ValidationError("bleu: max_order must be >= 1");
}

void validate_chrf(const ChrfConfig& cfg) {
    if (cfg.char_order < 1) throw ValidationError("chrf: char_order must be >= 1");
    if (cfg.word_order < 0) throw ValidationError("chrf: word_order must be >= 0");
    if (!(cfg.beta > 0.0)) throw ValidationError("chrf: beta must be > 0");
}

}  // namespace

std::string BleuConfig::signature() const {
    std::string sig = "nrefs:1|case:";
    sig += lowercase ? "lc" : "mixed";
    sig += "|eff:";
    sig += effective_order ? "yes" : "no";
    sig += "|tok:13a|smooth:exp";
    if (max_order != 4) sig += "|order:" + std::to_string(max_order);
    return sig;
}

std::string ChrfConfig::signature() const {
    std::string sig = "nrefs:1|case:mixed|eff:";
    sig += effective_order ? "yes" : "no";
    sig += "|nc:" + std::to_string(char_order);
    sig += "|nw:" + std::to_string(word_order);
    sig += "|space:";
    sig += remove_space ? "no" : "yes";
    if (beta != 2.0) sig += "|beta:" + format_double(beta, 1);
    return sig;
}

std::string ChrfConfig::metric_id() const { return word_order > 0 ? "chrf++" : "chrf"; }

namespace {

std::map<std::string, std::string> parse_signature_fields(std::string_view signature,
                                                          const char* name) {
    std::map<std::string, std::string> fields;
    std::size_t start = 0;
    std::string sig(signature);
    while (start <= sig.size()) {
        std::size_t end = sig.find('|', start);
        std::string part = sig.substr(start, end == std::string::npos ? end : end - start);
        std::size_t colon = part.find(':');
        if (colon == std::string::npos || colon == 0) {
            throw ValidationError(std::string(name) + ": bad signature field '" + part + "'");
        }
        fields[part.substr(0, colon)] = part.substr(colon + 1);
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return fields;
}

}  // namespace

BleuConfig parse_bleu_signature(std::string_view signature) {
    auto fields = parse_signature_fields(signature, "bleu");
    BleuConfig cfg;
    for (const auto& [key, value] : fields) {
        if (key == "nrefs") {
            if (value != "1") throw ValidationError("bleu: only nrefs:1 is supported");
        } else if (key == "case") {
            if (value == "lc") cfg.lowercase = true;
            else if (value == "mixed") cfg.lowercase = false;
            else throw ValidationError("bleu: unsupported case '" + value + "'");
        } else if (key == "eff") {
            cfg.effective_order = value == "yes";
        } else if (key == "tok") {
            if (value != "13a") throw ValidationError("bleu: unsupported tokenizer '" + value + "'");
        } else if (key == "smooth") {
            if (value != "exp") throw ValidationError("bleu: unsupported smoothing '" + value + "'");
        } else if (key == "order") {
            cfg.max_order = parse_int(value, "bleu signature order");
        } else if (key == "version") {
            // ignored
        } else {
            throw ValidationError("bleu: unknown signature key '" + key + "'");
        }
    }
    validate_bleu(cfg);
    return cfg;
}

ChrfConfig parse_chrf_signature(std::string_view signature) {
    auto fields = parse_signature_fields(signature, "chrf");
    ChrfConfig cfg;
    for (const auto& [key, value] : fields) {
        if (key == "nrefs") {
            if (value != "1") throw ValidationError("chrf: only nrefs:1 is supported");
        } else if (key == "case") {
            if (value != "mixed") throw ValidationError("chrf: unsupported case '" + value + "'");
        } else if (key == "eff") {
            cfg.effective_order = value == "yes";
        } else if (key == "nc") {
            cfg.char_order = parse_int(value, "chrf signature nc");
        } else if (key == "nw") {
            cfg.word_order = parse_int(value, "chrf signature nw");
        } else if (key == "space") {
            cfg.remove_space = value == "no";
        } else if (key == "beta") {
            cfg.beta = parse_double(value, "chrf signature beta");
        } else if (key == "version") {
            // ignored
        } else {
            throw ValidationError("chrf: unknown signature key '" + key + "'");
        }
    }
    validate_chrf(cfg);
    return cfg;
}

MetricScore bleu_corpus(const std::vector<std::string>& hyps,
                        const std::vector<std::string>& refs, const BleuConfig& cfg) {
    validate_corpus(hyps, refs, "bleu");
    validate_bleu(cfg);
    BleuStats stats(cfg.max_order);
    for (std::size_t i = 0; i < hyps.size(); ++i) stats.add_pair(hyps[i], refs[i], cfg);
    return bleu_from_stats(stats, cfg);
}

MetricScore bleu_sentence(const std::string& hyp, const std::string& ref,
                          const BleuConfig& cfg) {
    validate_bleu(cfg);
    BleuStats stats(cfg.max_order);
    stats.add_pair(hyp, ref, cfg);
    return bleu_from_stats(stats, cfg);
}

MetricScore chrf_corpus(const std::vector<std::string>& hyps,
                        const std::vector<std::string>& refs, const ChrfConfig& cfg) {
    validate_corpus(hyps, refs, "chrf");
    validate_chrf(cfg);
    ChrfStats stats(cfg);
    for (std::size_t i = 0; i < hyps.size(); ++i) stats.add_pair(hyps[i], refs[i], cfg);
    return chrf_from_stats(stats, cfg);
}

MetricScore chrf_sentence(const std::string& hyp, const std::string& ref,
                          const ChrfConfig& cfg) {
    validate_chrf(cfg);
    ChrfStats stats(cfg);
    stats.add_pair(hyp, ref, cfg);
    return chrf_from_stats(stats, cfg);
}

std::string MetricConfig::metric_id() const {
    return kind == MetricKind::bleu ? "bleu" : chrf.metric_id();
}

double MetricConfig::score_sentence(const std::string& hyp, const std::string& ref) const {
    return kind == MetricKind::bleu ? bleu_sentence(hyp, ref, bleu).value
                                    : chrf_sentence(hyp, ref, chrf).value;
}

std::pair<ScoreTable, ScoreTable> score_dataset(const MetricConfig& metric,
                                                const EvalDataset& dataset, int threads) {
    if (threads < 1) throw ValidationError("score_dataset: threads must be >= 1");
    const std::size_t n_segments = dataset.segments.size();
    const std::size_t n_systems = dataset.system_ids.size();

    std::vector<std::string> refs;
    refs.reserve(n_segments);
    for (const auto& seg : dataset.segments) refs.push_back(seg.reference);

    // Flat (system, segment) jobs; each writes its own slot, so the fan-out
    // is deterministic regardless of scheduling.
    std::vector<double> seg_scores(n_systems * n_segments, 0.0);
    const std::size_t total_jobs = n_systems * n_segments;
    auto job = [&](std::size_t idx) {
        std::size_t sys = idx / n_segments;
        std::size_t seg = idx % n_segments;
        const auto& hyp = dataset.hypotheses.at(dataset.system_ids[sys])[seg];
        seg_scores[idx] = metric.score_sentence(hyp, refs[seg]);
    };
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

    ScoreTable segment_table;
    segment_table.metric_id = metric.metric_id();
    segment_table.level = ScoreLevel::segment;
    for (std::size_t sys = 0; sys < n_systems; ++sys) {
        for (std::size_t seg = 0; seg < n_segments; ++seg) {
            const Segment& segment = dataset.segments[seg];
            segment_table.segment_entries[{dataset.system_ids[sys], segment.doc_id,
                                           segment.seg_index}] = seg_scores[sys * n_segments + seg];
        }
    }

    ScoreTable system_table;
    system_table.metric_id = metric.metric_id();
    system_table.level = ScoreLevel::system;
    for (const auto& system_id : dataset.system_ids) {
        const auto& hyps = dataset.hypotheses.at(system_id);
        double value = metric.kind == MetricKind::bleu
                           ? bleu_corpus(hyps, refs, metric.bleu).value
                           : chrf_corpus(hyps, refs, metric.chrf).value;
        system_table.system_entries[system_id] = value;
    }
    return {std::move(segment_table), std::move(system_table)};
}

}  // namespace dialeval
