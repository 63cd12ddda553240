#include "dialeval/tokenize.hpp"

#include <stdexcept>

#include "dialeval/util.hpp"

namespace dialeval {

long long NgramCounts::total() const {
    long long t = 0;
    for (const auto& [k, v] : counts) t += v;
    return t;
}

long long intersection_size(const NgramCounts& a, const NgramCounts& b) {
    const NgramCounts& small = a.counts.size() <= b.counts.size() ? a : b;
    const NgramCounts& large = a.counts.size() <= b.counts.size() ? b : a;
    long long t = 0;
    for (const auto& [k, v] : small.counts) {
        auto it = large.counts.find(k);
        if (it != large.counts.end()) t += std::min(v, it->second);
    }
    return t;
}

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Symbol classes padded with spaces: { -~, [ -`, space-&, (-+, :-@, and /.
bool is_padded_symbol(char c) {
    unsigned char b = static_cast<unsigned char>(c);
    return (b >= 0x20 && b <= 0x26) || (b >= 0x28 && b <= 0x2B) || b == 0x2F ||
           (b >= 0x3A && b <= 0x40) || (b >= 0x5B && b <= 0x60) || (b >= 0x7B && b <= 0x7E);
}

bool is_period_or_comma(char c) { return c == '.' || c == ','; }

TokenList split_unicode_whitespace(std::string_view text) {
    TokenList tokens;
    std::vector<char32_t> cps = utf8_decode(text, "tokenize");
    std::string current;
    for (char32_t cp : cps) {
        if (is_unicode_space(cp)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else {
            utf8_append(current, cp);
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

}  // namespace

TokenList tokenize_13a(std::string_view text) {
    std::string s(text);
    replace_all(s, "<skipped>", "");
    replace_all(s, "-\n", "");
    replace_all(s, "\n", " ");
    if (s.find('&') != std::string::npos) {
        // Replacement order matters and is part of the pinned behavior.
        replace_all(s, "&quot;", "\"");
        replace_all(s, "&amp;", "&");
        replace_all(s, "&lt;", "<");
        replace_all(s, "&gt;", ">");
    }
    s = " " + s + " ";

    // Each pass mirrors one non-overlapping regex substitution. All the
    // classes are ASCII, so byte-level scanning is exact on UTF-8 input.
    std::string padded;
    padded.reserve(s.size() * 2);
    for (char c : s) {
        if (is_padded_symbol(c)) {
            padded.push_back(' ');
            padded.push_back(c);
            padded.push_back(' ');
        } else {
            padded.push_back(c);
        }
    }

    // Period/comma after a non-digit: "X." -> "X . "
    std::string t;
    t.reserve(padded.size());
    for (std::size_t i = 0; i < padded.size();) {
        if (!is_digit(padded[i]) && i + 1 < padded.size() && is_period_or_comma(padded[i + 1])) {
            t.push_back(padded[i]);
            t.push_back(' ');
            t.push_back(padded[i + 1]);
            t.push_back(' ');
            i += 2;
        } else {
            t.push_back(padded[i]);
            ++i;
        }
    }

    // Period/comma before a non-digit: ".X" -> " . X"
    std::string u;
    u.reserve(t.size());
    for (std::size_t i = 0; i < t.size();) {
        if (is_period_or_comma(t[i]) && i + 1 < t.size() && !is_digit(t[i + 1])) {
            u.push_back(' ');
            u.push_back(t[i]);
            u.push_back(' ');
            u.push_back(t[i + 1]);
            i += 2;
        } else {
            u.push_back(t[i]);
            ++i;
        }
    }

    // Dash after a digit: "1-" -> "1 - "
    std::string v;
    v.reserve(u.size());
    for (std::size_t i = 0; i < u.size();) {
        if (is_digit(u[i]) && i + 1 < u.size() && u[i + 1] == '-') {
            v.push_back(u[i]);
            v.push_back(' ');
            v.push_back('-');
            v.push_back(' ');
            i += 2;
        } else {
            v.push_back(u[i]);
            ++i;
        }
    }

    return split_unicode_whitespace(v);
}

TokenList whitespace_tokenize(std::string_view text) {
    return split_unicode_whitespace(text);
}

NgramCounts char_ngrams(std::string_view text, int n, bool remove_space) {
    if (n < 1) throw ValidationError("char_ngrams: order must be >= 1");
    NgramCounts out;
    out.order = n;
    std::vector<char32_t> cps = utf8_decode(text, "char_ngrams");
    if (remove_space) {
        std::vector<char32_t> kept;
        kept.reserve(cps.size());
        for (char32_t cp : cps) {
            if (!is_unicode_space(cp)) kept.push_back(cp);
        }
        cps = std::move(kept);
    }
    if (static_cast<int>(cps.size()) < n) return out;
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
        std::string key;
        for (int k = 0; k < n; ++k) utf8_append(key, cps[i + k]);
        ++out.counts[key];
    }
    return out;
}

NgramCounts word_ngrams(const TokenList& tokens, int n) {
    if (n < 1) throw ValidationError("word_ngrams: order must be >= 1");
    NgramCounts out;
    out.order = n;
    if (static_cast<int>(tokens.size()) < n) return out;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int k = 1; k < n; ++k) {
            key += ' ';
            key += tokens[i + k];
        }
        ++out.counts[key];
    }
    return out;
}

}  // namespace dialeval
