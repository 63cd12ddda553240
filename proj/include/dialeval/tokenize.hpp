#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dialeval {

// Tokens never contain whitespace; joining with single spaces reproduces the
// whitespace-normalized sentence.
using TokenList = std::vector<std::string>;

// Multiset of n-grams of one fixed order. Word n-gram keys are the tokens
// joined with a single space (tokens are whitespace-free, so this is
// unambiguous); character n-gram keys are the UTF-8 bytes of the window.
struct NgramCounts {
    int order = 1;
    std::unordered_map<std::string, long long> counts;

    long long total() const;
};

// Clipped overlap: sum over keys of min(a.count, b.count).
long long intersection_size(const NgramCounts& a, const NgramCounts& b);

// The classic "international" mteval tokenizer: entity unescaping, symbol
// padding, digit-aware period/comma/dash splitting, whitespace collapse.
// Golden vectors in the tests pin the exact behavior.
TokenList tokenize_13a(std::string_view text);

// Split on Unicode whitespace, nothing else.
TokenList whitespace_tokenize(std::string_view text);

// Sliding window of n code points; remove_space drops all whitespace first.
NgramCounts char_ngrams(std::string_view text, int n, bool remove_space);

// Sliding window of n tokens.
NgramCounts word_ngrams(const TokenList& tokens, int n);

}  // namespace dialeval
