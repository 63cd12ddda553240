#include "dialeval/unicode.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "dialeval/util.hpp"

namespace dialeval {
namespace {

#include "unicode_tables.inc"

constexpr char32_t kHangulSBase = 0xAC00;
constexpr char32_t kHangulLBase = 0x1100;
constexpr char32_t kHangulVBase = 0x1161;
constexpr char32_t kHangulTBase = 0x11A7;
constexpr int kHangulLCount = 19;
constexpr int kHangulVCount = 21;
constexpr int kHangulTCount = 28;
constexpr int kHangulNCount = kHangulVCount * kHangulTCount;
constexpr int kHangulSCount = kHangulLCount * kHangulNCount;

int combining_class(char32_t cp) {
    auto it = std::lower_bound(std::begin(kCccTable), std::end(kCccTable), cp,
                               [](const CccEntry& e, char32_t c) { return e.cp < c; });
    if (it != std::end(kCccTable) && it->cp == cp) return it->ccc;
    return 0;
}

const DecompEntry* find_decomp(char32_t cp) {
    auto it = std::lower_bound(std::begin(kDecompIndex), std::end(kDecompIndex), cp,
                               [](const DecompEntry& e, char32_t c) { return e.cp < c; });
    if (it != std::end(kDecompIndex) && it->cp == cp) return &*it;
    return nullptr;
}

char32_t compose_pair(char32_t a, char32_t b) {
    // Hangul LV and LVT composition.
    if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount &&
        b >= kHangulVBase && b < kHangulVBase + kHangulVCount) {
        return kHangulSBase + ((a - kHangulLBase) * kHangulVCount + (b - kHangulVBase)) * kHangulTCount;
    }
    if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount &&
        (a - kHangulSBase) % kHangulTCount == 0 &&
        b > kHangulTBase && b < kHangulTBase + kHangulTCount) {
        return a + (b - kHangulTBase);
    }
    auto it = std::lower_bound(
        std::begin(kCompTable), std::end(kCompTable), std::pair<char32_t, char32_t>(a, b),
        [](const CompEntry& e, const std::pair<char32_t, char32_t>& k) {
            return e.first != k.first ? e.first < k.first : e.second < k.second;
        });
    if (it != std::end(kCompTable) && it->first == a && it->second == b) return it->composed;
    return 0;
}

void decompose(char32_t cp, std::vector<char32_t>& out) {
    if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
        char32_t s = cp - kHangulSBase;
        out.push_back(kHangulLBase + s / kHangulNCount);
        out.push_back(kHangulVBase + (s % kHangulNCount) / kHangulTCount);
        char32_t t = s % kHangulTCount;
        if (t != 0) out.push_back(kHangulTBase + t);
        return;
    }
    if (const DecompEntry* e = find_decomp(cp)) {
        for (std::uint32_t i = 0; i < e->length; ++i) out.push_back(kDecompPool[e->offset + i]);
        return;
    }
    out.push_back(cp);
}

}  // namespace

std::string nfc_normalize(std::string_view text) {
    std::vector<char32_t> cps = utf8_decode(text, "nfc");

    std::vector<char32_t> nfd;
    nfd.reserve(cps.size());
    for (char32_t cp : cps) decompose(cp, nfd);

    // Canonical ordering: stable exchange sort of combining marks.
    for (std::size_t i = 1; i < nfd.size(); ++i) {
        int ccc = combining_class(nfd[i]);
        if (ccc == 0) continue;
        std::size_t j = i;
        while (j > 0) {
            int prev = combining_class(nfd[j - 1]);
            if (prev == 0 || prev <= ccc) break;
            std::swap(nfd[j - 1], nfd[j]);
            --j;
        }
    }

    // Canonical composition. prev_ccc == -1 means the last emitted character
    // is the starter itself; a character C is blocked from the starter when
    // something with ccc >= ccc(C) sits in between.
    std::vector<char32_t> out;
    out.reserve(nfd.size());
    std::ptrdiff_t starter = -1;
    int prev_ccc = -1;
    for (char32_t cp : nfd) {
        int ccc = combining_class(cp);
        if (starter >= 0 && (prev_ccc == -1 || prev_ccc < ccc)) {
            if (char32_t comp = compose_pair(out[static_cast<std::size_t>(starter)], cp)) {
                out[static_cast<std::size_t>(starter)] = comp;
                continue;
            }
        }
        if (ccc == 0) {
            starter = static_cast<std::ptrdiff_t>(out.size());
            prev_ccc = -1;
        } else {
            prev_ccc = ccc;
        }
        out.push_back(cp);
    }
    return utf8_encode(out);
}

}  // namespace dialeval
