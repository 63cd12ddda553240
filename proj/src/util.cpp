#include "dialeval/util.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dialeval {

std::vector<char32_t> utf8_decode(std::string_view text, std::string_view where) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    auto fail = [&](std::size_t pos) -> void {
        std::ostringstream oss;
        oss << where << (where.empty() ? "" : ": ") << "malformed UTF-8 at byte " << pos;
        throw ValidationError(oss.str());
    };
    while (i < text.size()) {
        unsigned char b0 = static_cast<unsigned char>(text[i]);
        char32_t cp = 0;
        std::size_t len = 0;
        if (b0 < 0x80) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        } else {
            fail(i);
        }
        if (i + len > text.size()) fail(i);
        for (std::size_t k = 1; k < len; ++k) {
            unsigned char b = static_cast<unsigned char>(text[i + k]);
            if ((b & 0xC0) != 0x80) fail(i);
            cp = (cp << 6) | (b & 0x3F);
        }
        // Reject overlong encodings and surrogates.
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
            fail(i);
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void utf8_append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string utf8_encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) utf8_append(out, cp);
    return out;
}

bool is_unicode_space(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
        case 0x1C: case 0x1D: case 0x1E: case 0x1F:
        case 0x20: case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

std::uint64_t Rng::next_below(std::uint64_t n) {
    // Rejection sampling over the top of the range keeps the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return v % n;
}

double Rng::next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view a,
                                 std::int64_t b, std::string_view c) {
    std::uint64_t h = fnv1a64(a);
    h = fnv1a64("\x1f", h);
    for (int k = 0; k < 8; ++k) {
        char byte = static_cast<char>((static_cast<std::uint64_t>(b) >> (8 * k)) & 0xFF);
        h = fnv1a64(std::string_view(&byte, 1), h);
    }
    h = fnv1a64("\x1f", h);
    h = fnv1a64(c, h);
    return splitmix64(h ^ splitmix64(seed));
}

std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream oss;
    oss << in.rdbuf();
    if (in.bad()) throw IoError("read failure: " + path);
    return oss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failure: " + path);
}

std::string format_double(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

double parse_double(std::string_view s, std::string_view where) {
    std::string tmp(s);
    char* end = nullptr;
    double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
        throw ValidationError(std::string(where) + ": not a number: '" + tmp + "'");
    }
    return v;
}

int parse_int(std::string_view s, std::string_view where) {
    std::string tmp(s);
    char* end = nullptr;
    long v = std::strtol(tmp.c_str(), &end, 10);
    if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
        throw ValidationError(std::string(where) + ": not an integer: '" + tmp + "'");
    }
    return static_cast<int>(v);
}

std::vector<std::vector<std::string>> read_tsv(const std::string& path,
                                               const std::vector<std::string>& header) {
    std::string content = read_file(path);
    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 0;
    std::size_t start = 0;
    bool saw_header = false;
    while (start <= content.size()) {
        std::size_t end = content.find('\n', start);
        std::string_view line;
        if (end == std::string::npos) {
            if (start == content.size()) break;
            line = std::string_view(content).substr(start);
            start = content.size() + 1;
        } else {
            line = std::string_view(content).substr(start, end - start);
            start = end + 1;
        }
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (!saw_header) {
            std::vector<std::string> expect = header;
            if (fields != expect) {
                throw ValidationError(path + ":" + std::to_string(lineno) +
                                      ": expected header '" + join(expect, "\t") + "'");
            }
            saw_header = true;
            continue;
        }
        if (fields.size() != header.size()) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        rows.push_back(std::move(fields));
    }
    if (!saw_header) {
        throw ValidationError(path + ": empty file, expected header '" + join(header, "\t") + "'");
    }
    return rows;
}

}  // namespace dialeval
