#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dialeval {

// Input data failed a format or consistency check. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// File or environment problem. CLI exit code 1.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// UTF-8

// Decodes UTF-8 into code points. Throws ValidationError on malformed input;
// `where` is prepended to the message.
std::vector<char32_t> utf8_decode(std::string_view text, std::string_view where = "");

std::string utf8_encode(const std::vector<char32_t>& cps);
void utf8_append(std::string& out, char32_t cp);

// Whitespace per the Unicode definition used by Python's str.split().
bool is_unicode_space(char32_t cp);

// ---------------------------------------------------------------------------
// Deterministic RNG
//
// std::uniform_int_distribution is implementation-defined, so bounded draws
// go through rejection sampling here. Identical seeds give identical streams
// on every platform.

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n);

    // Uniform double in [0, 1) with 53 bits.
    double next_unit();

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

// Seed for an independent substream keyed by strings/integers.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view a,
                                 std::int64_t b, std::string_view c);

// ---------------------------------------------------------------------------
// Small string / file helpers

std::vector<std::string> split_tabs(std::string_view line);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Locale-independent "%.6f".
std::string format_double(double v, int precision = 6);

// Strict numeric parsers (whole field must parse).
double parse_double(std::string_view s, std::string_view where);
int parse_int(std::string_view s, std::string_view where);

// Reads a TSV with the exact expected header; returns data rows, each with
// exactly header.size() fields. Line numbers in error messages are 1-based.
std::vector<std::vector<std::string>> read_tsv(const std::string& path,
                                               const std::vector<std::string>& header);

}  // namespace dialeval
