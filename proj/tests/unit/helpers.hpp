#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "dialeval/corpus.hpp"
#include "dialeval/util.hpp"

namespace testutil {

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 1000; ++i) {
            auto candidate = base / ("dialeval_test_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(counter_++));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

inline dialeval::ScoreTable make_segment_table(
    const std::string& metric_id,
    const std::vector<std::tuple<std::string, std::string, int, double>>& entries) {
    dialeval::ScoreTable table;
    table.metric_id = metric_id;
    table.level = dialeval::ScoreLevel::segment;
    for (const auto& [sys, doc, seg, score] : entries) {
        table.segment_entries[{sys, doc, seg}] = score;
    }
    return table;
}

inline dialeval::ScoreTable make_system_table(
    const std::string& metric_id, const std::vector<std::pair<std::string, double>>& entries) {
    dialeval::ScoreTable table;
    table.metric_id = metric_id;
    table.level = dialeval::ScoreLevel::system;
    for (const auto& [sys, score] : entries) table.system_entries[sys] = score;
    return table;
}

// Code-point Levenshtein distance, the independent check for noise edits.
inline int levenshtein(const std::string& a, const std::string& b) {
    auto ca = dialeval::utf8_decode(a);
    auto cb = dialeval::utf8_decode(b);
    std::vector<int> prev(cb.size() + 1), cur(cb.size() + 1);
    for (std::size_t j = 0; j <= cb.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= ca.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= cb.size(); ++j) {
            int costs = ca[i - 1] == cb[j - 1] ? prev[j - 1] : prev[j - 1] + 1;
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, costs});
        }
        std::swap(prev, cur);
    }
    return prev[cb.size()];
}

}  // namespace testutil
