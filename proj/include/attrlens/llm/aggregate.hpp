#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "attrlens/core/errors.hpp"

namespace attrlens {

/// The outputs of repeated issues of one prompt, one list per repetition.
/// Items are expected to be normalized already.
struct RunSet {
    std::vector<std::vector<std::string>> runs;
};

/// Picks the k most frequent strings across runs. Ties break by earliest
/// first appearance (run index, then position within the run), then
/// lexicographically. Returns fewer than k when fewer distinct strings exist.
inline std::vector<std::string> aggregate_top_k(const RunSet& set, std::size_t k) {
    if (k < 1) throw EmptyInput("k must be >= 1");
    if (set.runs.empty()) throw EmptyInput("run set must contain at least one run");

    struct Tally {
        std::size_t count = 0;
        std::size_t first_run = 0;
        std::size_t first_pos = 0;
    };
    std::map<std::string, Tally> tallies;
    for (std::size_t r = 0; r < set.runs.size(); ++r)
        for (std::size_t p = 0; p < set.runs[r].size(); ++p) {
            auto [it, inserted] = tallies.try_emplace(set.runs[r][p], Tally{0, r, p});
            ++it->second.count;
        }

    std::vector<std::pair<std::string, Tally>> entries(tallies.begin(), tallies.end());
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second.count != b.second.count) return a.second.count > b.second.count;
        if (a.second.first_run != b.second.first_run) return a.second.first_run < b.second.first_run;
        if (a.second.first_pos != b.second.first_pos) return a.second.first_pos < b.second.first_pos;
        return a.first < b.first;
    });

    std::vector<std::string> out;
    for (const auto& [name, tally] : entries) {
        if (out.size() == k) break;
        out.push_back(name);
    }
    return out;
}

}  // namespace attrlens
