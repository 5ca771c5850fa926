#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include <json.hpp>

#include "scurve/errors.hpp"

namespace scurve {

/// True iff blocks form a partition of {1..n}: disjoint, nonempty, covering.
inline bool is_partition(const std::vector<std::vector<int>>& blocks, int n) {
    std::set<int> seen;
    for (const auto& b : blocks) {
        if (b.empty()) return false;
        for (int e : b) {
            if (e < 1 || e > n) return false;
            if (!seen.insert(e).second) return false;
        }
    }
    return static_cast<int>(seen.size()) == n;
}

/// Direct check of the defining property: indices j < k < j' < k' with j ~ j'
/// and k ~ k' in two different blocks form a crossing. Throws ValidationError
/// if blocks is not a partition of {1..n}.
inline bool is_noncrossing(const std::vector<std::vector<int>>& blocks, int n) {
    if (!is_partition(blocks, n)) throw ValidationError("is_noncrossing: not a partition of {1..N}");
    std::vector<int> block_of(static_cast<std::size_t>(n) + 1, -1);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (int e : blocks[b]) block_of[static_cast<std::size_t>(e)] = static_cast<int>(b);
    for (int j = 1; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k)
            for (int j2 = k + 1; j2 <= n; ++j2)
                for (int k2 = j2 + 1; k2 <= n; ++k2)
                    if (block_of[j] == block_of[j2] && block_of[k] == block_of[k2] &&
                        block_of[j] != block_of[k])
                        return false;
    return true;
}

/// A noncrossing partition of the sector indices {1..N}. Blocks are kept sorted,
/// and blocks of size >= 2 (the ones that force contour components) must exist.
class NoncrossingPartition {
public:
    NoncrossingPartition(std::vector<std::vector<int>> blocks, int n) : n_(n), blocks_(std::move(blocks)) {
        for (auto& b : blocks_) std::sort(b.begin(), b.end());
        std::sort(blocks_.begin(), blocks_.end());
        if (!is_noncrossing(blocks_, n_)) throw ValidationError("crossing partition");
        for (const auto& b : blocks_)
            if (b.size() >= 2) pair_plus_.push_back(b);
        if (pair_plus_.empty())
            throw ValidationError("partition has no block with >= 2 sectors; no admissible contours");
    }

    int n() const { return n_; }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }

    /// Blocks with at least two elements; one contour component per block.
    const std::vector<std::vector<int>>& p0() const { return pair_plus_; }

    nlohmann::json to_json() const {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& b : blocks_) a.push_back(b);
        return a;
    }

    /// Parses blocks; elements of {1..n} not mentioned become singletons.
    static NoncrossingPartition from_json(const nlohmann::json& j, int n) {
        if (!j.is_array()) throw ValidationError("partition JSON must be an array of blocks");
        std::vector<std::vector<int>> blocks;
        std::set<int> seen;
        for (const auto& b : j) {
            if (!b.is_array() || b.empty()) throw ValidationError("partition block must be a nonempty array");
            std::vector<int> blk;
            for (const auto& e : b) {
                if (!e.is_number_integer()) throw ValidationError("partition entries must be integers");
                int v = e.get<int>();
                blk.push_back(v);
                seen.insert(v);
            }
            blocks.push_back(std::move(blk));
        }
        for (int e = 1; e <= n; ++e)
            if (!seen.count(e)) blocks.push_back({e});
        return NoncrossingPartition(std::move(blocks), n);
    }

private:
    int n_;
    std::vector<std::vector<int>> blocks_;
    std::vector<std::vector<int>> pair_plus_;
};

}  // namespace scurve
