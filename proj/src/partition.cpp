#include "elliptope/partition.hpp"

#include <algorithm>

#include "elliptope/errors.hpp"

namespace elliptope::numerics {

Partition::Partition(int n, std::vector<std::vector<int>> blocks)
    : n_(n), blocks_(std::move(blocks)), owner_(n, -1) {
    if (n < 1) throw UsageError("Partition: ambient dimension must be at least 1");
    for (int b = 0; b < int(blocks_.size()); ++b) {
        auto& blk = blocks_[b];
        if (blk.empty()) throw UsageError("Partition: empty block");
        std::sort(blk.begin(), blk.end());
        for (int i : blk) {
            if (i < 0 || i >= n) throw UsageError("Partition: index out of range");
            if (owner_[i] != -1) throw UsageError("Partition: blocks are not disjoint");
            owner_[i] = b;
        }
    }
    for (int i = 0; i < n; ++i)
        if (owner_[i] == -1) throw UsageError("Partition: blocks do not cover every index");
}

Partition Partition::singletons(int n) {
    std::vector<std::vector<int>> blocks(n);
    for (int i = 0; i < n; ++i) blocks[i] = {i};
    return Partition(n, std::move(blocks));
}

Partition Partition::whole(int n) {
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    return Partition(n, {all});
}

bool Partition::is_singletons() const {
    for (const auto& b : blocks_)
        if (b.size() != 1) return false;
    return true;
}

} // namespace elliptope::numerics
