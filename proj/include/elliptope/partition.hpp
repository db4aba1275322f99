#pragma once

#include <vector>

namespace elliptope::numerics {

/// Disjoint, nonempty index blocks covering {0, ..., n-1}.
class Partition {
public:
    Partition(int n, std::vector<std::vector<int>> blocks);

    static Partition singletons(int n);
    static Partition whole(int n);

    int ambient_dim() const { return n_; }
    int block_count() const { return int(blocks_.size()); }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    const std::vector<int>& block(int b) const { return blocks_[b]; }
    /// Index of the block containing element i.
    int block_of(int i) const { return owner_[i]; }

    bool is_singletons() const;

private:
    int n_;
    std::vector<std::vector<int>> blocks_;
    std::vector<int> owner_;
};

} // namespace elliptope::numerics
