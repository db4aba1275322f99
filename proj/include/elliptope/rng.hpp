#pragma once

#include <cstdint>

namespace elliptope::harness {

/// Philox2x64-10 counter-based generator.
///
/// Layout: the 2x64 counter is (block_index, stream) and the key is the seed.
/// Distinct streams never share a counter block, so per-trial streams are
/// independent and the whole construction is reproducible under parallel
/// execution: draw i of stream s depends only on (seed, s, i).
class Philox {
public:
    Philox(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double next_uniform();

    /// Standard Gaussian via Box-Muller on consecutive uniforms (pairs are
    /// cached, so draw i of a stream is a pure function of (seed, stream, i)).
    double next_gaussian();

    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::uint64_t buffer_ = 0;
    bool have_buffered_word_ = false;
    double cached_gaussian_ = 0.0;
    bool have_cached_gaussian_ = false;
};

} // namespace elliptope::harness
