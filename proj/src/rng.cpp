#include "elliptope/rng.hpp"

#include <cmath>

namespace elliptope::harness {

namespace {

constexpr std::uint64_t kPhiloxM = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

// One Philox2x64 block: ten rounds of the bijective mix on (c0, c1).
inline void philox_block(std::uint64_t c0, std::uint64_t c1, std::uint64_t key,
                         std::uint64_t& out0, std::uint64_t& out1) {
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi, lo;
        mulhilo(kPhiloxM, c0, hi, lo);
        c0 = hi ^ key ^ c1;
        c1 = lo;
        key += kWeyl;
    }
    out0 = c0;
    out1 = c1;
}

} // namespace

std::uint64_t Philox::next_u64() {
    if (have_buffered_word_) {
        have_buffered_word_ = false;
        return buffer_;
    }
    std::uint64_t w0, w1;
    philox_block(block_++, stream_, seed_, w0, w1);
    buffer_ = w1;
    have_buffered_word_ = true;
    return w0;
}

double Philox::next_uniform() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double Philox::next_gaussian() {
    if (have_cached_gaussian_) {
        have_cached_gaussian_ = false;
        return cached_gaussian_;
    }
    const double u1 = 1.0 - next_uniform(); // (0, 1]
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_gaussian_ = r * std::sin(a);
    have_cached_gaussian_ = true;
    return r * std::cos(a);
}

} // namespace elliptope::harness
