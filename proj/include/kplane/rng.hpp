#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace kplane {

// Counter-based random streams (Philox4x32-10, Salmon et al. SC'11).
// The value sequence of a substream is a pure function of
// (seed, stream label, sample index), so partitioning sample indices across
// workers yields results independent of scheduling and worker count.

namespace detail {

inline constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

struct PhiloxBlock {
    uint32_t v[4];
};

inline PhiloxBlock philox4x32_10(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                                 uint32_t k0, uint32_t k1) {
    uint32_t x0 = c0, x1 = c1, x2 = c2, x3 = c3;
    for (int round = 0; round < 10; ++round) {
        const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * x0;
        const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * x2;
        const uint32_t y0 = static_cast<uint32_t>(p1 >> 32) ^ x1 ^ k0;
        const uint32_t y1 = static_cast<uint32_t>(p1);
        const uint32_t y2 = static_cast<uint32_t>(p0 >> 32) ^ x3 ^ k1;
        const uint32_t y3 = static_cast<uint32_t>(p0);
        x0 = y0;
        x1 = y1;
        x2 = y2;
        x3 = y3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return {{x0, x1, x2, x3}};
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (const char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

} // namespace detail

/// One sample index worth of randomness. Draws are generated on demand;
/// a substream never interacts with any other substream.
class Substream {
public:
    Substream(uint32_t key0, uint32_t key1, uint64_t index)
        : key0_(key0), key1_(key1), index_(index) {}

    uint64_t bits() {
        if (avail_ == 0) refill();
        return buf_[2 - avail_--];
    }

    /// Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    /// Uniform on (0,1); safe to feed to logs and quantile functions.
    double uniform_open() {
        return (static_cast<double>(bits() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (no rejection, fixed draw pattern).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    /// Random sign, +1 or -1.
    double sign() { return (bits() & 1u) ? 1.0 : -1.0; }

private:
    void refill() {
        const auto b = detail::philox4x32_10(
            static_cast<uint32_t>(draw_), static_cast<uint32_t>(draw_ >> 32),
            static_cast<uint32_t>(index_), static_cast<uint32_t>(index_ >> 32),
            key0_, key1_);
        ++draw_;
        buf_[0] = (static_cast<uint64_t>(b.v[1]) << 32) | b.v[0];
        buf_[1] = (static_cast<uint64_t>(b.v[3]) << 32) | b.v[2];
        avail_ = 2;
    }

    uint32_t key0_, key1_;
    uint64_t index_;
    uint64_t draw_ = 0;
    uint64_t buf_[2] = {0, 0};
    int avail_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

/// A named stream: (seed, label) fixes the key, sample indices address
/// independent substreams.
class RandomStream {
public:
    RandomStream(uint64_t seed, std::string_view label) {
        const uint64_t k = detail::splitmix64(seed ^ detail::fnv1a64(label));
        key0_ = static_cast<uint32_t>(k);
        key1_ = static_cast<uint32_t>(k >> 32);
    }

    Substream at(uint64_t sample_index) const {
        return Substream(key0_, key1_, sample_index);
    }

private:
    uint32_t key0_, key1_;
};

/// Stable 64-bit mix for deriving per-check seeds from a suite seed.
inline uint64_t derive_seed(uint64_t seed, std::string_view tag, uint64_t salt = 0) {
    return detail::splitmix64(seed ^ detail::fnv1a64(tag) ^ (salt * 0x9E3779B97F4A7C15ull));
}

} // namespace kplane
