#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace neurosvm {

/// SplitMix64, used for seeding and for deriving independent sub-stream seeds.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
};

/// xoshiro256** seeded from SplitMix64(seed). This is the only generator the
/// library uses, so every shuffle, bootstrap and weight init is reproducible
/// across platforms and standard libraries.
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept {
        SplitMix64 sm(seed);
        for (auto &word : s_) {
            word = sm.next();
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next(); }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    __extension__ using u128 = unsigned __int128;

    /// Uniform integer in [0, bound) by Lemire's multiply-and-reject.
    std::uint64_t below(std::uint64_t bound) noexcept {
        std::uint64_t x = next();
        auto m = static_cast<u128>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = next();
                m = static_cast<u128>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4]{};
};

/// Seed for sub-stream `stream` of `base`; used for per-tree, per-trial and per-fold streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    SplitMix64 sm(base ^ SplitMix64(stream + 0x5851F42D4C957F2DULL).next());
    return sm.next();
}

/// In-place Fisher-Yates: for i = n-1 down to 1, swap(i, below(i+1)).
template <typename T>
void fisher_yates(std::span<T> items, Rng &rng) noexcept {
    if (items.size() < 2) {
        return;
    }
    for (std::size_t i = items.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i + 1));
        using std::swap;
        swap(items[i], items[j]);
    }
}

}  // namespace neurosvm
