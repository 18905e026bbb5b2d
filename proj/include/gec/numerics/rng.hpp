#pragma once

#include <cstdint>
#include <random>

namespace gec {

/// splitmix64 finalizer; used to decorrelate (seed, index) pairs.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic random stream for one realization.
///
/// The engine state is derived only from (master_seed, stream_index), so a
/// realization draws the same numbers no matter which worker runs it or in
/// what order. Streams are not meant to be shared between threads.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : master_seed_(master_seed), stream_index_(stream_index) {
        const std::uint64_t a = splitmix64(master_seed);
        const std::uint64_t b = splitmix64(a ^ splitmix64(stream_index + 0x632be59bd9b4e019ULL));
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
        engine_.seed(seq);
    }

    [[nodiscard]] std::uint64_t master_seed() const noexcept { return master_seed_; }
    [[nodiscard]] std::uint64_t stream_index() const noexcept { return stream_index_; }

    /// Standard normal N(0, 1).
    double normal() { return normal_(engine_); }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    /// Uniform integer on [0, n).
    std::uint64_t index(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace gec
