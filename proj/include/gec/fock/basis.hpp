#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gec/error.hpp"

namespace gec {

/// Configurations are bit masks: bit k set means site k is occupied (or spin
/// k is up). States are kept in ascending integer order.
using Config = std::uint64_t;

inline constexpr std::size_t kMaxBasisDim = std::size_t{1} << 26;

enum class BasisMode { FullSpin, FixedParticles };

struct BasisSpec {
    BasisMode mode = BasisMode::FullSpin;
    int sites = 0;
    int particles = 0;  // FixedParticles only

    static BasisSpec full(int sites) { return {BasisMode::FullSpin, sites, 0}; }
    static BasisSpec sector(int sites, int particles) { return {BasisMode::FixedParticles, sites, particles}; }
};

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    return r > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                        : static_cast<std::uint64_t>(r);
}

/// Dimension of the space described by `spec`, saturating at UINT64_MAX.
inline std::uint64_t basis_dimension(const BasisSpec& spec) {
    if (spec.mode == BasisMode::FullSpin)
        return spec.sites >= 64 ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << spec.sites);
    return binomial(spec.sites, spec.particles);
}

class FockBasis {
public:
    [[nodiscard]] BasisMode mode() const noexcept { return mode_; }
    [[nodiscard]] int sites() const noexcept { return sites_; }
    [[nodiscard]] int particles() const noexcept { return particles_; }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    /// Full-spin bases are implicit: state i is the mask i.
    [[nodiscard]] Config state(std::size_t i) const {
        return mode_ == BasisMode::FullSpin ? static_cast<Config>(i) : states_[i];
    }

    [[nodiscard]] std::optional<std::size_t> index_of(Config c) const {
        if (mode_ == BasisMode::FullSpin)
            return c < size_ ? std::optional<std::size_t>(static_cast<std::size_t>(c)) : std::nullopt;
        auto it = std::lower_bound(states_.begin(), states_.end(), c);
        if (it == states_.end() || *it != c) return std::nullopt;
        return static_cast<std::size_t>(it - states_.begin());
    }

    /// Occupation string, site 0 first.
    [[nodiscard]] std::string label(std::size_t i) const {
        std::string s(static_cast<std::size_t>(sites_), '0');
        for (int k = 0; k < sites_; ++k)
            if ((state(i) >> k) & 1U) s[static_cast<std::size_t>(k)] = '1';
        return s;
    }

    friend FockBasis enumerate_basis(const BasisSpec& spec);

private:
    BasisMode mode_ = BasisMode::FullSpin;
    int sites_ = 0;
    int particles_ = 0;
    std::size_t size_ = 0;
    std::vector<Config> states_;
};

inline FockBasis enumerate_basis(const BasisSpec& spec) {
    if (spec.sites < 0 || spec.sites > 63) throw ConfigError("enumerate_basis: site count must be in [0, 63]");
    if (spec.mode == BasisMode::FixedParticles && (spec.particles < 0 || spec.particles > spec.sites))
        throw ConfigError("enumerate_basis: particle number must be in [0, sites]");
    const std::uint64_t dim = basis_dimension(spec);
    if (dim > kMaxBasisDim)
        throw CapacityError("enumerate_basis: dimension " + std::to_string(dim) + " exceeds cap 2^26");

    FockBasis b;
    b.mode_ = spec.mode;
    b.sites_ = spec.sites;
    b.particles_ = spec.particles;
    b.size_ = static_cast<std::size_t>(dim);
    if (spec.mode == BasisMode::FullSpin) return b;
    b.states_.reserve(b.size_);
    if (spec.particles == 0) {
        b.states_.push_back(0);
        return b;
    }
    // Gosper's hack walks same-popcount masks in ascending order.
    Config c = (Config{1} << spec.particles) - 1;
    const Config limit = Config{1} << spec.sites;
    while (c < limit) {
        b.states_.push_back(c);
        const Config u = c & (~c + 1);
        const Config v = c + u;
        if (v == 0) break;
        c = v + (((v ^ c) / u) >> 2);
    }
    return b;
}

}  // namespace gec
