#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gec/error.hpp"
#include "gec/fock/basis.hpp"
#include "gec/fock/hamiltonian.hpp"

namespace gec {

enum class Boundary { Periodic, Open };

inline Boundary parse_boundary(std::string_view s) {
    if (s == "periodic" || s == "pbc") return Boundary::Periodic;
    if (s == "open" || s == "obc") return Boundary::Open;
    throw ConfigError("unknown boundary condition '" + std::string(s) + "'");
}

inline const char* to_string(Boundary b) { return b == Boundary::Periodic ? "periodic" : "open"; }

/// Triangular two-leg ladder gas in zig-zag indexing. Energies in units of t0.
/// Open ladders may have an odd number of sites.
struct TlgParams {
    int L = 12;
    int N = 6;
    double V = 1.0;
    double t0 = 1.0;
    Boundary bc = Boundary::Periodic;

    void validate() const {
        if (bc == Boundary::Periodic && (L < 6 || L % 2 != 0))
            throw ConfigError("tlg: periodic ladder needs even L >= 6");
        if (bc == Boundary::Open && L < 4) throw ConfigError("tlg: open ladder needs L >= 4");
        if (L > 63) throw ConfigError("tlg: L must be <= 63 for bit-mask configurations");
        if (N < 0 || N > L) throw ConfigError("tlg: need 0 <= N <= L");
    }
};

/// Nearest-neighbour pair (a, b) and the sites adjacent to both.
struct Bond {
    int a = 0;
    int b = 0;
    std::vector<int> common;
};

/// Site i touches i +- 1 (rungs/diagonals) and i +- 2 (legs).
/// Diagonal bond (i, i+1): common {i-1, i+2}; leg bond (i, i+2): common {i+1}.
inline std::vector<Bond> tlg_bonds(int L, Boundary bc) {
    if (bc == Boundary::Periodic && (L < 6 || L % 2 != 0))
        throw ConfigError("tlg_bonds: periodic wrap needs even L >= 6");
    if (bc == Boundary::Open && L < 4) throw ConfigError("tlg_bonds: open ladder needs L >= 4");
    auto wrap = [L](int s) { return ((s % L) + L) % L; };
    auto inside = [L](int s) { return s >= 0 && s < L; };
    std::vector<Bond> bonds;
    bonds.reserve(static_cast<std::size_t>(2 * L));
    for (int i = 0; i < L; ++i) {
        for (int step : {1, 2}) {
            const int j = i + step;
            Bond bond;
            std::vector<int> common = step == 1 ? std::vector<int>{i - 1, i + 2} : std::vector<int>{i + 1};
            if (bc == Boundary::Periodic) {
                bond.a = i;
                bond.b = wrap(j);
                for (int c : common) bond.common.push_back(wrap(c));
            } else {
                if (!inside(j)) continue;
                bond.a = i;
                bond.b = j;
                for (int c : common)
                    if (inside(c)) bond.common.push_back(c);
            }
            bonds.push_back(std::move(bond));
        }
    }
    return bonds;
}

namespace detail {

struct BondMasks {
    Config pair;
    Config common;
};

inline std::vector<BondMasks> bond_masks(const std::vector<Bond>& bonds) {
    std::vector<BondMasks> m;
    m.reserve(bonds.size());
    for (const auto& b : bonds) {
        Config c = 0;
        for (int s : b.common) c |= Config{1} << s;
        m.push_back({(Config{1} << b.a) | (Config{1} << b.b), c});
    }
    return m;
}

/// Exactly one end occupied and the common neighbourhood not full.
inline bool bond_active(const BondMasks& m, Config c) {
    return std::popcount(c & m.pair) == 1 && (c & m.common) != m.common;
}

}  // namespace detail

/// (H_d)_ii / V for configuration c: the number of active bonds.
inline int tlg_hd_count(const std::vector<Bond>& bonds, Config c) {
    int n = 0;
    for (const auto& m : detail::bond_masks(bonds)) n += detail::bond_active(m, c) ? 1 : 0;
    return n;
}

/// Fixed-N Hamiltonian: hop -t0 and diagonal V per active bond.
inline SparseHamiltonian tlg_build(const TlgParams& p, const FockBasis& basis) {
    p.validate();
    if (basis.mode() != BasisMode::FixedParticles || basis.sites() != p.L || basis.particles() != p.N)
        throw ConfigError("tlg_build: basis does not match (L, N)");
    const auto masks = detail::bond_masks(tlg_bonds(p.L, p.bc));
    const std::size_t dim = basis.size();
    std::vector<double> diag(dim, 0.0);
    std::vector<Coupling> edges;
    edges.reserve(dim * masks.size() / 4);
    for (std::size_t i = 0; i < dim; ++i) {
        const Config c = basis.state(i);
        int active = 0;
        for (const auto& m : masks) {
            if (!detail::bond_active(m, c)) continue;
            ++active;
            const Config d = c ^ m.pair;
            if (std::popcount(d) != std::popcount(c)) throw Error("tlg_build: hop changed particle number");
            const auto j = basis.index_of(d);
            if (!j) throw Error("tlg_build: hop left the sector");
            if (i < *j && p.t0 != 0.0) edges.push_back({i, *j, -p.t0});
        }
        diag[i] = p.V * active;
    }
    return SparseHamiltonian(std::move(diag), std::move(edges));
}

inline SparseHamiltonian tlg_build(const TlgParams& p) {
    p.validate();
    return tlg_build(p, enumerate_basis(BasisSpec::sector(p.L, p.N)));
}

}  // namespace gec
