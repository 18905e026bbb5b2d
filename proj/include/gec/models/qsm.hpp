#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "gec/error.hpp"
#include "gec/fock/basis.hpp"
#include "gec/fock/hamiltonian.hpp"
#include "gec/numerics/matrix.hpp"
#include "gec/numerics/rng.hpp"

namespace gec {

/// Quantum sun: a GOE grain of `grain` spins coupled to `outer` spins,
///   H = R + g0 sum_l alpha^{u_l} S^x_{k(l)} S^x_l + sum_l h_l S^z_l,
/// with spin-1/2 operators (S^z = +-1/2, S^x matrix element 1/2).
struct QsmParams {
    int grain = 3;   // N
    int outer = 0;   // L
    double alpha = 1.0;
    double g0 = 1.0;
    double h = 1.0;
    double W = 0.5;
    double zeta = 0.2;

    void validate() const {
        if (grain < 1) throw ConfigError("qsm: grain size N must be >= 1");
        if (outer < 0) throw ConfigError("qsm: outer spin count L must be >= 0");
        if (grain + outer > 62) throw ConfigError("qsm: N + L must be <= 62");
        if (!(alpha > 0.0)) throw ConfigError("qsm: alpha must be > 0");
        if (!(zeta >= 0.0)) throw ConfigError("qsm: zeta must be >= 0");
        if (!(W >= 0.0)) throw ConfigError("qsm: W must be >= 0");
    }
    [[nodiscard]] std::size_t grain_dim() const { return std::size_t{1} << grain; }
};

/// Random input of one QSM realization. Index l = 0 is the first outer spin.
struct QsmRealization {
    std::vector<double> u;        // u[0] == 0, u[l] uniform in [l - zeta, l + zeta]
    std::vector<double> fields;   // h_l uniform in [h - W, h + W]
    std::vector<int> attach;      // k(l): grain spin index in [0, N)
    SymmetricMatrix grain;        // R = M / sqrt(2^N + 1)

    [[nodiscard]] double coupling(const QsmParams& p, std::size_t l) const {
        return p.g0 * std::pow(p.alpha, u[l]) / 4.0;
    }
};

/// Draw order: grain matrix, then (u_l, h_l, k(l)) for each outer spin.
inline QsmRealization qsm_realization(const QsmParams& p, RngStream& rng) {
    p.validate();
    QsmRealization r;
    r.grain = sample_goe(p.grain_dim(), rng);
    r.grain.scale(1.0 / std::sqrt(static_cast<double>(p.grain_dim()) + 1.0));
    const auto L = static_cast<std::size_t>(p.outer);
    r.u.resize(L);
    r.fields.resize(L);
    r.attach.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
        const double centre = static_cast<double>(l);
        const double u = rng.uniform(centre - p.zeta, centre + p.zeta);
        r.u[l] = l == 0 ? 0.0 : u;
        r.fields[l] = rng.uniform(p.h - p.W, p.h + p.W);
        r.attach[l] = static_cast<int>(rng.index(static_cast<std::uint64_t>(p.grain)));
    }
    return r;
}

/// Full spin basis over N + L sites; grain spins occupy bits [0, N), outer
/// spin l sits at bit N + l. Set bit means spin up.
inline SparseHamiltonian qsm_hamiltonian(const QsmParams& p, const QsmRealization& r) {
    p.validate();
    const std::uint64_t dim64 = basis_dimension(BasisSpec::full(p.grain + p.outer));
    if (dim64 > kMaxBasisDim) throw CapacityError("qsm: dimension 2^(N+L) exceeds cap 2^26");
    const auto dim = static_cast<std::size_t>(dim64);
    const std::size_t gdim = p.grain_dim();
    const auto L = static_cast<std::size_t>(p.outer);

    std::vector<double> diag(dim);
    std::vector<Coupling> edges;
    std::size_t grain_edges = 0;
    for (std::size_t a = 0; a < gdim; ++a)
        for (std::size_t b = a + 1; b < gdim; ++b)
            if (r.grain(a, b) != 0.0) ++grain_edges;
    edges.reserve((dim / gdim) * grain_edges + dim * L / 2);

    std::vector<double> weights(L);
    for (std::size_t l = 0; l < L; ++l) weights[l] = r.coupling(p, l);

    for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t n = i & (gdim - 1);
        double d = r.grain(n, n);
        for (std::size_t l = 0; l < L; ++l) d += r.fields[l] * (((i >> (p.grain + l)) & 1U) ? 0.5 : -0.5);
        diag[i] = d;
        // grain block acts within fixed outer configuration
        for (std::size_t m = n + 1; m < gdim; ++m) {
            const double w = r.grain(n, m);
            if (w != 0.0) edges.push_back({i, i - n + m, w});
        }
        for (std::size_t l = 0; l < L; ++l) {
            const std::size_t j =
                i ^ (std::size_t{1} << r.attach[l]) ^ (std::size_t{1} << (static_cast<std::size_t>(p.grain) + l));
            if (i < j && weights[l] != 0.0) edges.push_back({i, j, weights[l]});
        }
    }
    return SparseHamiltonian(std::move(diag), std::move(edges));
}

struct QsmSample {
    SparseHamiltonian hamiltonian;
    QsmRealization realization;
};

inline QsmSample qsm_sample(const QsmParams& p, RngStream& rng) {
    auto r = qsm_realization(p, rng);
    auto h = qsm_hamiltonian(p, r);
    return {std::move(h), std::move(r)};
}

}  // namespace gec
