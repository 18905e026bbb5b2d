#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gec/error.hpp"
#include "gec/fock/hamiltonian.hpp"
#include "gec/numerics/matrix.hpp"
#include "gec/numerics/rng.hpp"

namespace gec {

/// Rosenzweig-Porter ensemble H = H0 + D^{-gamma/2} M, H0 diagonal standard normal, M GOE.
struct RpmParams {
    std::size_t dim = 2;
    double gamma = 1.0;

    void validate() const {
        if (dim < 2) throw ConfigError("rpm: dimension must be at least 2");
        if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("rpm: gamma must be finite and >= 0");
    }
};

/// The gamma-independent random input of one RPM realization.
struct RpmRealization {
    std::vector<double> eps;  // diagonal of H0
    SymmetricMatrix goe;      // M
};

/// Draws eps first, then M, from `rng`.
inline RpmRealization rpm_realization(std::size_t dim, RngStream& rng) {
    if (dim < 2) throw ConfigError("rpm: dimension must be at least 2");
    RpmRealization r;
    r.eps.resize(dim);
    for (auto& e : r.eps) e = rng.normal();
    r.goe = sample_goe(dim, rng);
    return r;
}

inline SparseHamiltonian rpm_hamiltonian(const RpmRealization& r, double gamma) {
    const std::size_t dim = r.eps.size();
    const double scale = std::exp(-0.5 * gamma * std::log(static_cast<double>(dim)));
    Eigen::MatrixXd m = r.goe.eigen() * scale;
    for (std::size_t i = 0; i < dim; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += r.eps[i];
    return SparseHamiltonian(SymmetricMatrix(std::move(m)));
}

inline SparseHamiltonian rpm_sample(const RpmParams& p, RngStream& rng) {
    p.validate();
    return rpm_hamiltonian(rpm_realization(p.dim, rng), p.gamma);
}

}  // namespace gec
