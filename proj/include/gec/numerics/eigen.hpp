#pragma once

#include <Eigen/Dense>

#include "gec/error.hpp"
#include "gec/numerics/matrix.hpp"

namespace gec {

/// Ascending eigenvalues with orthonormal eigenvectors stored column-wise.
/// `vectors` is empty when only values were requested.
struct Spectrum {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;

    [[nodiscard]] bool has_vectors() const noexcept { return vectors.size() > 0; }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
};

inline Spectrum eigh(const Eigen::MatrixXd& m, bool with_vectors = true) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        m, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("eigh: no convergence for matrix " + SymmetricMatrix(m).fingerprint());
    Spectrum s;
    s.values = solver.eigenvalues();
    if (with_vectors) s.vectors = solver.eigenvectors();
    return s;
}

inline Spectrum eigh(const SymmetricMatrix& m, bool with_vectors = true) { return eigh(m.eigen(), with_vectors); }

}  // namespace gec
