#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gec/error.hpp"
#include "gec/numerics/matrix.hpp"

namespace gec {

/// One stored off-diagonal matrix element <i|H|j> with i < j.
struct Coupling {
    std::size_t i;
    std::size_t j;
    double w;
};

/// Weighted Fock-space graph: diagonal entries are self-loops, off-diagonal
/// entries are edges. Each unordered pair is stored once; the matrix is
/// symmetric by construction.
///
/// Two backings share one interface: a sparse edge list, or a dense matrix
/// for complete graphs such as the Rosenzweig-Porter ensemble.
class SparseHamiltonian {
public:
    SparseHamiltonian() = default;

    /// Sparse backing. Throws if an edge is duplicated, out of range, not
    /// upper-triangular, or zero.
    SparseHamiltonian(std::vector<double> diagonal, std::vector<Coupling> offdiag)
        : dim_(diagonal.size()), diag_(std::move(diagonal)), edges_(std::move(offdiag)) {
        if (dim_ == 0) throw ConfigError("SparseHamiltonian: empty diagonal");
        std::sort(edges_.begin(), edges_.end(),
                  [](const Coupling& a, const Coupling& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
        for (std::size_t k = 0; k < edges_.size(); ++k) {
            const auto& e = edges_[k];
            if (e.i >= e.j || e.j >= dim_) throw ConfigError("SparseHamiltonian: edge indices must satisfy i < j < dim");
            if (e.w == 0.0) throw ConfigError("SparseHamiltonian: zero-weight edge");
            if (k > 0 && edges_[k - 1].i == e.i && edges_[k - 1].j == e.j)
                throw ConfigError("SparseHamiltonian: duplicate edge (" + std::to_string(e.i) + "," +
                                  std::to_string(e.j) + ")");
        }
    }

    /// Dense backing.
    explicit SparseHamiltonian(SymmetricMatrix dense) : dim_(dense.dim()), dense_(std::move(dense)) {
        diag_.resize(dim_);
        for (std::size_t i = 0; i < dim_; ++i) diag_[i] = (*dense_)(i, i);
    }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] bool is_dense() const noexcept { return dense_.has_value(); }
    [[nodiscard]] const std::vector<double>& diagonal() const noexcept { return diag_; }
    [[nodiscard]] const SymmetricMatrix& dense() const { return *dense_; }

    /// Calls f(i, j, w) for every nonzero off-diagonal element with i < j.
    template <class F>
    void for_each_edge(F&& f) const {
        if (dense_) {
            const auto& m = dense_->eigen();
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                for (Eigen::Index i = 0; i < j; ++i) {
                    const double w = m(i, j);
                    if (w != 0.0) f(static_cast<std::size_t>(i), static_cast<std::size_t>(j), w);
                }
            return;
        }
        for (const auto& e : edges_) f(e.i, e.j, e.w);
    }

    [[nodiscard]] std::size_t edge_count() const {
        if (!dense_) return edges_.size();
        std::size_t n = 0;
        for_each_edge([&](std::size_t, std::size_t, double) { ++n; });
        return n;
    }

    [[nodiscard]] double trace() const {
        double t = 0.0;
        for (double d : diag_) t += d;
        return t;
    }

    /// sum_{j != i} H_ij^2 for every row i.
    [[nodiscard]] std::vector<double> offdiag_row_norms() const {
        std::vector<double> r(dim_, 0.0);
        if (dense_) {
            const auto& m = dense_->eigen();
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                const double* col = m.col(j).data();
                // symmetric: column j equals row j
                double s = 0.0;
                for (Eigen::Index i = 0; i < m.rows(); ++i) s += col[i] * col[i];
                r[static_cast<std::size_t>(j)] = s - col[j] * col[j];
            }
            return r;
        }
        for (const auto& e : edges_) {
            r[e.i] += e.w * e.w;
            r[e.j] += e.w * e.w;
        }
        return r;
    }

    [[nodiscard]] Eigen::MatrixXd to_dense() const {
        if (dense_) return dense_->eigen();
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
        for (std::size_t i = 0; i < dim_; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag_[i];
        for (const auto& e : edges_) {
            m(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)) = e.w;
            m(static_cast<Eigen::Index>(e.j), static_cast<Eigen::Index>(e.i)) = e.w;
        }
        return m;
    }

    /// H + c*1, same backing.
    [[nodiscard]] SparseHamiltonian shifted(double c) const {
        if (dense_) {
            Eigen::MatrixXd m = dense_->eigen();
            m.diagonal().array() += c;
            return SparseHamiltonian(SymmetricMatrix(std::move(m)));
        }
        std::vector<double> d = diag_;
        for (auto& x : d) x += c;
        return SparseHamiltonian(std::move(d), edges_);
    }

    /// s*H, same backing.
    [[nodiscard]] SparseHamiltonian scaled(double s) const {
        if (s == 0.0) throw ConfigError("SparseHamiltonian::scaled: zero factor");
        if (dense_) {
            SymmetricMatrix m = *dense_;
            m.scale(s);
            return SparseHamiltonian(std::move(m));
        }
        std::vector<double> d = diag_;
        for (auto& x : d) x *= s;
        std::vector<Coupling> e = edges_;
        for (auto& c : e) c.w *= s;
        return SparseHamiltonian(std::move(d), std::move(e));
    }

private:
    std::size_t dim_ = 0;
    std::vector<double> diag_;
    std::vector<Coupling> edges_;
    std::optional<SymmetricMatrix> dense_;
};

}  // namespace gec
