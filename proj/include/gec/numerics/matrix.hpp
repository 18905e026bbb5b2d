#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "gec/error.hpp"
#include "gec/numerics/rng.hpp"

namespace gec {

/// Real symmetric D x D matrix. Writes go through set(), which mirrors the
/// entry, so symmetry is exact.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t dim) : m_(Eigen::MatrixXd::Zero(checked(dim), checked(dim))) {}
    explicit SymmetricMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0)
            throw ConfigError("SymmetricMatrix: input must be square and non-empty");
        for (Eigen::Index i = 0; i < m_.rows(); ++i)
            for (Eigen::Index j = i + 1; j < m_.cols(); ++j)
                if (m_(i, j) != m_(j, i)) throw ConfigError("SymmetricMatrix: input is not symmetric");
    }

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    void set(std::size_t i, std::size_t j, double v) {
        m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        m_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
    void scale(double s) { m_ *= s; }

    [[nodiscard]] const Eigen::MatrixXd& eigen() const noexcept { return m_; }

    [[nodiscard]] double trace() const { return m_.trace(); }

    /// Short identifying string for error messages.
    [[nodiscard]] std::string fingerprint() const {
        std::uint64_t h = 0x84222325cbf29ce4ULL;
        for (Eigen::Index k = 0; k < m_.size(); ++k) {
            std::uint64_t bits = 0;
            const double v = m_.data()[k];
            std::memcpy(&bits, &v, sizeof bits);
            h = splitmix64(h ^ bits);
        }
        std::ostringstream os;
        os << "dim=" << m_.rows() << " trace=" << m_.trace() << " frob=" << m_.norm() << " hash=" << std::hex << h;
        return os.str();
    }

private:
    static Eigen::Index checked(std::size_t dim) {
        if (dim == 0) throw ConfigError("SymmetricMatrix: dimension must be positive");
        return static_cast<Eigen::Index>(dim);
    }
    Eigen::MatrixXd m_;
};

/// GOE sample M = (B + B^T)/sqrt(2) with B standard normal.
///
/// Drawn directly in distribution: off-diagonal N(0,1), diagonal N(0,2),
/// upper triangle in row-major order.
inline SymmetricMatrix sample_goe(std::size_t dim, RngStream& rng) {
    SymmetricMatrix m(dim);
    const double sqrt2 = std::sqrt(2.0);
    for (std::size_t i = 0; i < dim; ++i) {
        m.set(i, i, sqrt2 * rng.normal());
        for (std::size_t j = i + 1; j < dim; ++j) m.set(i, j, rng.normal());
    }
    return m;
}

}  // namespace gec
