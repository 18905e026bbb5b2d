#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gec/error.hpp"
#include "gec/fock/basis.hpp"
#include "gec/fock/hamiltonian.hpp"
#include "gec/numerics/eigen.hpp"

namespace gec {

// ---------------------------------------------------------------- gap ratio

struct GapRatioResult {
    std::vector<double> ratios;    // r_n, n = 0..D-3
    std::vector<double> spacings;  // s_n = E_{n+1} - E_n
    double mean = 0.0;             // over the window
    double window_fraction = 1.0;  // centered fraction of the r_n list averaged
    std::size_t degenerate = 0;    // r_n set to 1 because both spacings vanish
};

namespace detail {

/// Half-open index range [lo, hi) holding the central `fraction` of n items.
inline std::pair<std::size_t, std::size_t> central_window(std::size_t n, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("window fraction must be in (0, 1]");
    const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    const std::size_t lo = (n - std::min(count, n)) / 2;
    return {lo, lo + std::min(count, n)};
}

}  // namespace detail

/// r_n = min(s_n, s_{n+1}) / max(s_n, s_{n+1}) on an ascending spectrum.
inline GapRatioResult gap_ratios(std::span<const double> evals, double window_fraction = 1.0) {
    if (evals.size() < 3) throw ConfigError("gap_ratios: need at least 3 eigenvalues");
    for (std::size_t i = 1; i < evals.size(); ++i)
        if (evals[i] < evals[i - 1]) throw ConfigError("gap_ratios: eigenvalues are not sorted ascending");
    GapRatioResult r;
    r.window_fraction = window_fraction;
    r.spacings.resize(evals.size() - 1);
    for (std::size_t i = 0; i + 1 < evals.size(); ++i) r.spacings[i] = evals[i + 1] - evals[i];
    r.ratios.resize(evals.size() - 2);
    for (std::size_t n = 0; n + 1 < r.spacings.size(); ++n) {
        const double a = r.spacings[n], b = r.spacings[n + 1];
        const double hi = std::max(a, b);
        if (hi == 0.0) {
            r.ratios[n] = 1.0;
            ++r.degenerate;
        } else {
            r.ratios[n] = std::min(a, b) / hi;
        }
    }
    const auto [lo, hi] = detail::central_window(r.ratios.size(), window_fraction);
    if (lo == hi) throw DegenerateError("gap_ratios: empty averaging window");
    double s = 0.0;
    for (std::size_t n = lo; n < hi; ++n) s += r.ratios[n];
    r.mean = s / static_cast<double>(hi - lo);
    return r;
}

inline GapRatioResult gap_ratios(const Eigen::VectorXd& evals, double window_fraction = 1.0) {
    return gap_ratios(std::span<const double>(evals.data(), static_cast<std::size_t>(evals.size())), window_fraction);
}

/// Mean of r_n pooled over independent symmetry sectors.
inline double pooled_gap_ratio(const std::vector<GapRatioResult>& sectors) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& g : sectors) {
        for (double r : g.ratios) s += r;
        n += g.ratios.size();
    }
    if (n == 0) throw DegenerateError("pooled_gap_ratio: no ratios");
    return s / static_cast<double>(n);
}

// ---------------------------------------------------------------- symmetry sectors

/// Even and odd blocks P^T H P of an involutive site permutation, e.g. the
/// mirror i -> L-1-i of the open ladder. `map(c)` returns the image
/// configuration, which must lie in the basis.
struct ParitySectors {
    Eigen::MatrixXd even;
    Eigen::MatrixXd odd;
    Eigen::MatrixXd even_basis;  // columns: symmetric combinations in the original basis
    Eigen::MatrixXd odd_basis;
};

inline ParitySectors parity_sectors(const SparseHamiltonian& h, const FockBasis& basis,
                                    const std::function<Config(Config)>& map) {
    const std::size_t dim = basis.size();
    if (h.dim() != dim) throw ConfigError("parity_sectors: dimension mismatch");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (i, image) with i <= image
    for (std::size_t i = 0; i < dim; ++i) {
        const auto j = basis.index_of(map(basis.state(i)));
        if (!j) throw ConfigError("parity_sectors: image configuration outside the basis");
        if (basis.index_of(map(basis.state(*j))) != i) throw ConfigError("parity_sectors: map is not an involution");
        if (i <= *j) pairs.emplace_back(i, *j);
    }
    std::size_t n_even = pairs.size(), n_odd = 0;
    for (const auto& [i, j] : pairs) n_odd += i != j ? 1 : 0;
    const auto D = static_cast<Eigen::Index>(dim);
    ParitySectors s;
    s.even_basis = Eigen::MatrixXd::Zero(D, static_cast<Eigen::Index>(n_even));
    s.odd_basis = Eigen::MatrixXd::Zero(D, static_cast<Eigen::Index>(n_odd));
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Index e = 0, o = 0;
    for (const auto& [i, j] : pairs) {
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        if (i == j) {
            s.even_basis(a, e++) = 1.0;
            continue;
        }
        s.even_basis(a, e) = r;
        s.even_basis(b, e++) = r;
        s.odd_basis(a, o) = r;
        s.odd_basis(b, o++) = -r;
    }
    const Eigen::MatrixXd H = h.to_dense();
    Eigen::MatrixXd even = s.even_basis.transpose() * H * s.even_basis;
    Eigen::MatrixXd odd = s.odd_basis.transpose() * H * s.odd_basis;
    // remove rounding asymmetry before the symmetric solver
    s.even = 0.5 * (even + even.transpose());
    s.odd = 0.5 * (odd + odd.transpose());
    return s;
}

/// Mirror i -> L-1-i of an L-site configuration.
inline Config mirror_config(Config c, int L) {
    Config out = 0;
    for (int i = 0; i < L; ++i)
        if ((c >> i) & 1U) out |= Config{1} << (L - 1 - i);
    return out;
}

// ---------------------------------------------------------------- ETH

/// O_nn = <E_n|O|E_n> for a symmetric operator in the same basis.
inline std::vector<double> eth_diagonals(const Spectrum& spectrum, const SparseHamiltonian& observable) {
    if (!spectrum.has_vectors()) throw ConfigError("eth_diagonals: spectrum has no eigenvectors");
    const auto& V = spectrum.vectors;
    if (static_cast<std::size_t>(V.rows()) != observable.dim())
        throw ConfigError("eth_diagonals: observable and spectrum dimensions differ");
    Eigen::MatrixXd W(V.rows(), V.cols());
    const auto& d = observable.diagonal();
    for (Eigen::Index i = 0; i < V.rows(); ++i) W.row(i) = d[static_cast<std::size_t>(i)] * V.row(i);
    observable.for_each_edge([&](std::size_t i, std::size_t j, double w) {
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        W.row(a) += w * V.row(b);
        W.row(b) += w * V.row(a);
    });
    std::vector<double> out(static_cast<std::size_t>(V.cols()));
    for (Eigen::Index n = 0; n < V.cols(); ++n) out[static_cast<std::size_t>(n)] = V.col(n).dot(W.col(n));
    return out;
}

/// Diagonal observable given by its values in the basis.
inline std::vector<double> eth_diagonals(const Spectrum& spectrum, const std::vector<double>& diagonal_observable) {
    if (!spectrum.has_vectors()) throw ConfigError("eth_diagonals: spectrum has no eigenvectors");
    const auto& V = spectrum.vectors;
    if (static_cast<std::size_t>(V.rows()) != diagonal_observable.size())
        throw ConfigError("eth_diagonals: observable and spectrum dimensions differ");
    const Eigen::Map<const Eigen::VectorXd> o(diagonal_observable.data(), V.rows());
    const Eigen::VectorXd r = V.array().square().matrix().transpose() * o;
    return {r.data(), r.data() + r.size()};
}

struct EthFluctuations {
    std::vector<double> z;  // |O_{n+1,n+1} - O_nn|
    double z_av = 0.0;
    double z_max = 0.0;
    double window_fraction = 0.5;
};

/// z_av and z_max over the central window of eigenstates.
inline EthFluctuations eth_fluctuations(std::span<const double> onn, double window_fraction = 0.5) {
    if (onn.size() < 4) throw ConfigError("eth_fluctuations: need at least 4 diagonal elements");
    EthFluctuations f;
    f.window_fraction = window_fraction;
    f.z.resize(onn.size() - 1);
    for (std::size_t n = 0; n + 1 < onn.size(); ++n) f.z[n] = std::abs(onn[n + 1] - onn[n]);
    // window chosen on eigenstates; z_n needs n and n+1 inside it
    const auto [lo, hi] = detail::central_window(onn.size(), window_fraction);
    if (hi < lo + 2) throw DegenerateError("eth_fluctuations: empty window");
    double s = 0.0;
    for (std::size_t n = lo; n + 1 < hi; ++n) {
        s += f.z[n];
        f.z_max = std::max(f.z_max, f.z[n]);
    }
    f.z_av = s / static_cast<double>(hi - 1 - lo);
    return f;
}

}  // namespace gec
