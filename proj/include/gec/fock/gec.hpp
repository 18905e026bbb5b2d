#pragma once

#include <cstddef>
#include <vector>

#include "gec/error.hpp"
#include "gec/fock/hamiltonian.hpp"

namespace gec {

/// Graph-energy centrality of every basis state.
///
///   GEC(i) = [Tr(H~^2) - Tr((H~ \ i)^2)] / (Tr(H~^2)/D),   H~ = H - shift*1
///
/// where H \ i projects basis state i out. The numerator reduces to
/// x_i = 2 (H~^2)_ii - H~_ii^2. Normalized per dimension D (not the
/// unnormalized variant that is D times smaller).
struct GecVector {
    std::vector<double> values;
    std::vector<double> numerators;
    double shift = 0.0;  // mu = Tr(H)/D unless supplied
    double width = 0.0;  // sigma^2 = Tr(H~^2)/D unless supplied
};

namespace detail {

inline void check_gec_input(const SparseHamiltonian& h) {
    if (h.dim() < 2) throw ConfigError("gec: dimension must be at least 2");
}

inline GecVector finish(std::vector<double> x, double shift, double width) {
    if (!(width > 0.0)) throw DegenerateError("gec: zero spectral width after centering");
    GecVector g;
    g.values.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g.values[i] = x[i] / width;
    g.numerators = std::move(x);
    g.shift = shift;
    g.width = width;
    return g;
}

}  // namespace detail

/// Centered numerators x_i and centered width for an explicit shift.
inline GecVector gec_with_shift(const SparseHamiltonian& h, double shift) {
    detail::check_gec_input(h);
    const std::size_t dim = h.dim();
    const auto& diag = h.diagonal();
    // (H~^2)_ii = sum_j H~_ij H~_ji
    std::vector<double> sq(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        const double d = diag[i] - shift;
        sq[i] = d * d;
    }
    h.for_each_edge([&](std::size_t i, std::size_t j, double w) {
        sq[i] += w * w;
        sq[j] += w * w;
    });
    std::vector<double> x(dim);
    double tr2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double d = diag[i] - shift;
        x[i] = 2.0 * sq[i] - d * d;
        tr2 += sq[i];
    }
    return detail::finish(std::move(x), shift, tr2 / static_cast<double>(dim));
}

/// GEC from the definition, centered by mu = Tr(H)/D.
inline GecVector gec_exact(const SparseHamiltonian& h) {
    detail::check_gec_input(h);
    return gec_with_shift(h, h.trace() / static_cast<double>(h.dim()));
}

/// Same quantity via 2 (A^2)_ii + H~_ii^2 with A the off-diagonal part.
inline GecVector gec_offdiag_form(const SparseHamiltonian& h) {
    detail::check_gec_input(h);
    const std::size_t dim = h.dim();
    const double mu = h.trace() / static_cast<double>(dim);
    const auto a2 = h.offdiag_row_norms();
    const auto& diag = h.diagonal();
    std::vector<double> x(dim);
    double diag_sq = 0.0, a2_sum = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double d = diag[i] - mu;
        x[i] = 2.0 * a2[i] + d * d;
        diag_sq += d * d;
        a2_sum += a2[i];
    }
    return detail::finish(std::move(x), mu, (diag_sq + a2_sum) / static_cast<double>(dim));
}

/// GEC with externally fixed centering and width (ensemble-averaged values).
inline GecVector gec_normalized(const SparseHamiltonian& h, double shift, double width) {
    auto g = gec_with_shift(h, shift);
    return detail::finish(std::move(g.numerators), shift, width);
}

}  // namespace gec
