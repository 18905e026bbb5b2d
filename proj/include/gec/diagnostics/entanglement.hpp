#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "gec/error.hpp"
#include "gec/fock/basis.hpp"

namespace gec {

/// Half-chain Page value (L/2) ln 2 - 1/2.
inline double page_value(int L) {
    if (L <= 0 || L % 2 != 0) throw ConfigError("page_value: L must be even and positive");
    return 0.5 * L * std::log(2.0) - 0.5;
}

/// Sites 0..L/2-1 of the zig-zag chain.
inline std::vector<int> half_cut(int L) {
    std::vector<int> a(static_cast<std::size_t>(L / 2));
    for (int i = 0; i < L / 2; ++i) a[static_cast<std::size_t>(i)] = i;
    return a;
}

struct EntanglementResult {
    double entropy = 0.0;
    std::vector<double> schmidt;  // squared singular values, descending
};

/// S = -sum_k s_k^2 ln s_k^2 from the singular values of psi reshaped into
/// (A configuration) x (B configuration). Only pairs realized in the basis
/// appear, so sector bases are handled directly.
template <class Scalar>
EntanglementResult entanglement_spectrum(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& state, const FockBasis& basis,
                                         const std::vector<int>& cut) {
    if (static_cast<std::size_t>(state.size()) != basis.size())
        throw ConfigError("entanglement_entropy: state and basis dimensions differ");
    if (std::abs(state.norm() - 1.0) > 1e-8) throw ConfigError("entanglement_entropy: state is not normalized");
    Config amask = 0;
    for (int s : cut) {
        if (s < 0 || s >= basis.sites()) throw ConfigError("entanglement_entropy: cut site out of range");
        amask |= Config{1} << s;
    }
    std::unordered_map<Config, Eigen::Index> rows, cols;
    std::vector<Eigen::Index> ri(basis.size()), ci(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const Config c = basis.state(i);
        ri[i] = rows.try_emplace(c & amask, static_cast<Eigen::Index>(rows.size())).first->second;
        ci[i] = cols.try_emplace(c & ~amask, static_cast<Eigen::Index>(cols.size())).first->second;
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(static_cast<Eigen::Index>(rows.size()),
                                                                     static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) m(ri[i], ci[i]) = state(static_cast<Eigen::Index>(i));
    Eigen::BDCSVD<decltype(m)> svd(m);
    EntanglementResult r;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
        const double p = svd.singularValues()(k) * svd.singularValues()(k);
        r.schmidt.push_back(p);
        if (p > 0.0) r.entropy -= p * std::log(p);
    }
    return r;
}

template <class Scalar>
double entanglement_entropy(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& state, const FockBasis& basis,
                            const std::vector<int>& cut) {
    return entanglement_spectrum(state, basis, cut).entropy;
}

}  // namespace gec
