#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "gec/diagnostics/entanglement.hpp"
#include "gec/diagnostics/spectral.hpp"
#include "gec/fock/basis.hpp"
#include "gec/models/tlg.hpp"
#include "gec/numerics/eigen.hpp"
#include "gec/numerics/matrix.hpp"
#include "gec/numerics/rng.hpp"
#include "gec/numerics/stats.hpp"

using namespace gec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double variance_of(std::vector<double> v) { return summarize(v).variance; }

}  // namespace

TEST_CASE("gap ratio of an equally spaced spectrum") {
    std::vector<double> e(50);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = 0.3 * static_cast<double>(i);
    const auto g = gap_ratios(e);
    CHECK(g.ratios.size() == 48);
    for (double r : g.ratios) CHECK_THAT(r, WithinAbs(1.0, 1e-12));
    CHECK_THAT(g.mean, WithinAbs(1.0, 1e-12));
}

TEST_CASE("gap ratio input checks and degeneracies") {
    CHECK_THROWS_AS(gap_ratios(std::vector<double>{0.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(gap_ratios(std::vector<double>{0.0, 2.0, 1.0}), ConfigError);
    const auto g = gap_ratios(std::vector<double>{0.0, 1.0, 1.0, 1.0, 3.0});
    CHECK(g.degenerate == 1);
    CHECK(g.ratios == std::vector<double>{0.0, 1.0, 0.0});
    for (double s : g.spacings) CHECK(s >= 0.0);
}

TEST_CASE("gap ratios are invariant under affine maps") {
    RngStream rng(21, 0);
    const auto e = eigh(sample_goe(200, rng), false).values;
    const auto a = gap_ratios(e);
    const Eigen::VectorXd f = (3.7 * e.array() - 11.0).matrix();
    const auto b = gap_ratios(f);
    for (std::size_t i = 0; i < a.ratios.size(); ++i) CHECK_THAT(b.ratios[i], WithinAbs(a.ratios[i], 1e-12));
}

TEST_CASE("gap ratio window") {
    std::vector<double> e{0, 1, 2, 3, 3.5, 4, 5, 6};
    const auto g = gap_ratios(e, 0.5);
    // ratios {1, 1, 0.5, 1, 0.5, 1}; central three {1, 0.5, 1}
    CHECK_THAT(g.mean, WithinAbs(2.5 / 3.0, 1e-15));
    CHECK_THROWS_AS(gap_ratios(e, 0.0), ConfigError);
}

TEST_CASE("goe and poisson gap ratios") {
    std::vector<GapRatioResult> goe;
    for (std::uint64_t r = 0; r < 8; ++r) {
        RngStream rng(22, r);
        goe.push_back(gap_ratios(eigh(sample_goe(256, rng), false).values));
    }
    CHECK_THAT(pooled_gap_ratio(goe), WithinAbs(0.5307, 0.01));

    // iid levels: <r> = 2 ln 2 - 1
    RngStream rng(23, 0);
    std::vector<double> e(4096);
    for (auto& x : e) x = rng.uniform(0.0, 1.0);
    std::sort(e.begin(), e.end());
    CHECK_THAT(gap_ratios(e).mean, WithinAbs(2 * std::log(2.0) - 1, 0.01));
    CHECK_THAT(gap_ratios(e).mean, WithinAbs(0.386, 0.01));
}

TEST_CASE("page value") {
    CHECK_THAT(page_value(2), WithinAbs(std::log(2.0) - 0.5, 1e-15));
    CHECK_THAT(page_value(12), WithinAbs(3.6589, 1e-4));
    CHECK_THAT(page_value(2000) / (1000 * std::log(2.0)), WithinAbs(1.0, 1e-3));
    CHECK_THROWS_AS(page_value(7), ConfigError);
    CHECK(half_cut(6) == std::vector<int>{0, 1, 2});
}

TEST_CASE("entanglement of simple states") {
    const auto basis = enumerate_basis(BasisSpec::full(4));
    Eigen::VectorXd prod = Eigen::VectorXd::Zero(16);
    prod(0b0101) = 1.0;
    CHECK_THAT(entanglement_entropy(prod, basis, half_cut(4)), WithinAbs(0.0, 1e-14));

    Eigen::VectorXd bell = Eigen::VectorXd::Zero(16);
    bell(0b0000) = bell(0b1111) = 1.0 / std::sqrt(2.0);
    CHECK_THAT(entanglement_entropy(bell, basis, half_cut(4)), WithinAbs(std::log(2.0), 1e-14));

    Eigen::VectorXd bad = Eigen::VectorXd::Ones(16);
    CHECK_THROWS_AS(entanglement_entropy(bad, basis, half_cut(4)), ConfigError);
}

TEST_CASE("entanglement in a particle-number sector") {
    const auto basis = enumerate_basis(BasisSpec::sector(4, 2));
    // (|1100> + |0011>) / sqrt 2 across the {0,1} | {2,3} cut
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(6);
    psi(static_cast<Eigen::Index>(*basis.index_of(0b0011))) = 1.0 / std::sqrt(2.0);
    psi(static_cast<Eigen::Index>(*basis.index_of(0b1100))) = 1.0 / std::sqrt(2.0);
    CHECK_THAT(entanglement_entropy(psi, basis, half_cut(4)), WithinAbs(std::log(2.0), 1e-14));
}

TEST_CASE("entanglement symmetry, bounds and Haar value") {
    const int L = 10;
    const auto basis = enumerate_basis(BasisSpec::full(L));
    RngStream rng(24, 0);
    Eigen::VectorXcd psi(static_cast<Eigen::Index>(basis.size()));
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = {rng.normal(), rng.normal()};
    psi.normalize();
    const auto a = entanglement_spectrum(psi, basis, half_cut(L));
    std::vector<int> rest;
    for (int i = L / 2; i < L; ++i) rest.push_back(i);
    const auto b = entanglement_spectrum(psi, basis, rest);
    CHECK_THAT(a.entropy, WithinAbs(b.entropy, 1e-10));
    CHECK(a.entropy >= 0.0);
    CHECK(a.entropy <= std::log(32.0) + 1e-12);
    CHECK_THAT(a.entropy, WithinRel(page_value(L), 0.05));
    double tot = 0.0;
    for (double p : a.schmidt) tot += p;
    CHECK_THAT(tot, WithinAbs(1.0, 1e-12));
}

TEST_CASE("eth diagonals of trivial observables") {
    RngStream rng(25, 0);
    const auto m = sample_goe(30, rng);
    const auto s = eigh(m);
    const auto one = eth_diagonals(s, std::vector<double>(30, 1.0));
    for (double v : one) CHECK_THAT(v, WithinAbs(1.0, 1e-12));
    const auto self = eth_diagonals(s, SparseHamiltonian(m));
    for (std::size_t n = 0; n < 30; ++n) CHECK_THAT(self[n], WithinAbs(s.values(static_cast<Eigen::Index>(n)), 1e-10));
    CHECK_THROWS_AS(eth_diagonals(s, std::vector<double>(29, 1.0)), ConfigError);
    CHECK_THROWS_AS(eth_diagonals(eigh(m, false), std::vector<double>(30, 1.0)), ConfigError);
}

TEST_CASE("eth fluctuations") {
    std::vector<double> flat(40, 0.7);
    auto f = eth_fluctuations(flat);
    CHECK(f.z_av == 0.0);
    CHECK(f.z_max == 0.0);

    std::vector<double> ramp(40);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 0.25 * static_cast<double>(i);
    f = eth_fluctuations(ramp);
    CHECK_THAT(f.z_av, WithinAbs(0.25, 1e-14));
    CHECK_THAT(f.z_max, WithinAbs(0.25, 1e-14));

    RngStream rng(26, 0);
    std::vector<double> noisy(101);
    for (auto& x : noisy) x = rng.normal();
    auto shifted = noisy;
    for (auto& x : shifted) x += 5.0;
    const auto a = eth_fluctuations(noisy), b = eth_fluctuations(shifted);
    CHECK(a.z_max >= a.z_av);
    CHECK_THAT(b.z_av, WithinAbs(a.z_av, 1e-12));
    CHECK_THAT(b.z_max, WithinAbs(a.z_max, 1e-12));
    CHECK_THROWS_AS(eth_fluctuations(std::vector<double>{1, 2, 3}), ConfigError);
}

TEST_CASE("mirror parity blocks reproduce the full spectrum") {
    const TlgParams p{10, 5, 1.7, 1.0, Boundary::Open};
    const auto basis = enumerate_basis(BasisSpec::sector(p.L, p.N));
    const auto h = tlg_build(p, basis);
    CHECK(mirror_config(0b0000000011, 10) == 0b1100000000);
    const auto sec = parity_sectors(h, basis, [&](Config c) { return mirror_config(c, p.L); });
    CHECK(static_cast<std::size_t>(sec.even.rows() + sec.odd.rows()) == basis.size());
    const auto full = eigh(h.to_dense(), false).values;
    const auto e = eigh(sec.even, false).values, o = eigh(sec.odd, false).values;
    std::vector<double> merged(e.data(), e.data() + e.size());
    merged.insert(merged.end(), o.data(), o.data() + o.size());
    std::sort(merged.begin(), merged.end());
    for (std::size_t i = 0; i < merged.size(); ++i)
        CHECK_THAT(merged[i], WithinAbs(full(static_cast<Eigen::Index>(i)), 1e-10));
}

TEST_CASE("tlg diagonal elements of the central density broaden at large V") {
    // n_{L/2} in the lower half of the spectrum; open ladder so eigenstates are not momentum-mixed
    auto spread = [](double V) {
        const TlgParams p{12, 6, V, 1.0, Boundary::Open};
        const auto basis = enumerate_basis(BasisSpec::sector(p.L, p.N));
        const auto s = eigh(tlg_build(p, basis).to_dense());
        std::vector<double> n_mid(basis.size());
        for (std::size_t i = 0; i < basis.size(); ++i) n_mid[i] = static_cast<double>((basis.state(i) >> (p.L / 2)) & 1U);
        auto onn = eth_diagonals(s, n_mid);
        onn.resize(onn.size() / 2);
        return variance_of(onn);
    };
    CHECK(spread(3.0) > 2.0 * spread(0.2));
}
