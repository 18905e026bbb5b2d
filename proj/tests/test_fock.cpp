#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "gec/fock/basis.hpp"
#include "gec/fock/export.hpp"
#include "gec/fock/gec.hpp"
#include "gec/fock/hamiltonian.hpp"
#include "gec/models/tlg.hpp"
#include "gec/numerics/rng.hpp"

using namespace gec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// [[a, b], [b, d]]
SparseHamiltonian sym2(double a, double b, double d) {
    return SparseHamiltonian(std::vector<double>{a, d}, b == 0.0 ? std::vector<Coupling>{} : std::vector<Coupling>{{0, 1, b}});
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char ch : s) n += ch == '\n';
    return n;
}

}  // namespace

TEST_CASE("basis dimensions") {
    CHECK(enumerate_basis(BasisSpec::full(2)).size() == 4);
    CHECK(enumerate_basis(BasisSpec::sector(4, 2)).size() == 6);
    CHECK(enumerate_basis(BasisSpec::sector(11, 5)).size() == 462);
    CHECK_THROWS_AS(enumerate_basis(BasisSpec::full(27)), CapacityError);
    CHECK_THROWS_AS(enumerate_basis(BasisSpec::sector(40, 20)), CapacityError);
}

TEST_CASE("sector basis is an ordered bijection") {
    const auto b = enumerate_basis(BasisSpec::sector(10, 4));
    for (std::size_t i = 0; i < b.size(); ++i) {
        CHECK(std::popcount(b.state(i)) == 4);
        if (i > 0) CHECK(b.state(i) > b.state(i - 1));
        CHECK(b.index_of(b.state(i)) == i);
    }
    CHECK_FALSE(b.index_of(0b111).has_value());
    CHECK(b.label(0) == "1111000000");
}

TEST_CASE("hamiltonian rejects malformed edges") {
    CHECK_THROWS_AS(SparseHamiltonian({0, 0}, {{1, 0, 1.0}}), ConfigError);
    CHECK_THROWS_AS(SparseHamiltonian({0, 0}, {{0, 1, 0.0}}), ConfigError);
    CHECK_THROWS_AS(SparseHamiltonian({0, 0}, {{0, 1, 1.0}, {0, 1, 2.0}}), ConfigError);
    CHECK_THROWS_AS(SparseHamiltonian({0, 0}, {{0, 2, 1.0}}), ConfigError);
}

TEST_CASE("gec hand examples") {
    auto g = gec_exact(sym2(1, 0, -1));
    CHECK(g.shift == 0.0);
    CHECK(g.width == 1.0);
    CHECK(g.values == std::vector<double>{1, 1});

    g = gec_exact(sym2(0, 1, 0));
    CHECK(g.numerators == std::vector<double>{2, 2});
    CHECK(g.values == std::vector<double>{2, 2});

    g = gec_exact(sym2(1, 1, -1));
    CHECK(g.width == 2.0);
    CHECK(g.numerators == std::vector<double>{3, 3});
    CHECK(g.values == std::vector<double>{1.5, 1.5});

    for (auto h : {sym2(1, 0, -1), sym2(0, 1, 0)}) CHECK(gec_offdiag_form(h).values == gec_exact(h).values);
}

TEST_CASE("gec degenerate and small inputs") {
    CHECK_THROWS_AS(gec_exact(SparseHamiltonian({2.0, 2.0}, {})), DegenerateError);
    CHECK_THROWS_AS(gec_exact(SparseHamiltonian({1.0}, {})), ConfigError);
}

TEST_CASE("gec_offdiag_form matches gec_exact on a random sparse instance") {
    RngStream rng(11, 0);
    std::vector<double> diag(100);
    for (auto& d : diag) d = rng.normal();
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<Coupling> edges;
    for (int k = 0; k < 300; ++k) {
        std::size_t i = rng.index(100), j = rng.index(100);
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        if (!seen.insert({i, j}).second) continue;
        edges.push_back({i, j, rng.normal()});
    }
    const SparseHamiltonian h(diag, edges);
    const auto a = gec_exact(h), b = gec_offdiag_form(h);
    double worst = 0.0;
    for (std::size_t i = 0; i < 100; ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    CHECK(worst < 1e-12);
}

TEST_CASE("dense and sparse backings agree") {
    RngStream rng(12, 0);
    const auto m = sample_goe(20, rng);
    const SparseHamiltonian dense(m);
    std::vector<double> diag(20);
    std::vector<Coupling> edges;
    for (std::size_t i = 0; i < 20; ++i) {
        diag[i] = m(i, i);
        for (std::size_t j = i + 1; j < 20; ++j) edges.push_back({i, j, m(i, j)});
    }
    const SparseHamiltonian sparse(diag, edges);
    const auto a = gec_exact(dense), b = gec_exact(sparse);
    for (std::size_t i = 0; i < 20; ++i) CHECK_THAT(a.values[i], WithinRel(b.values[i], 1e-12));
    CHECK(dense.to_dense() == sparse.to_dense());
}

TEST_CASE("graph export csv") {
    const auto basis = enumerate_basis(BasisSpec::full(1));
    auto h = sym2(0, 1, 0);
    auto csv = export_graph_csv(h, basis, gec_exact(h));
    CHECK(count_lines(csv.nodes) == 2 + 2);
    CHECK(csv.edges == "src,dst,weight\n0,1,1\n");

    h = sym2(1, 0, -1);
    csv = export_graph_csv(h, basis, gec_exact(h));
    CHECK(csv.edges == "src,dst,weight\n0,0,1\n1,1,-1\n");
    CHECK(csv.nodes.find("index,bitstring,gec\n0,0,1\n1,1,1\n") != std::string::npos);

    CHECK_THROWS_AS(export_graph(h, basis, gec_exact(h), "graphml"), ConfigError);
}

TEST_CASE("graph export of the L=11 N=5 ladder") {
    const TlgParams p{.L = 11, .N = 5, .V = 3.0, .t0 = 1.0, .bc = Boundary::Open};
    const auto basis = enumerate_basis(BasisSpec::sector(p.L, p.N));
    const auto h = tlg_build(p, basis);
    const auto g = gec_exact(h);
    const auto csv = export_graph_csv(h, basis, g);
    CHECK(count_lines(csv.nodes) == 462 + 2);
    const auto dot = export_graph(h, basis, g, "dot");
    std::size_t attrs = 0;
    for (std::size_t pos = 0; (pos = dot.find("gec=", pos)) != std::string::npos; ++pos) ++attrs;
    CHECK(attrs == 462);
}
