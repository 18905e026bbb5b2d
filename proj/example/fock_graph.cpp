// GEC of every Fock state of a small open ladder; prints the most and least
// central configurations.

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <vector>

#include "gec/fock/basis.hpp"
#include "gec/fock/gec.hpp"
#include "gec/models/tlg.hpp"

int main() {
    using namespace gec;
    const TlgParams p{10, 5, 1.0, 1.0, Boundary::Open};
    const auto basis = enumerate_basis(BasisSpec::sector(p.L, p.N));
    const auto g = gec_exact(tlg_build(p, basis));

    std::vector<std::size_t> order(basis.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return g.values[a] > g.values[b]; });

    std::printf("D = %zu, mean GEC = %.6f\n", basis.size(),
                std::accumulate(g.values.begin(), g.values.end(), 0.0) / static_cast<double>(basis.size()));
    for (std::size_t k = 0; k < 5; ++k)
        std::printf("  high  %s  %.6f\n", basis.label(order[k]).c_str(), g.values[order[k]]);
    for (std::size_t k = basis.size() - 5; k < basis.size(); ++k)
        std::printf("  low   %s  %.6f\n", basis.label(order[k]).c_str(), g.values[order[k]]);
}
