// Exact var(GEC) of the triangular lattice gas at half filling and the
// crossing of consecutive sizes.

#include <cstdio>
#include <vector>

#include "gec/analytic/crossing.hpp"
#include "gec/tlg/moments.hpp"

int main() {
    using namespace gec;
    std::vector<double> grid;
    for (int i = 0; i <= 56; ++i) grid.push_back(0.2 + 0.05 * i);

    TlgMomentEngine engine;
    auto curve = [&](int L) {
        const auto ms = engine.moments(L, L / 2);
        Curve c{static_cast<double>(L), grid, {}};
        for (double V : grid) c.values.push_back(tlg_gec_moments(ms, V, 1.0).variance_value());
        return c;
    };

    std::vector<std::pair<double, double>> pts;
    for (int L = 40; L <= 120; L += 20) {
        const double v = crossing_point(curve(L), curve(L - 4)).param_star;
        std::printf("L = %3d  V* = %.5f\n", L, v);
        pts.emplace_back(L, v);
    }
    const auto ex = extrapolate_crossing(pts);
    std::printf("V*(L) = %.4f + %.3f / L\n", ex.v_inf, ex.slope);
}
