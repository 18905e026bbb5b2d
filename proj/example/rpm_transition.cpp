// Analytic var(GEC) of the Rosenzweig-Porter model next to a small ED ensemble.

#include <cstdio>

#include "gec/analytic/moments.hpp"
#include "gec/ensemble/ensemble.hpp"

int main() {
    using namespace gec;
    const std::size_t D = 512;
    std::printf("%6s %12s %12s %12s %12s\n", "gamma", "var(D=512)", "ED sep-avg", "+-SE", "var(inf)");
    for (double gamma : {0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5}) {
        ModelSpec m;
        m.kind = ModelKind::Rpm;
        m.rpm.dim = D;
        m.rpm.gamma = gamma;
        const auto ed = run_ensemble(m, 100, 1, Estimator::SeparateAverage);
        std::printf("%6.2f %12.6f %12.6f %12.6f %12.6f\n", gamma,
                    rpm_gec_var(SystemSize::finite(static_cast<double>(D)), gamma), ed.var, ed.var_se,
                    rpm_gec_var(SystemSize::limit(), gamma));
    }
}
