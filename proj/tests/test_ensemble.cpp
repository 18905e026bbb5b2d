#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <vector>

#include "gec/analytic/moments.hpp"
#include "gec/ensemble/ensemble.hpp"

using namespace gec;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

ModelSpec goe(std::size_t D) {
    ModelSpec s;
    s.kind = ModelKind::Goe;
    s.goe_dim = D;
    return s;
}

ModelSpec rpm(std::size_t D, double gamma) {
    ModelSpec s;
    s.kind = ModelKind::Rpm;
    s.rpm = {D, gamma};
    return s;
}

ModelSpec tlg(int L, double V) {
    ModelSpec s;
    s.kind = ModelKind::Tlg;
    s.tlg = {L, L / 2, V, 1.0, Boundary::Periodic};
    return s;
}

bool same_bits(const RealizationRecord& a, const RealizationRecord& b) {
    return std::memcmp(&a, &b, sizeof(RealizationRecord)) == 0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_CASE("estimators agree on a deterministic instance") {
    const auto r = run_ensemble(tlg(12, 1.5), 1, 7, {Estimator::Exact, Estimator::SeparateAverage});
    CHECK_THAT(r.exact->mean, WithinAbs(r.separate->mean, 1e-14));
    CHECK_THAT(r.exact->var, WithinAbs(r.separate->var, 1e-14));
    CHECK(r.exact->n_realizations == 1);
    CHECK(r.exact->model == "tlg(L=12,N=6,V=1.5,t0=1,bc=periodic)");
}

TEST_CASE("deterministic instances have no estimator discrepancy") {
    const auto d = estimator_discrepancy({8, 10, 12}, [](double L) { return tlg(static_cast<int>(L), 2.0); }, 3, 1);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(d.dmean[i] < 1e-13);
        CHECK(d.dvar[i] < 1e-13);
    }
    CHECK_THROWS_AS(estimator_discrepancy({8, 10}, [](double L) { return tlg(static_cast<int>(L), 2.0); }, 3, 1),
                    ConfigError);
}

TEST_CASE("goe ensemble at D = 256") {
    const auto e = run_ensemble(goe(256), 500, 31, Estimator::Exact);
    const auto a = goe_gec_moments(SystemSize::finite(256));
    CHECK(std::abs(e.mean - a.mean) <= 3 * e.mean_se);
    CHECK(std::abs(e.var - a.variance) <= 3 * e.var_se);
    CHECK(e.seed == 31);
    CHECK(e.estimator == Estimator::Exact);
}

TEST_CASE("rpm separate-average estimator at gamma = 1, D = 1024") {
    const auto e = run_ensemble(rpm(1024, 1.0), 500, 32, Estimator::SeparateAverage);
    const double ref = rpm_gec_var(SystemSize::finite(1024), 1.0);
    CHECK(std::abs(e.var - ref) <= 3 * e.var_se + 10.0 / 1024);
}

TEST_CASE("bitwise determinism across worker counts") {
    const auto base = run_ensemble(rpm(64, 1.3), 40, 33, {Estimator::Exact, Estimator::SeparateAverage}, 1);
    for (std::size_t w : {4, 16}) {
        const auto r = run_ensemble(rpm(64, 1.3), 40, 33, {Estimator::Exact, Estimator::SeparateAverage}, w);
        for (std::size_t i = 0; i < 40; ++i) CHECK(same_bits(r.records[i], base.records[i]));
        CHECK(same_bits(r.exact->mean, base.exact->mean));
        CHECK(same_bits(r.exact->var_se, base.exact->var_se));
        CHECK(same_bits(r.separate->var, base.separate->var));
        CHECK(same_bits(r.separate->mean_se, base.separate->mean_se));
    }
}

TEST_CASE("joint runs share realizations") {
    const auto both = run_ensemble(goe(32), 20, 34, {Estimator::Exact, Estimator::SeparateAverage});
    const auto ex = run_ensemble(goe(32), 20, 34, Estimator::Exact);
    const auto sep = run_ensemble(goe(32), 20, 34, Estimator::SeparateAverage);
    CHECK(same_bits(both.exact->var, ex.var));
    CHECK(same_bits(both.separate->var, sep.var));
}

TEST_CASE("standard errors shrink like n^-1/2") {
    const auto a = run_ensemble(goe(32), 100, 35, Estimator::Exact);
    const auto b = run_ensemble(goe(32), 400, 35, Estimator::Exact);
    CHECK(a.mean_se / b.mean_se > 1.5);
    CHECK(a.mean_se / b.mean_se < 2.7);
    CHECK(a.var_se / b.var_se > 1.5);
    CHECK(a.var_se / b.var_se < 2.7);
}

TEST_CASE("errors carry the realization index") {
    ModelSpec s;
    s.kind = ModelKind::Qsm;
    s.qsm.grain = 10;
    s.qsm.outer = 17;
    CHECK_THROWS_AS(run_ensemble(s, 3, 1, Estimator::Exact), CapacityError);
    CHECK_THROWS_WITH(run_ensemble(s, 3, 1, Estimator::Exact, 2), ContainsSubstring("realization 0"));
    CHECK_THROWS_AS(run_ensemble(goe(8), 0, 1, Estimator::Exact), ConfigError);
}

TEST_CASE("estimator discrepancy is smaller on the ergodic side") {
    const std::vector<double> sizes{128, 256, 512};
    auto ladder = [&](double g) {
        return estimator_discrepancy(sizes, [g](double D) { return rpm(static_cast<std::size_t>(D), g); }, 200, 36);
    };
    const auto erg = ladder(0.5), frac = ladder(1.5);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        CHECK(erg.dvar[i] >= 0.0);
        CHECK(erg.dvar[i] < frac.dvar[i]);
    }
    REQUIRE(frac.loglog_slope.has_value());
    CHECK(*frac.loglog_slope < 0.0);
}

TEST_CASE("rpm distributions at D = 4096: narrow on the ergodic side") {
    const std::size_t n = 12;
    const auto deep = run_ensemble(rpm(4096, 0.25), n, 37, Estimator::Exact);
    CHECK(deep.var < 0.02);
    // gamma = 0.75 sits at 0.0264 by the closed form, above 0.02 at this size
    const auto near = run_ensemble(rpm(4096, 0.75), n, 37, Estimator::SeparateAverage);
    CHECK(std::abs(near.var - rpm_gec_var(SystemSize::finite(4096), 0.75)) <= 3 * near.var_se);
    for (double g : {1.5, 2.5}) {
        const auto e = run_ensemble(rpm(4096, g), n, 37, Estimator::SeparateAverage);
        CHECK(std::abs(e.var - rpm_gec_var(SystemSize::finite(4096), g)) <= 3 * e.var_se);
        CHECK(e.var > 20 * near.var);
    }
}
