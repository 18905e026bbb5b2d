#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gec/analytic/crossing.hpp"
#include "gec/analytic/moments.hpp"
#include "gec/cli/experiment.hpp"
#include "gec/diagnostics/entanglement.hpp"
#include "gec/diagnostics/spectral.hpp"
#include "gec/ensemble/ensemble.hpp"
#include "gec/fock/basis.hpp"
#include "gec/fock/export.hpp"
#include "gec/fock/gec.hpp"
#include "gec/io/csv.hpp"
#include "gec/io/manifest.hpp"
#include "gec/models/tlg.hpp"
#include "gec/numerics/eigen.hpp"
#include "gec/numerics/stats.hpp"
#include "gec/tlg/moments.hpp"

namespace gec::cli {

using io::CsvTable;
using io::RunContext;
using Json = nlohmann::ordered_json;

/// Wall-clock limit shared by every stage of a run.
class Deadline {
public:
    explicit Deadline(std::optional<double> seconds)
        : seconds_(seconds), start_(std::chrono::steady_clock::now()) {}

    void check(const std::string& where) const {
        if (seconds_ && elapsed() > *seconds_)
            throw BudgetExceeded(where + ": run budget of " + io::format_real(*seconds_) + " s exhausted");
    }

    [[nodiscard]] std::optional<double> remaining() const {
        if (!seconds_) return std::nullopt;
        return std::max(0.0, *seconds_ - elapsed());
    }

private:
    [[nodiscard]] double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    std::optional<double> seconds_;
    std::chrono::steady_clock::time_point start_;
};

inline Json to_json(const GecMomentEstimate& e) {
    return Json{{"model", e.model},         {"seed", e.seed},       {"estimator", to_string(e.estimator)},
                {"n_realizations", e.n_realizations}, {"mean", e.mean}, {"var", e.var},
                {"mean_se", e.mean_se},     {"var_se", e.var_se}};
}

namespace detail {

inline SystemSize size_of(double s) { return std::isinf(s) ? SystemSize::limit() : SystemSize::finite(s); }

inline std::string size_label(double s) { return std::isinf(s) ? "inf" : io::format_real(s); }

/// Closed-form moments where they exist (GOE, RPM, QSM).
inline std::optional<AnalyticMoments> analytic_reference(const ExperimentConfig& x, const ModelSpec& m) {
    switch (m.kind) {
        case ModelKind::Goe: return goe_gec_moments(SystemSize::finite(static_cast<double>(m.goe_dim)));
        case ModelKind::Rpm:
            return rpm_gec_moments(SystemSize::finite(static_cast<double>(m.rpm.dim)), m.rpm.gamma, x.eps);
        case ModelKind::Qsm: return qsm_gec_moments(m.qsm, SystemSize::finite(m.qsm.outer), x.qsm_mean);
        case ModelKind::Tlg: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace detail

// ---------------------------------------------------------------- analytic sweep

inline void cmd_analytic_sweep(const ExperimentConfig& x, RunContext& ctx) {
    const auto sizes = x.sizes_or_model();
    const char* param = grid_parameter(x.model.kind);
    CsvTable table({"model", "size", param, "mean", "var", "branch"});
    std::map<double, Curve> curves;
    ctx.stage("analytic", [&] {
        for (double s : sizes) {
            Curve curve{s, {}, {}};
            for (double p : x.grid) {
                AnalyticMoments a;
                if (x.model.kind == ModelKind::Rpm) {
                    a = rpm_gec_moments(detail::size_of(s), p, x.eps);
                } else {
                    auto q = x.model.qsm;
                    q.alpha = p;
                    a = qsm_gec_moments(q, detail::size_of(s), x.qsm_mean);
                }
                table.row({to_string(x.model.kind), detail::size_label(s), p, a.mean, a.variance, a.branch});
                curve.params.push_back(p);
                curve.values.push_back(a.variance);
            }
            if (!std::isinf(s)) curves.emplace(s, std::move(curve));
        }
    });
    ctx.write("analytic_sweep.csv", table.str());

    if (x.grid.size() < 2 || curves.size() < 2) return;
    CsvTable cross({"size_a", "size_b", std::string(param) + "_star", "status"});
    std::vector<double> finite;
    for (double s : sizes)
        if (!std::isinf(s)) finite.push_back(s);
    for (std::size_t i = 0; i + 1 < finite.size(); ++i) {
        const auto& a = curves.at(finite[i]);
        const auto& b = curves.at(finite[i + 1]);
        try {
            cross.row({finite[i], finite[i + 1], crossing_point(a, b).param_star, "ok"});
        } catch (const DegenerateError& e) {
            cross.row({finite[i], finite[i + 1], std::numeric_limits<double>::quiet_NaN(), e.what()});
        }
    }
    ctx.write("crossings.csv", cross.str());
}

// ---------------------------------------------------------------- ED distribution

struct RealizationValues {
    std::vector<double> gec;
    RealizationRecord record;
};

inline void cmd_ed_distribution(const ExperimentConfig& x, RunContext& ctx, const Deadline& deadline) {
    const char* param = grid_parameter(x.model.kind);
    const std::string pname = *param ? param : "param";
    CsvTable moments({"model", "size", pname, "estimator", "mean", "var", "mean_se", "var_se", "n_realizations",
                      "seed", "analytic_mean", "analytic_var"});
    CsvTable raw({"size", pname, "realization", "state", "gec"});
    CsvTable hist({"size", pname, "bin_lo", "bin_hi", "count", "density"});
    Json records = Json::array();

    for (double s : x.sizes_or_model()) {
        for (double p : x.grid_or_model()) {
            const ModelSpec m = x.at(s, p);
            const auto per = ctx.stage("ed " + m.fingerprint(), [&] {
                return parallel_map<RealizationValues>(x.realizations, x.workers, [&](std::size_t r) {
                    deadline.check("ed-distribution");
                    RngStream rng(x.seed, r);
                    const auto h = m.sample(rng);
                    auto g = gec_exact(h);
                    auto rec = realization_record(h, g);
                    return RealizationValues{std::move(g.values), rec};
                });
            });
            std::vector<RealizationRecord> recs;
            std::vector<double> all;
            for (const auto& v : per) {
                recs.push_back(v.record);
                all.insert(all.end(), v.gec.begin(), v.gec.end());
            }
            const auto ref = detail::analytic_reference(x, m);
            const double nan = std::numeric_limits<double>::quiet_NaN();
            for (auto e : x.estimators) {
                const auto est = summarize_ensemble(recs, e, m.fingerprint(), x.seed);
                moments.row({to_string(m.kind), s, p, to_string(e), est.mean, est.var, est.mean_se, est.var_se,
                             est.n_realizations, est.seed, ref ? ref->mean : nan, ref ? ref->variance : nan});
                records.push_back(to_json(est));
            }
            if (x.raw_max > 0) {
                const std::size_t stride = std::max<std::size_t>(1, (all.size() + x.raw_max - 1) / x.raw_max);
                std::size_t k = 0;
                for (std::size_t r = 0; r < per.size(); ++r)
                    for (std::size_t i = 0; i < per[r].gec.size(); ++i, ++k)
                        if (k % stride == 0) raw.row({s, p, r, i, per[r].gec[i]});
            }
            const auto h = histogram(all, x.binning, x.bins);
            for (std::size_t b = 0; b < h.counts.size(); ++b)
                hist.row({s, p, h.edges[b], h.edges[b + 1], h.counts[b], h.density[b]});
        }
    }
    ctx.write("moments.csv", moments.str());
    if (x.raw_max > 0) ctx.write("gec_values.csv", raw.str());
    ctx.write("histograms.csv", hist.str());
    ctx.write("records.json", records.dump(2) + "\n");
}

// ---------------------------------------------------------------- TLG sweep

inline void cmd_tlg_sweep(const ExperimentConfig& x, RunContext& ctx, const Deadline& deadline) {
    const auto sizes = x.sizes_or_model();
    std::vector<int> needed;
    for (double s : sizes) {
        needed.push_back(static_cast<int>(s));
        if (x.partner_offset > 0) needed.push_back(static_cast<int>(s) - x.partner_offset);
    }
    std::sort(needed.begin(), needed.end());
    needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
    for (int L : needed)
        if (L < 6 || L % 2 != 0) throw ConfigError("tlg-sweep: every L and partner L - offset must be even and >= 6");

    const auto e = x.tlg_ensemble;
    const double t0 = x.model.tlg.t0;
    CsvTable sweep({"L", "N", "ensemble", "V", "mean", "var"});
    CsvTable mom({"L", "N", "ensemble", "k", "numerator", "denominator"});
    std::map<int, MomentSet> sets;
    std::map<int, Curve> curves;

    auto flush = [&] {
        ctx.write("tlg_sweep.csv", sweep.str());
        ctx.write("tlg_moments.csv", mom.str());
    };

    TlgMomentEngine engine(deadline.remaining());
    try {
        ctx.stage("moments", [&] {
            for (int L : needed) {
                const int N = static_cast<int>(std::lround(x.filling * L));
                auto ms = engine.moments(L, N, e);
                for (int k = 1; k <= 4; ++k) {
                    const auto& r = ms[k];
                    mom.row({L, N, to_string(e), k, numerator(r).str(), denominator(r).str()});
                }
                Curve c{static_cast<double>(L), {}, {}};
                for (double V : x.grid) {
                    const auto g = tlg_gec_moments(ms, V, t0);
                    sweep.row({L, N, to_string(e), V, g.mean_value(), g.variance_value()});
                    c.params.push_back(V);
                    c.values.push_back(g.variance_value());
                }
                curves.emplace(L, std::move(c));
                sets.emplace(L, std::move(ms));
            }
        });
    } catch (const BudgetExceeded&) {
        flush();
        throw;
    }
    flush();

    Json summary;
    if (x.partner_offset > 0 && x.grid.size() >= 2) {
        CsvTable cross({"L", "partner", "V_star", "status"});
        std::vector<std::pair<double, double>> pts;
        for (double s : sizes) {
            const int L = static_cast<int>(s);
            try {
                const auto c = crossing_point(curves.at(L), curves.at(L - x.partner_offset));
                cross.row({L, L - x.partner_offset, c.param_star, "ok"});
                pts.emplace_back(L, c.param_star);
            } catch (const DegenerateError& err) {
                cross.row({L, L - x.partner_offset, std::numeric_limits<double>::quiet_NaN(), err.what()});
            }
        }
        ctx.write("crossings.csv", cross.str());
        Json points = Json::array();
        for (const auto& [L, v] : pts) points.push_back({{"L", L}, {"V_star", v}});
        summary["crossings"] = points;
        if (pts.size() >= 3) {
            const auto ex = extrapolate_crossing(pts);
            summary["extrapolation"] = {{"V_inf", ex.v_inf}, {"slope", ex.slope}, {"residual", ex.residual}};
        }
    }

    if (x.ed_check_max_L > 0) {
        CsvTable check({"L", "N", "V", "mean_engine", "var_engine", "mean_ed", "var_ed", "rel_dev_mean",
                        "rel_dev_var"});
        double worst = 0.0;
        ctx.stage("ed-check", [&] {
            for (int L : needed) {
                if (L > x.ed_check_max_L) continue;
                const int N = static_cast<int>(std::lround(x.filling * L));
                if (e != Ensemble::Canonical) throw ConfigError("tlg-sweep: ED check needs the canonical ensemble");
                for (double V : x.grid) {
                    deadline.check("tlg-sweep ED check");
                    const auto g = gec_exact(tlg_build({L, N, V, t0, Boundary::Periodic}));
                    double s1 = 0.0, s2 = 0.0;
                    for (double v : g.values) {
                        s1 += v;
                        s2 += v * v;
                    }
                    const double n = static_cast<double>(g.values.size());
                    const double mean = s1 / n, var = s2 / n - mean * mean;
                    const auto an = tlg_gec_moments(sets.at(L), V, t0);
                    const double dm = std::abs(an.mean_value() - mean) / std::abs(mean);
                    const double dv = std::abs(an.variance_value() - var) / std::abs(var);
                    worst = std::max({worst, dm, dv});
                    check.row({L, N, V, an.mean_value(), an.variance_value(), mean, var, dm, dv});
                }
            }
        });
        ctx.write("tlg_ed_check.csv", check.str());
        summary["ed_check_max_rel_dev"] = worst;
    }
    if (!summary.empty()) {
        ctx.write("tlg_summary.json", summary.dump(2) + "\n");
        ctx.manifest().summary = summary;
    }
}

// ---------------------------------------------------------------- diagnostics

struct DiagnosticPoint {
    GapRatioResult gaps;  // full spectrum, or the first parity sector
    double mean_r = 0.0;  // pooled over sectors when parity is used
    std::size_t sectors = 1;
    std::size_t n_ratios = 0;
    std::size_t degenerate = 0;
    EthFluctuations eth;
    Eigen::VectorXd energies;
    std::vector<double> onn;
    std::vector<double> see;  // S_EE / S_Page, empty when not requested
};

namespace detail {

inline std::vector<double> diagonal_observable(const std::string& name, const FockBasis* basis, int L,
                                               std::size_t dim) {
    std::vector<double> o(dim, 1.0);
    if (name == "identity") return o;
    if (name == "projector") {
        for (std::size_t i = 0; i < dim; ++i) o[i] = i < dim / 2 ? 1.0 : 0.0;
        return o;
    }
    // n-mid: occupation of site L/2
    for (std::size_t i = 0; i < dim; ++i) o[i] = static_cast<double>((basis->state(i) >> (L / 2)) & 1U);
    return o;
}

inline DiagnosticPoint tlg_diagnostics(const ExperimentConfig& x, const TlgParams& p) {
    const auto basis = enumerate_basis(BasisSpec::sector(p.L, p.N));
    const auto h = tlg_build(p, basis);
    DiagnosticPoint d;
    const auto s = eigh(h.to_dense());
    d.energies = s.values;
    if (x.parity) {
        const auto sec = parity_sectors(h, basis, [&](Config c) { return mirror_config(c, p.L); });
        std::vector<GapRatioResult> parts;
        for (const auto* block : {&sec.even, &sec.odd})
            if (block->rows() >= 3) parts.push_back(gap_ratios(eigh(*block, false).values, x.gap_window));
        d.sectors = parts.size();
        double sum = 0.0;
        for (const auto& g : parts) {
            const auto [lo, hi] = gec::detail::central_window(g.ratios.size(), x.gap_window);
            for (std::size_t n = lo; n < hi; ++n) sum += g.ratios[n];
            d.n_ratios += hi - lo;
            d.degenerate += g.degenerate;
        }
        d.mean_r = sum / static_cast<double>(d.n_ratios);
        d.gaps = parts.front();
    } else {
        d.gaps = gap_ratios(s.values, x.gap_window);
        d.mean_r = d.gaps.mean;
        const auto [lo, hi] = gec::detail::central_window(d.gaps.ratios.size(), x.gap_window);
        d.n_ratios = hi - lo;
        d.degenerate = d.gaps.degenerate;
    }
    d.onn = eth_diagonals(s, diagonal_observable(x.observable, &basis, p.L, basis.size()));
    d.eth = eth_fluctuations(d.onn, x.eth_window);
    if (x.entanglement) {
        const double page = page_value(p.L);
        const auto cut = half_cut(p.L);
        for (Eigen::Index n = 0; n < s.vectors.cols(); ++n) {
            const Eigen::VectorXd v = s.vectors.col(n);
            d.see.push_back(entanglement_entropy(v, basis, cut) / page);
        }
    }
    return d;
}

inline DiagnosticPoint goe_diagnostics(const ExperimentConfig& x, std::size_t D, std::size_t r) {
    RngStream rng(x.seed, r);
    const auto s = eigh(sample_goe(D, rng));
    DiagnosticPoint d;
    d.energies = s.values;
    d.gaps = gap_ratios(s.values, x.gap_window);
    d.mean_r = d.gaps.mean;
    d.onn = eth_diagonals(s, diagonal_observable(x.observable, nullptr, 0, D));
    d.eth = eth_fluctuations(d.onn, x.eth_window);
    return d;
}

}  // namespace detail

inline void cmd_diagnostics(const ExperimentConfig& x, RunContext& ctx, const Deadline& deadline) {
    const bool tlg = x.model.kind == ModelKind::Tlg;
    const std::string pname = tlg ? "V" : "param";
    CsvTable gaps({"model", "size", pname, "mean_r", "n_ratios", "degenerate", "sectors", "realizations"});
    CsvTable eth({"model", "size", pname, "realization", "z_av", "z_max"});
    CsvTable states({"model", "size", pname, "n", "energy", "o_nn", "see_over_page"});
    const double nan = std::numeric_limits<double>::quiet_NaN();

    auto emit_states = [&](double size, double p, const DiagnosticPoint& d) {
        for (std::size_t n = 0; n < d.onn.size(); ++n)
            states.row({to_string(x.model.kind), size, p, n, d.energies(static_cast<Eigen::Index>(n)), d.onn[n],
                        d.see.empty() ? nan : d.see[n]});
    };

    if (tlg) {
        const auto grid = x.grid_or_model();
        const auto pts = ctx.stage("diagnostics", [&] {
            return parallel_map<DiagnosticPoint>(grid.size(), x.workers, [&](std::size_t i) {
                deadline.check("diagnostics");
                auto p = x.model.tlg;
                p.V = grid[i];
                return detail::tlg_diagnostics(x, p);
            });
        });
        const double L = x.model.tlg.L;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& d = pts[i];
            gaps.row({"tlg", L, grid[i], d.mean_r, d.n_ratios, d.degenerate, d.sectors, 1});
            eth.row({"tlg", L, grid[i], 0, d.eth.z_av, d.eth.z_max});
            emit_states(L, grid[i], d);
        }
    } else {
        for (double size : x.sizes_or_model()) {
            const auto D = static_cast<std::size_t>(size);
            const auto pts = ctx.stage("diagnostics D=" + io::format_real(size), [&] {
                return parallel_map<DiagnosticPoint>(x.realizations, x.workers, [&](std::size_t r) {
                    deadline.check("diagnostics");
                    return detail::goe_diagnostics(x, D, r);
                });
            });
            std::vector<GapRatioResult> all;
            std::size_t degenerate = 0, count = 0;
            double sum = 0.0;
            for (std::size_t r = 0; r < pts.size(); ++r) {
                const auto& g = pts[r].gaps;
                const auto [lo, hi] = gec::detail::central_window(g.ratios.size(), x.gap_window);
                for (std::size_t n = lo; n < hi; ++n) sum += g.ratios[n];
                count += hi - lo;
                degenerate += g.degenerate;
                eth.row({"goe", size, 0.0, r, pts[r].eth.z_av, pts[r].eth.z_max});
            }
            gaps.row({"goe", size, 0.0, sum / static_cast<double>(count), count, degenerate, 1, pts.size()});
            emit_states(size, 0.0, pts.front());
        }
    }
    ctx.write("gap_ratio.csv", gaps.str());
    ctx.write("eth_fluctuations.csv", eth.str());
    ctx.write("eigenstates.csv", states.str());
}

// ---------------------------------------------------------------- graph export

inline void cmd_graph_export(const ExperimentConfig& x, RunContext& ctx) {
    const auto& m = x.model;
    RngStream rng(x.seed, 0);
    std::optional<FockBasis> basis;
    std::optional<SparseHamiltonian> h;
    auto spin_basis = [](std::size_t D) {
        const int n = std::countr_zero(D);
        if (D < 2 || (std::size_t{1} << n) != D) throw ConfigError("graph-export: dim must be a power of two");
        return enumerate_basis(BasisSpec::full(n));
    };
    switch (m.kind) {
        case ModelKind::Tlg:
            basis = enumerate_basis(BasisSpec::sector(m.tlg.L, m.tlg.N));
            h = tlg_build(m.tlg, *basis);
            break;
        case ModelKind::Qsm:
            basis = enumerate_basis(BasisSpec::full(m.qsm.grain + m.qsm.outer));
            h = m.sample(rng);
            break;
        case ModelKind::Rpm:
            basis = spin_basis(m.rpm.dim);
            h = m.sample(rng);
            break;
        case ModelKind::Goe:
            basis = spin_basis(m.goe_dim);
            h = m.sample(rng);
            break;
    }
    const auto g = ctx.stage("gec", [&] { return gec_exact(*h); });
    if (x.format == "csv" || x.format == "both") {
        const auto csv = export_graph_csv(*h, *basis, g);
        ctx.write("graph_nodes.csv", csv.nodes);
        ctx.write("graph_edges.csv", csv.edges);
    }
    if (x.format == "dot" || x.format == "both") ctx.write("graph.dot", export_graph_dot(*h, *basis, g));
}

// ---------------------------------------------------------------- dispatch

inline io::RunManifest make_manifest(const ExperimentConfig& x) {
    io::RunManifest m;
    m.config_hash = io::content_hash(x.hash_text + "seed=" + std::to_string(x.seed) + "\n");
    m.experiment = to_string(x.kind);
    m.seed = x.seed;
    m.workers = x.workers;
    return m;
}

/// Runs the experiment into x.out. The manifest is written on success and on
/// budget exhaustion (status "budget-exceeded", partial outputs listed).
inline io::RunManifest run_experiment(const ExperimentConfig& x) {
    RunContext ctx(x.out, make_manifest(x));
    const Deadline deadline(x.budget);
    try {
        switch (x.kind) {
            case ExperimentKind::AnalyticSweep: cmd_analytic_sweep(x, ctx); break;
            case ExperimentKind::EdDistribution: cmd_ed_distribution(x, ctx, deadline); break;
            case ExperimentKind::TlgSweep: cmd_tlg_sweep(x, ctx, deadline); break;
            case ExperimentKind::Diagnostics: cmd_diagnostics(x, ctx, deadline); break;
            case ExperimentKind::GraphExport: cmd_graph_export(x, ctx); break;
        }
    } catch (const BudgetExceeded&) {
        ctx.finish("budget-exceeded");
        throw;
    }
    ctx.finish();
    return ctx.manifest();
}

}  // namespace gec::cli
