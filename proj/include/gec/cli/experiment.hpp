#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gec/analytic/moments.hpp"
#include "gec/ensemble/ensemble.hpp"
#include "gec/error.hpp"
#include "gec/fock/export.hpp"
#include "gec/io/config.hpp"
#include "gec/numerics/stats.hpp"
#include "gec/tlg/polynomial.hpp"

namespace gec::cli {

enum class ExperimentKind { AnalyticSweep, EdDistribution, TlgSweep, Diagnostics, GraphExport };

inline ExperimentKind parse_experiment_kind(const std::string& s) {
    if (s == "analytic-sweep") return ExperimentKind::AnalyticSweep;
    if (s == "ed-distribution") return ExperimentKind::EdDistribution;
    if (s == "tlg-sweep") return ExperimentKind::TlgSweep;
    if (s == "diagnostics") return ExperimentKind::Diagnostics;
    if (s == "graph-export") return ExperimentKind::GraphExport;
    throw ConfigError("unknown experiment kind '" + s +
                      "' (expected analytic-sweep, ed-distribution, tlg-sweep, diagnostics or graph-export)");
}

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::AnalyticSweep: return "analytic-sweep";
        case ExperimentKind::EdDistribution: return "ed-distribution";
        case ExperimentKind::TlgSweep: return "tlg-sweep";
        case ExperimentKind::Diagnostics: return "diagnostics";
        case ExperimentKind::GraphExport: return "graph-export";
    }
    return "?";
}

/// Name of the swept parameter for each model ("" for GOE).
inline const char* grid_parameter(ModelKind k) {
    switch (k) {
        case ModelKind::Rpm: return "gamma";
        case ModelKind::Qsm: return "alpha";
        case ModelKind::Tlg: return "V";
        case ModelKind::Goe: return "";
    }
    return "";
}

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::AnalyticSweep;
    ModelSpec model;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::string out = "gec_out";
    std::optional<double> budget;
    std::string hash_text;  // canonical config text

    // size ladder (D for goe/rpm, outer L for qsm, L for tlg) and parameter grid
    std::vector<double> sizes;
    std::vector<double> grid;

    // analytic
    EpsMoments eps;
    QsmMeanMode qsm_mean = QsmMeanMode::ExactF;

    // ensembles
    std::size_t realizations = 1;
    std::vector<Estimator> estimators{Estimator::Exact, Estimator::SeparateAverage};
    std::size_t bins = 64;
    Binning binning = Binning::Uniform;
    std::size_t raw_max = 100000;

    // tlg sweep
    Ensemble tlg_ensemble = Ensemble::Canonical;
    double filling = 0.5;
    int partner_offset = 4;
    int ed_check_max_L = 0;

    // diagnostics
    std::string observable = "auto";  // n-mid | projector | identity
    bool parity = false;
    double gap_window = 1.0;
    double eth_window = 0.5;
    bool entanglement = true;

    // graph export
    std::string format = "csv";  // csv | dot | both

    /// Parameter value for a grid entry, or the model block value when the grid is empty.
    [[nodiscard]] std::vector<double> grid_or_model() const {
        if (!grid.empty()) return grid;
        switch (model.kind) {
            case ModelKind::Rpm: return {model.rpm.gamma};
            case ModelKind::Qsm: return {model.qsm.alpha};
            case ModelKind::Tlg: return {model.tlg.V};
            case ModelKind::Goe: return {0.0};
        }
        return {};
    }

    [[nodiscard]] std::vector<double> sizes_or_model() const {
        if (!sizes.empty()) return sizes;
        switch (model.kind) {
            case ModelKind::Rpm: return {static_cast<double>(model.rpm.dim)};
            case ModelKind::Qsm: return {static_cast<double>(model.qsm.outer)};
            case ModelKind::Tlg: return {static_cast<double>(model.tlg.L)};
            case ModelKind::Goe: return {static_cast<double>(model.goe_dim)};
        }
        return {};
    }

    /// Model at one (size, parameter) point.
    [[nodiscard]] ModelSpec at(double size, double param) const {
        ModelSpec m = model;
        switch (m.kind) {
            case ModelKind::Goe: m.goe_dim = static_cast<std::size_t>(size); break;
            case ModelKind::Rpm:
                m.rpm.dim = static_cast<std::size_t>(size);
                m.rpm.gamma = param;
                break;
            case ModelKind::Qsm:
                m.qsm.outer = static_cast<int>(size);
                m.qsm.alpha = param;
                break;
            case ModelKind::Tlg:
                if (static_cast<int>(size) != m.tlg.L) {
                    m.tlg.L = static_cast<int>(size);
                    m.tlg.N = static_cast<int>(std::lround(filling * size));
                }
                m.tlg.V = param;
                break;
        }
        return m;
    }
};

namespace detail {

inline std::vector<double> read_grid(const io::KeyValueConfig& c) {
    auto values = c.real_list("grid", "values");
    const auto start = c.optional_real("grid", "start");
    const auto stop = c.optional_real("grid", "stop");
    const auto step = c.optional_real("grid", "step");
    if (start || stop || step) {
        if (!values.empty()) throw ConfigError("[grid]: give either values or start/stop/step, not both");
        if (!start || !stop || !step) throw ConfigError("[grid]: start, stop and step must be given together");
        if (!(*step > 0.0) || *stop < *start) throw ConfigError("[grid]: need step > 0 and stop >= start");
        const auto n = static_cast<long>(std::floor((*stop - *start) / *step + 1e-9)) + 1;
        if (n > 1000000) throw ConfigError("[grid]: more than 10^6 points");
        for (long i = 0; i < n; ++i) {
            // round away accumulated representation error (grids are given in decimal)
            const double v = *start + static_cast<double>(i) * *step;
            values.push_back(std::round(v * 1e10) / 1e10);
        }
    }
    return values;
}

inline std::size_t positive_count(const io::KeyValueConfig& c, const std::string& s, const std::string& k,
                                  std::int64_t fallback) {
    const auto v = c.integer(s, k, fallback);
    if (v < 1) throw ConfigError("[" + s + "] " + k + " must be >= 1");
    return static_cast<std::size_t>(v);
}

inline void read_model(const io::KeyValueConfig& c, ExperimentConfig& x) {
    auto& m = x.model;
    m.kind = parse_model(c.require_str("model", "name"));
    switch (m.kind) {
        case ModelKind::Goe: m.goe_dim = positive_count(c, "model", "dim", 64); break;
        case ModelKind::Rpm:
            m.rpm.dim = positive_count(c, "model", "dim", 256);
            m.rpm.gamma = c.real("model", "gamma", 1.0);
            x.eps.m2 = c.real("model", "eps_m2", 1.0);
            x.eps.m4 = c.real("model", "eps_m4", 3.0);
            x.eps.validate();
            break;
        case ModelKind::Qsm: {
            auto& q = m.qsm;
            q.grain = static_cast<int>(c.integer("model", "grain", 3));
            q.outer = static_cast<int>(c.integer("model", "outer", 8));
            q.alpha = c.real("model", "alpha", 1.0);
            q.g0 = c.real("model", "g0", 1.0);
            q.h = c.real("model", "h", 1.0);
            q.W = c.real("model", "W", 0.5);
            q.zeta = c.real("model", "zeta", 0.2);
            const auto mode = c.str("model", "mean_mode", "exact-f");
            if (mode == "exact-f") x.qsm_mean = QsmMeanMode::ExactF;
            else if (mode == "small-zeta") x.qsm_mean = QsmMeanMode::SmallZeta;
            else throw ConfigError("[model] mean_mode must be exact-f or small-zeta");
            q.validate();
            break;
        }
        case ModelKind::Tlg: {
            auto& t = m.tlg;
            t.L = static_cast<int>(c.integer("model", "L", 12));
            t.V = c.real("model", "V", 1.0);
            t.t0 = c.real("model", "t0", 1.0);
            t.bc = parse_boundary(c.str("model", "bc", "periodic"));
            x.filling = c.real("model", "filling", 0.5);
            if (!(x.filling >= 0.0 && x.filling <= 1.0)) throw ConfigError("[model] filling must be in [0, 1]");
            t.N = static_cast<int>(c.integer("model", "N", std::lround(x.filling * t.L)));
            x.tlg_ensemble = parse_ensemble(c.str("model", "ensemble", "canonical"));
            t.validate();
            break;
        }
    }
}

inline void read_ensemble(const io::KeyValueConfig& c, ExperimentConfig& x) {
    x.realizations = positive_count(c, "ensemble", "realizations", 100);
    const auto est = c.str("ensemble", "estimator", "both");
    if (est == "both") x.estimators = {Estimator::Exact, Estimator::SeparateAverage};
    else x.estimators = {parse_estimator(est)};
}

}  // namespace detail

/// Reads and validates an experiment; keys the selected kind does not use are errors.
inline ExperimentConfig parse_experiment(const io::KeyValueConfig& c) {
    ExperimentConfig x;
    x.hash_text = c.canonical();
    x.kind = parse_experiment_kind(c.require_str("experiment", "kind"));
    x.seed = c.unsigned_integer("experiment", "seed", 1);
    x.workers = detail::positive_count(c, "experiment", "workers", 1);
    x.out = c.str("experiment", "out", "gec_out");
    x.budget = c.optional_real("experiment", "budget");
    if (x.budget && !(*x.budget > 0.0)) throw ConfigError("[experiment] budget must be > 0 seconds");

    detail::read_model(c, x);
    const auto kind = x.model.kind;
    const bool allow_inf = x.kind == ExperimentKind::AnalyticSweep;
    x.sizes = c.real_list("grid", "sizes", allow_inf);
    x.grid = detail::read_grid(c);
    if (kind == ModelKind::Goe && !x.grid.empty()) throw ConfigError("[grid]: the GOE has no swept parameter");
    for (double s : x.sizes)
        if (!(s >= 0.0)) throw ConfigError("[grid] sizes must be non-negative");

    switch (x.kind) {
        case ExperimentKind::AnalyticSweep:
            if (kind != ModelKind::Rpm && kind != ModelKind::Qsm)
                throw ConfigError("analytic-sweep needs model rpm or qsm");
            if (x.grid.empty()) throw ConfigError("analytic-sweep needs a nonempty [grid]");
            break;
        case ExperimentKind::EdDistribution: {
            detail::read_ensemble(c, x);
            x.bins = detail::positive_count(c, "ensemble", "bins", 64);
            const auto b = c.str("ensemble", "binning", "uniform");
            if (b == "uniform") x.binning = Binning::Uniform;
            else if (b == "log") x.binning = Binning::Log;
            else throw ConfigError("[ensemble] binning must be uniform or log");
            x.raw_max = static_cast<std::size_t>(c.integer("ensemble", "raw_max", 100000));
            break;
        }
        case ExperimentKind::TlgSweep:
            if (kind != ModelKind::Tlg) throw ConfigError("tlg-sweep needs model tlg");
            if (x.model.tlg.bc != Boundary::Periodic) throw ConfigError("tlg-sweep needs periodic boundary conditions");
            if (x.grid.empty()) throw ConfigError("tlg-sweep needs a nonempty V [grid]");
            x.partner_offset = static_cast<int>(c.integer("tlg", "partner_offset", 4));
            x.ed_check_max_L = static_cast<int>(c.integer("tlg", "ed_check_max_L", 0));
            if (x.partner_offset < 0 || x.partner_offset % 2 != 0)
                throw ConfigError("[tlg] partner_offset must be even and >= 0");
            for (double L : x.sizes_or_model()) {
                const double N = x.filling * L;
                if (L != std::floor(L) || N != std::floor(N))
                    throw ConfigError("tlg-sweep: filling * L must be an integer for every L");
            }
            break;
        case ExperimentKind::Diagnostics:
            if (kind != ModelKind::Goe && kind != ModelKind::Tlg) throw ConfigError("diagnostics needs model goe or tlg");
            if (kind == ModelKind::Goe) x.realizations = detail::positive_count(c, "diagnostics", "realizations", 20);
            x.observable = c.str("diagnostics", "observable", kind == ModelKind::Tlg ? "n-mid" : "projector");
            if (x.observable != "n-mid" && x.observable != "projector" && x.observable != "identity")
                throw ConfigError("[diagnostics] observable must be n-mid, projector or identity");
            if (x.observable == "n-mid" && kind != ModelKind::Tlg)
                throw ConfigError("[diagnostics] observable n-mid needs model tlg");
            x.parity = c.boolean("diagnostics", "parity", kind == ModelKind::Tlg && x.model.tlg.bc == Boundary::Open);
            if (x.parity && (kind != ModelKind::Tlg || x.model.tlg.bc != Boundary::Open))
                throw ConfigError("[diagnostics] mirror parity needs an open tlg ladder");
            x.gap_window = c.real("diagnostics", "gap_window", 1.0);
            x.eth_window = c.real("diagnostics", "eth_window", 0.5);
            x.entanglement = c.boolean("diagnostics", "entanglement", kind == ModelKind::Tlg);
            if (x.entanglement && kind != ModelKind::Tlg)
                throw ConfigError("[diagnostics] entanglement needs model tlg");
            break;
        case ExperimentKind::GraphExport:
            x.format = c.str("export", "format", "csv");
            if (x.format != "csv" && x.format != "dot" && x.format != "both")
                throw ConfigError("[export] format must be csv, dot or both");
            break;
    }
    c.reject_unknown();
    return x;
}

inline ExperimentConfig load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_experiment(io::KeyValueConfig::parse(in, path));
}

}  // namespace gec::cli
