#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <iomanip>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gec/error.hpp"
#include "gec/fock/gec.hpp"
#include "gec/fock/hamiltonian.hpp"
#include "gec/models/qsm.hpp"
#include "gec/models/rpm.hpp"
#include "gec/models/tlg.hpp"
#include "gec/numerics/matrix.hpp"
#include "gec/numerics/rng.hpp"
#include "gec/numerics/stats.hpp"

namespace gec {

enum class Estimator { Exact, SeparateAverage };

inline const char* to_string(Estimator e) { return e == Estimator::Exact ? "exact" : "separate-average"; }

inline Estimator parse_estimator(const std::string& s) {
    if (s == "exact" || s == "per-realization-exact") return Estimator::Exact;
    if (s == "separate" || s == "separate-average") return Estimator::SeparateAverage;
    throw ConfigError("unknown estimator '" + s + "'");
}

/// Per-realization power sums; enough for both estimators. Sums over states
/// are taken around the realization's own centre mu_r, with d_i = H_ii - mu_r
/// and x_i = 2 (A^2)_ii + d_i^2, so a common shift only needs delta = c - mu_r.
struct RealizationRecord {
    double dim = 0.0;
    // exact estimator: sums of GEC and GEC^2 with per-realization mu, sigma^2
    double sum_g = 0.0;
    double sum_g2 = 0.0;
    // separate-average estimator
    double mu = 0.0;    // Tr H / D
    double tr2 = 0.0;   // Tr (H - mu_r)^2
    double s_x = 0.0;   // sum x_i
    double s_xx = 0.0;  // sum x_i^2
    double s_dd = 0.0;  // sum d_i^2
    double s_xd = 0.0;  // sum x_i d_i
};

/// `g` must be gec_exact(h).
inline RealizationRecord realization_record(const SparseHamiltonian& h, const GecVector& g) {
    RealizationRecord r;
    r.dim = static_cast<double>(h.dim());
    for (double v : g.values) {
        r.sum_g += v;
        r.sum_g2 += v * v;
    }
    r.mu = g.shift;
    r.tr2 = g.width * r.dim;
    const auto& diag = h.diagonal();
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const double d = diag[i] - g.shift, x = g.numerators[i];
        r.s_x += x;
        r.s_xx += x * x;
        r.s_dd += d * d;
        r.s_xd += x * d;
    }
    return r;
}

inline RealizationRecord realization_record(const SparseHamiltonian& h) { return realization_record(h, gec_exact(h)); }

struct MomentPair {
    double mean = 0.0;
    double var = 0.0;
};

/// Pooled per-realization GEC moments.
inline MomentPair exact_moments(std::span<const RealizationRecord> recs) {
    if (recs.empty()) throw DegenerateError("exact_moments: no realizations");
    double g = 0.0, g2 = 0.0;
    for (const auto& r : recs) {
        g += r.sum_g / r.dim;
        g2 += r.sum_g2 / r.dim;
    }
    const double n = static_cast<double>(recs.size());
    const double mean = g / n;
    return {mean, g2 / n - mean * mean};
}

/// Numerator and width averaged separately: shift mu and width sigma^2 are
/// ensemble averages, E[GEC] ~ avg(sum x_i / D) / sigma^2 and
/// E[GEC^2] ~ avg(sum x_i^2 / D) / sigma^4.
inline MomentPair separate_moments(std::span<const RealizationRecord> recs) {
    if (recs.empty()) throw DegenerateError("separate_moments: no realizations");
    const double n = static_cast<double>(recs.size());
    double mu = 0.0;
    for (const auto& r : recs) mu += r.mu;
    mu /= n;
    double width = 0.0, num1 = 0.0, num2 = 0.0;
    for (const auto& r : recs) {
        // x_i(mu) = x_i - 2 delta d_i + delta^2, and sum d_i = 0
        const double D = r.dim, dl = mu - r.mu, dl2 = dl * dl;
        width += (r.tr2 + D * dl2) / D;
        num1 += (r.s_x + D * dl2) / D;
        num2 += (r.s_xx + 4.0 * dl2 * r.s_dd + D * dl2 * dl2 - 4.0 * dl * r.s_xd + 2.0 * dl2 * r.s_x) / D;
    }
    width /= n;
    num1 /= n;
    num2 /= n;
    if (!(width > 0.0)) throw DegenerateError("separate_moments: zero ensemble width");
    const double mean = num1 / width;
    return {mean, num2 / (width * width) - mean * mean};
}

inline MomentPair estimate_moments(std::span<const RealizationRecord> recs, Estimator e) {
    return e == Estimator::Exact ? exact_moments(recs) : separate_moments(recs);
}

struct GecMomentEstimate {
    Estimator estimator = Estimator::Exact;
    double mean = 0.0;
    double var = 0.0;
    double mean_se = 0.0;
    double var_se = 0.0;
    std::size_t n_realizations = 0;
    std::string model;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t kBootstrapResamples = 200;

inline GecMomentEstimate summarize_ensemble(const std::vector<RealizationRecord>& recs, Estimator e,
                                            const std::string& model, std::uint64_t seed,
                                            std::size_t resamples = kBootstrapResamples) {
    GecMomentEstimate out;
    out.estimator = e;
    out.model = model;
    out.seed = seed;
    out.n_realizations = recs.size();
    const auto m = estimate_moments(recs, e);
    out.mean = m.mean;
    out.var = m.var;
    const std::span<const RealizationRecord> span(recs);
    const std::uint64_t bs = splitmix64(seed ^ 0x5eedb007ULL);
    out.mean_se = bootstrap_stderr(
        span, [e](std::span<const RealizationRecord> s) { return estimate_moments(s, e).mean; }, resamples, bs);
    out.var_se = bootstrap_stderr(
        span, [e](std::span<const RealizationRecord> s) { return estimate_moments(s, e).var; }, resamples, bs);
    return out;
}

// ---------------------------------------------------------------- parallel driver

namespace detail {

[[noreturn]] inline void rethrow_with_index(std::exception_ptr p, std::size_t index) {
    const std::string where = "realization " + std::to_string(index) + ": ";
    try {
        std::rethrow_exception(p);
    } catch (const CapacityError& e) {
        throw CapacityError(where + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(where + e.what());
    } catch (const BudgetExceeded& e) {
        throw BudgetExceeded(where + e.what());
    } catch (const DegenerateError& e) {
        throw DegenerateError(where + e.what());
    } catch (const std::exception& e) {
        throw Error(where + e.what());
    }
}

}  // namespace detail

/// Runs task(r) for r in [0, n) on `workers` threads. Results land in slot r,
/// so the output does not depend on scheduling. The lowest failing index seen
/// is rethrown with its index.
template <class Result, class Task>
std::vector<Result> parallel_map(std::size_t n, std::size_t workers, Task&& task) {
    std::vector<Result> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto run = [&] {
        for (std::size_t r; !failed.load() && (r = next.fetch_add(1)) < n;) {
            try {
                out[r] = task(r);
            } catch (...) {
                errors[r] = std::current_exception();
                failed.store(true);
            }
        }
    };
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    for (std::size_t r = 0; r < n; ++r)
        if (errors[r]) detail::rethrow_with_index(errors[r], r);
    return out;
}

/// Realization r draws from RngStream(seed, r) and yields one Hamiltonian per
/// variant (e.g. several gamma values on the same random input). Returns
/// records[variant][realization].
using VariantSampler = std::function<std::vector<SparseHamiltonian>(RngStream&)>;

inline std::vector<std::vector<RealizationRecord>> collect_records(std::size_t n, std::uint64_t seed,
                                                                   std::size_t workers, std::size_t variants,
                                                                   const VariantSampler& sampler) {
    auto per = parallel_map<std::vector<RealizationRecord>>(n, workers, [&](std::size_t r) {
        RngStream rng(seed, r);
        auto hs = sampler(rng);
        if (hs.size() != variants) throw Error("collect_records: sampler returned wrong variant count");
        std::vector<RealizationRecord> recs;
        recs.reserve(hs.size());
        for (const auto& h : hs) recs.push_back(realization_record(h));
        return recs;
    });
    std::vector<std::vector<RealizationRecord>> out(variants, std::vector<RealizationRecord>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t v = 0; v < variants; ++v) out[v][r] = per[r][v];
    return out;
}

// ---------------------------------------------------------------- model specs

enum class ModelKind { Goe, Rpm, Qsm, Tlg };

inline const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Goe: return "goe";
        case ModelKind::Rpm: return "rpm";
        case ModelKind::Qsm: return "qsm";
        case ModelKind::Tlg: return "tlg";
    }
    return "?";
}

inline ModelKind parse_model(const std::string& s) {
    if (s == "goe") return ModelKind::Goe;
    if (s == "rpm") return ModelKind::Rpm;
    if (s == "qsm") return ModelKind::Qsm;
    if (s == "tlg") return ModelKind::Tlg;
    throw ConfigError("unknown model '" + s + "'");
}

struct ModelSpec {
    ModelKind kind = ModelKind::Goe;
    std::size_t goe_dim = 2;
    RpmParams rpm;
    QsmParams qsm;
    TlgParams tlg;

    [[nodiscard]] std::string fingerprint() const {
        std::ostringstream os;
        os << std::setprecision(17) << to_string(kind) << '(';
        switch (kind) {
            case ModelKind::Goe: os << "D=" << goe_dim; break;
            case ModelKind::Rpm: os << "D=" << rpm.dim << ",gamma=" << rpm.gamma; break;
            case ModelKind::Qsm:
                os << "N=" << qsm.grain << ",L=" << qsm.outer << ",alpha=" << qsm.alpha << ",g0=" << qsm.g0
                   << ",h=" << qsm.h << ",W=" << qsm.W << ",zeta=" << qsm.zeta;
                break;
            case ModelKind::Tlg:
                os << "L=" << tlg.L << ",N=" << tlg.N << ",V=" << tlg.V << ",t0=" << tlg.t0 << ",bc=" << to_string(tlg.bc);
                break;
        }
        os << ')';
        return os.str();
    }

    /// Deterministic models ignore the stream.
    [[nodiscard]] SparseHamiltonian sample(RngStream& rng) const {
        switch (kind) {
            case ModelKind::Goe: return SparseHamiltonian(sample_goe(goe_dim, rng));
            case ModelKind::Rpm: return rpm_sample(rpm, rng);
            case ModelKind::Qsm: return qsm_sample(qsm, rng).hamiltonian;
            case ModelKind::Tlg: return tlg_build(tlg);
        }
        throw ConfigError("ModelSpec: unknown kind");
    }
};

struct EnsembleResult {
    std::optional<GecMomentEstimate> exact;
    std::optional<GecMomentEstimate> separate;
    std::vector<RealizationRecord> records;
};

/// Both estimators, when requested together, come from the same realizations.
inline EnsembleResult run_ensemble(const ModelSpec& spec, std::size_t n, std::uint64_t seed,
                                   std::vector<Estimator> estimators, std::size_t workers = 1) {
    if (n < 1) throw ConfigError("run_ensemble: need at least one realization");
    if (estimators.empty()) throw ConfigError("run_ensemble: no estimator requested");
    auto recs = collect_records(n, seed, workers, 1, [&spec](RngStream& rng) {
        std::vector<SparseHamiltonian> v;
        v.push_back(spec.sample(rng));
        return v;
    });
    EnsembleResult out;
    out.records = std::move(recs[0]);
    for (auto e : estimators) {
        auto est = summarize_ensemble(out.records, e, spec.fingerprint(), seed);
        (e == Estimator::Exact ? out.exact : out.separate) = est;
    }
    return out;
}

inline GecMomentEstimate run_ensemble(const ModelSpec& spec, std::size_t n, std::uint64_t seed, Estimator e,
                                      std::size_t workers = 1) {
    auto r = run_ensemble(spec, n, seed, std::vector<Estimator>{e}, workers);
    return e == Estimator::Exact ? *r.exact : *r.separate;
}

// ---------------------------------------------------------------- estimator discrepancy

struct EstimatorDiscrepancy {
    std::vector<double> sizes;
    std::vector<double> dmean;  // |mean_exact - mean_separate|
    std::vector<double> dvar;   // |var_exact - var_separate|
    std::optional<double> loglog_slope;     // d ln|dvar| / d ln size
    std::optional<double> loglinear_slope;  // d ln|dvar| / d size
};

inline EstimatorDiscrepancy discrepancy_from(std::vector<double> sizes,
                                             const std::vector<std::vector<RealizationRecord>>& per_size) {
    if (sizes.size() < 3) throw ConfigError("estimator_discrepancy: need at least 3 sizes");
    EstimatorDiscrepancy d;
    d.sizes = std::move(sizes);
    for (const auto& recs : per_size) {
        const auto a = exact_moments(recs), b = separate_moments(recs);
        d.dmean.push_back(std::abs(a.mean - b.mean));
        d.dvar.push_back(std::abs(a.var - b.var));
    }
    const bool positive = std::all_of(d.dvar.begin(), d.dvar.end(), [](double v) { return v > 0.0; });
    if (positive) {
        std::vector<double> lx, x, ly;
        for (std::size_t i = 0; i < d.sizes.size(); ++i) {
            lx.push_back(std::log(d.sizes[i]));
            x.push_back(d.sizes[i]);
            ly.push_back(std::log(d.dvar[i]));
        }
        d.loglog_slope = fit_line(lx, ly).slope;
        d.loglinear_slope = fit_line(x, ly).slope;
    }
    return d;
}

/// Paired exact vs separate-average comparison along a size ladder;
/// `spec_for(size)` builds the model at each size.
inline EstimatorDiscrepancy estimator_discrepancy(const std::vector<double>& sizes,
                                                  const std::function<ModelSpec(double)>& spec_for, std::size_t n,
                                                  std::uint64_t seed, std::size_t workers = 1) {
    if (sizes.size() < 3) throw ConfigError("estimator_discrepancy: need at least 3 sizes");
    std::vector<std::vector<RealizationRecord>> per;
    for (double s : sizes) per.push_back(run_ensemble(spec_for(s), n, seed, std::vector<Estimator>{Estimator::Exact}, workers).records);
    return discrepancy_from(sizes, per);
}

}  // namespace gec
