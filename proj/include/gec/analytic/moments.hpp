#pragma once

#include <cmath>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "gec/error.hpp"
#include "gec/models/qsm.hpp"

namespace gec {

/// Size argument for closed forms: a finite D (or L), or the thermodynamic limit.
struct SystemSize {
    std::optional<double> value;

    static SystemSize finite(double v) { return {v}; }
    static SystemSize limit() { return {std::nullopt}; }
    [[nodiscard]] bool is_limit() const noexcept { return !value.has_value(); }
    [[nodiscard]] std::string str() const;
};

inline std::string SystemSize::str() const {
    if (is_limit()) return "inf";
    std::ostringstream os;
    os << std::setprecision(17) << *value;
    return os.str();
}

struct AnalyticMoments {
    double mean = 0.0;
    double variance = 0.0;
    SystemSize size;
    std::string branch;  // "finite", or the limit branch taken
};

// ---------------------------------------------------------------- GOE

inline AnalyticMoments goe_gec_moments(SystemSize D) {
    if (D.is_limit()) return {2.0, 0.0, D, "limit"};
    const double d = *D.value;
    if (!(d >= 1.0)) throw ConfigError("goe_gec_moments: D must be >= 1");
    return {2.0 - 2.0 / (d + 1.0), 8.0 * d / ((d + 1.0) * (d + 1.0)), D, "finite"};
}

struct ExactGoeMoments {
    boost::multiprecision::cpp_rational mean;
    boost::multiprecision::cpp_rational variance;
};

inline ExactGoeMoments goe_gec_moments_exact(unsigned long long D) {
    using boost::multiprecision::cpp_rational;
    if (D < 1) throw ConfigError("goe_gec_moments_exact: D must be >= 1");
    const cpp_rational d(D);
    return {2 - cpp_rational(2) / (d + 1), 8 * d / ((d + 1) * (d + 1))};
}

// ---------------------------------------------------------------- RPM

/// Moments E[eps^2], E[eps^4] of the diagonal distribution.
struct EpsMoments {
    double m2 = 1.0;
    double m4 = 3.0;

    void validate() const {
        if (!(m2 > 0.0)) throw ConfigError("EpsMoments: m2 must be > 0");
        if (!(m4 >= m2 * m2)) throw ConfigError("EpsMoments: m4 must be >= m2^2");
    }
};

namespace detail {

inline double dpow(double D, double x) { return std::exp(x * std::log(D)); }

inline void check_gamma(double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("rpm: gamma must be finite and >= 0");
}

inline double rpm_dim(SystemSize D) {
    const double d = *D.value;
    if (!(d >= 1.0)) throw ConfigError("rpm: D must be >= 1");
    return d;
}

}  // namespace detail

/// (E2 + 2 D^{1-g}) / (E2 + D^{1-g} + D^{-g}).
inline double rpm_gec_mean(SystemSize D, double gamma, EpsMoments eps = {}) {
    detail::check_gamma(gamma);
    eps.validate();
    if (D.is_limit()) {
        if (gamma < 1.0) return 2.0;
        if (gamma > 1.0) return 1.0;
        return (eps.m2 + 2.0) / (eps.m2 + 1.0);
    }
    const double d = detail::rpm_dim(D);
    const double a = detail::dpow(d, 1.0 - gamma);
    const double b = detail::dpow(d, -gamma);
    return (eps.m2 + 2.0 * a) / (eps.m2 + a + b);
}

/// (E4 - E2^2 + 8 D^{-g} E2 + 8 D^{1-2g}) / (E2 + D^{1-g} + D^{-g})^2.
inline double rpm_gec_var(SystemSize D, double gamma, EpsMoments eps = {}) {
    detail::check_gamma(gamma);
    eps.validate();
    const double spread = eps.m4 - eps.m2 * eps.m2;
    if (D.is_limit()) {
        if (gamma < 1.0) return 0.0;
        if (gamma > 1.0) return spread / (eps.m2 * eps.m2);
        return spread / ((eps.m2 + 1.0) * (eps.m2 + 1.0));
    }
    const double d = detail::rpm_dim(D);
    const double a = detail::dpow(d, 1.0 - gamma);
    const double b = detail::dpow(d, -gamma);
    const double c = detail::dpow(d, 1.0 - 2.0 * gamma);
    const double den = eps.m2 + a + b;
    return (spread + 8.0 * b * eps.m2 + 8.0 * c) / (den * den);
}

inline AnalyticMoments rpm_gec_moments(SystemSize D, double gamma, EpsMoments eps = {}) {
    std::string branch = "finite";
    if (D.is_limit()) branch = gamma < 1.0 ? "ergodic" : gamma > 1.0 ? "nonergodic" : "critical";
    return {rpm_gec_mean(D, gamma, eps), rpm_gec_var(D, gamma, eps), D, branch};
}

/// Expected width (1/D) E[Tr H^2] of the RPM.
inline double rpm_width(double D, double gamma, EpsMoments eps = {}) {
    return eps.m2 + detail::dpow(D, 1.0 - gamma) + detail::dpow(D, -gamma);
}

// ---------------------------------------------------------------- QSM

/// sinh(k_zeta ln alpha) / (k_zeta ln alpha), equal to 1 at zero argument.
inline double sinhc_F(double k_zeta, double alpha) {
    if (!(alpha > 0.0)) throw ConfigError("sinhc_F: alpha must be > 0");
    const double x = k_zeta * std::log(alpha);
    if (x == 0.0) return 1.0;
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sinh(x) / x;
}

/// (1 - alpha^{2L}) / (1 - alpha^2), equal to L at alpha = 1.
inline double qsm_geometric_sum(double alpha, double L) {
    if (alpha == 1.0) return L;
    const double a2 = alpha * alpha;
    return -std::expm1(L * std::log(a2)) / (1.0 - a2);
}

struct QsmAnalyticTerms {
    double F2 = 1.0;
    double F4 = 1.0;
    double geometric_sum = 0.0;
};

inline QsmAnalyticTerms qsm_terms(const QsmParams& p, double L) {
    return {sinhc_F(2.0 * p.zeta, p.alpha), sinhc_F(4.0 * p.zeta, p.alpha), qsm_geometric_sum(p.alpha, L)};
}

enum class QsmMeanMode { ExactF, SmallZeta };

namespace detail {

inline void check_qsm(const QsmParams& p) {
    if (p.grain < 1) throw ConfigError("qsm: grain size N must be >= 1");
    if (!(p.alpha > 0.0)) throw ConfigError("qsm: alpha must be > 0");
    if (!(p.zeta >= 0.0)) throw ConfigError("qsm: zeta must be >= 0");
}

inline double qsm_field_q(const QsmParams& p) { return p.h * p.h + p.W * p.W / 3.0; }

inline double qsm_L(SystemSize L) {
    const double l = *L.value;
    if (!(l >= 0.0)) throw ConfigError("qsm: L must be >= 0");
    return l;
}

/// sum_l E[alpha^{2 u_l}] with u_1 = 0.
inline double qsm_coupling_sum(const QsmParams& p, double L, QsmMeanMode mode) {
    if (L == 0.0) return 0.0;
    const auto t = qsm_terms(p, L);
    return mode == QsmMeanMode::SmallZeta ? t.geometric_sum : 1.0 + t.F2 * (t.geometric_sum - 1.0);
}

}  // namespace detail

/// Expected width (1/D) E[Tr H^2] = 1 + (g0^2/16) sum_l E[alpha^{2u_l}] + (L/4)(h^2 + W^2/3).
inline double qsm_width(const QsmParams& p, double L, QsmMeanMode mode = QsmMeanMode::ExactF) {
    detail::check_qsm(p);
    return 1.0 + p.g0 * p.g0 / 16.0 * detail::qsm_coupling_sum(p, L, mode) + L / 4.0 * detail::qsm_field_q(p);
}

inline double qsm_gec_mean(const QsmParams& p, SystemSize L, QsmMeanMode mode = QsmMeanMode::ExactF) {
    detail::check_qsm(p);
    const double q = detail::qsm_field_q(p);
    if (L.is_limit()) {
        if (p.alpha > 1.0) return 2.0;
        if (p.alpha < 1.0) return 1.0;
        const double g2 = p.g0 * p.g0;
        return 1.0 + g2 / (g2 + 4.0 * q);
    }
    const double l = detail::qsm_L(L);
    const double Dg = std::ldexp(1.0, p.grain);
    const double c = detail::qsm_coupling_sum(p, l, mode);
    const double g2 = p.g0 * p.g0;
    const double num = 2.0 * Dg / (Dg + 1.0) + g2 / 8.0 * c + l / 4.0 * q;
    const double den = 1.0 + g2 / 16.0 * c + l / 4.0 * q;
    return num / den;
}

/// Numerator of the small-zeta variance; independent of alpha.
inline double qsm_var_numerator(const QsmParams& p, double L) {
    detail::check_qsm(p);
    const double q = detail::qsm_field_q(p);
    const double Dg = std::ldexp(1.0, p.grain);
    const double h2 = p.h * p.h, w2 = p.W * p.W;
    return 8.0 * Dg / ((Dg + 1.0) * (Dg + 1.0)) + L / 16.0 * (h2 * h2 + 2.0 * h2 * w2 + w2 * w2 / 5.0) +
           (2.0 * L * L - 3.0 * L) / 16.0 * q * q + 2.0 * L / (Dg + 1.0) * q;
}

/// Squared small-zeta width.
inline double qsm_var_denominator(const QsmParams& p, double L) {
    const double w = qsm_width(p, L, QsmMeanMode::SmallZeta);
    return w * w;
}

inline double qsm_gec_var(const QsmParams& p, SystemSize L) {
    detail::check_qsm(p);
    if (L.is_limit()) {
        if (p.alpha > 1.0) return 0.0;
        if (p.alpha < 1.0) return 2.0;
        const double q = detail::qsm_field_q(p);
        const double g2 = p.g0 * p.g0;
        return 32.0 * q * q / ((g2 + 4.0 * q) * (g2 + 4.0 * q));
    }
    const double l = detail::qsm_L(L);
    return qsm_var_numerator(p, l) / qsm_var_denominator(p, l);
}

inline AnalyticMoments qsm_gec_moments(const QsmParams& p, SystemSize L, QsmMeanMode mode = QsmMeanMode::ExactF) {
    std::string branch = "finite";
    if (L.is_limit()) branch = p.alpha > 1.0 ? "ergodic" : p.alpha < 1.0 ? "nonergodic" : "critical";
    return {qsm_gec_mean(p, L, mode), qsm_gec_var(p, L), L, branch};
}

}  // namespace gec
