#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gec/error.hpp"
#include "gec/numerics/stats.hpp"

namespace gec {

/// A sampled curve (parameter, value) on an ascending parameter grid.
struct Curve {
    double size = 0.0;  // label only
    std::vector<double> params;
    std::vector<double> values;
};

struct CrossingPoint {
    double param_star = 0.0;
    std::pair<double, double> pair;  // sizes compared
    std::string method = "linear-interpolation-of-difference";
};

/// Point where a.values - b.values changes sign. Exactly one sign change is
/// required; otherwise the error message lists the offending intervals.
inline CrossingPoint crossing_point(const Curve& a, const Curve& b) {
    const std::size_t n = a.params.size();
    if (n < 2 || a.values.size() != n || b.params.size() != n || b.values.size() != n)
        throw ConfigError("crossing_point: curves must share a grid of at least two points");
    for (std::size_t i = 0; i < n; ++i) {
        if (a.params[i] != b.params[i]) throw ConfigError("crossing_point: parameter grids differ");
        if (i > 0 && !(a.params[i] > a.params[i - 1])) throw ConfigError("crossing_point: grid not ascending");
    }
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a.values[i] - b.values[i];

    std::vector<double> hits;
    std::ostringstream where;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] == 0.0) {
            hits.push_back(a.params[i]);
            where << " [" << a.params[i] << "]";
            continue;
        }
        if (i + 1 < n && d[i + 1] != 0.0 && (d[i] < 0.0) != (d[i + 1] < 0.0)) {
            const double x0 = a.params[i], x1 = a.params[i + 1];
            hits.push_back(x0 - d[i] * (x1 - x0) / (d[i + 1] - d[i]));
            where << " [" << x0 << ", " << x1 << "]";
        }
    }
    if (hits.empty()) throw DegenerateError("crossing_point: difference never changes sign on the grid");
    if (hits.size() > 1) throw DegenerateError("crossing_point: multiple sign changes in intervals" + where.str());
    return {hits.front(), {a.size, b.size}};
}

struct CrossingExtrapolation {
    double v_inf = 0.0;
    double slope = 0.0;  // c in V*(L) = V_inf + c / L
    double residual = 0.0;
};

/// Least-squares fit V*(L) = V_inf + c/L over (L, V*) points.
inline CrossingExtrapolation extrapolate_crossing(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw ConfigError("extrapolate_crossing: need at least 3 points");
    std::vector<double> x, y;
    for (const auto& [L, v] : points) {
        if (!(L > 0.0)) throw ConfigError("extrapolate_crossing: sizes must be positive");
        x.push_back(1.0 / L);
        y.push_back(v);
    }
    const auto f = fit_line(x, y);
    return {f.intercept, f.slope, f.residual};
}

struct ScalingFit {
    double nu = 0.0;
    double prefactor = 0.0;
    double residual = 0.0;  // rms residual in log space
};

/// Fits deviation = prefactor * size^{-nu} by log-log least squares.
inline ScalingFit fit_scaling_exponent(const std::vector<double>& sizes, const std::vector<double>& deviations) {
    if (sizes.size() != deviations.size()) throw ConfigError("fit_scaling_exponent: length mismatch");
    if (sizes.size() < 3) throw ConfigError("fit_scaling_exponent: need at least 3 sizes");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (!(deviations[i] > 0.0))
            throw ConfigError("fit_scaling_exponent: deviation at size " + std::to_string(sizes[i]) + " is not positive");
        if (!(sizes[i] > 0.0)) throw ConfigError("fit_scaling_exponent: sizes must be positive");
        x.push_back(std::log(sizes[i]));
        y.push_back(std::log(deviations[i]));
    }
    const auto f = fit_line(x, y);
    return {-f.slope, std::exp(f.intercept), f.residual};
}

}  // namespace gec
