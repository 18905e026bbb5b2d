#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "gec/error.hpp"
#include "gec/numerics/rng.hpp"

namespace gec {

struct SummaryStats {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double stderr_mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

inline SummaryStats summarize(std::span<const double> values) {
    if (values.empty()) throw DegenerateError("summarize: empty input");
    SummaryStats s;
    s.count = values.size();
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    // Welford
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (double v : values) {
        ++k;
        const double delta = v - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (v - mean);
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = mean;
    s.variance = s.count > 1 ? std::max(0.0, m2 / static_cast<double>(s.count - 1)) : 0.0;
    s.stderr_mean = std::sqrt(s.variance / static_cast<double>(s.count));
    return s;
}

enum class Binning { Uniform, Log };

/// Probability-density histogram: sum(density * width) == 1 over the covered range.
struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
    std::vector<double> density;
    std::size_t outside = 0;  // samples not covered by [edges.front(), edges.back()]
};

inline std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
    if (bins == 0) throw ConfigError("histogram: bin count must be positive");
    if (!(hi > lo)) hi = lo + 1.0;  // single-valued data: one unit-wide range
    std::vector<double> e(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) e[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
    e.back() = hi;
    return e;
}

inline std::vector<double> log_edges(double lo, double hi, std::size_t bins) {
    if (!(lo > 0.0)) throw ConfigError("histogram: log binning needs a positive lower edge");
    if (!(hi > lo)) hi = lo * 10.0;
    std::vector<double> e(bins + 1);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t k = 0; k <= bins; ++k) e[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(bins));
    e.front() = lo;
    e.back() = hi;
    return e;
}

inline Histogram histogram(std::span<const double> values, std::vector<double> edges) {
    if (edges.size() < 2) throw ConfigError("histogram: need at least two edges");
    if (!std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw ConfigError("histogram: edges must be strictly increasing");
    Histogram h;
    h.edges = std::move(edges);
    const std::size_t nb = h.edges.size() - 1;
    h.counts.assign(nb, 0);
    std::size_t inside = 0;
    for (double v : values) {
        if (v < h.edges.front() || v > h.edges.back() || std::isnan(v)) {
            ++h.outside;
            continue;
        }
        auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
        std::size_t b = static_cast<std::size_t>(it - h.edges.begin());
        b = b == 0 ? 0 : std::min(b - 1, nb - 1);  // right edge closes the last bin
        ++h.counts[b];
        ++inside;
    }
    h.density.assign(nb, 0.0);
    if (inside > 0)
        for (std::size_t b = 0; b < nb; ++b)
            h.density[b] = static_cast<double>(h.counts[b]) /
                           (static_cast<double>(inside) * (h.edges[b + 1] - h.edges[b]));
    return h;
}

/// Default binning: 64 uniform bins over the data range (or log-spaced on request).
inline Histogram histogram(std::span<const double> values, Binning mode = Binning::Uniform, std::size_t bins = 64) {
    if (values.empty()) throw DegenerateError("histogram: empty input");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    if (mode == Binning::Log) {
        double lo = std::numeric_limits<double>::infinity();
        for (double v : values)
            if (v > 0.0) lo = std::min(lo, v);
        if (!std::isfinite(lo)) throw DegenerateError("histogram: no positive values for log binning");
        return histogram(values, log_edges(lo, *mx, bins));
    }
    return histogram(values, uniform_edges(*mn, *mx, bins));
}

/// Nonparametric bootstrap standard error of a statistic computed from
/// per-unit records (units resampled with replacement).
template <class Record, class Statistic>
double bootstrap_stderr(std::span<const Record> units, Statistic&& stat, std::size_t resamples, std::uint64_t seed) {
    if (units.size() < 2 || resamples < 2) return 0.0;
    RngStream rng(seed, 0xb0075742ULL);
    std::vector<Record> sample(units.size());
    std::vector<double> values;
    values.reserve(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
        for (auto& s : sample) s = units[rng.index(units.size())];
        values.push_back(stat(std::span<const Record>(sample)));
    }
    return std::sqrt(summarize(values).variance);
}

/// Ordinary least squares y = a + b x.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double residual = 0.0;  // root-mean-square residual
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit_line: need at least two paired points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DegenerateError("fit_line: all abscissae equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

}  // namespace gec
