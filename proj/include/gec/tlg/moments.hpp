#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gec/error.hpp"
#include "gec/fock/basis.hpp"
#include "gec/models/tlg.hpp"
#include "gec/tlg/polynomial.hpp"

namespace gec {

/// Exact E[(H_d)^k], k = 1..kmax, where H_d counts active bonds (V = 1).
struct MomentSet {
    int L = 0;
    int N = 0;
    Ensemble ensemble = Ensemble::Canonical;
    std::vector<Rational> moments;  // moments[k-1] = E[(H_d)^k]

    [[nodiscard]] const Rational& operator[](int k) const { return moments.at(static_cast<std::size_t>(k - 1)); }
};

namespace detail {

inline constexpr int kMaxMomentOrder = 4;
// A product of four local terms touches at most 16 sites.
inline constexpr int kQDegree = 16;

/// Polynomial in the Bernoulli density q: entry p is the summed coefficient
/// of all p-site monomials.
using QPoly = std::array<std::int64_t, kQDegree + 1>;
using BigQPoly = std::vector<BigInt>;

inline QPoly qpoly_mul(const QPoly& a, const QPoly& b) {
    QPoly r{};
    for (int i = 0; i <= kQDegree; ++i) {
        if (a[static_cast<std::size_t>(i)] == 0) continue;
        for (int j = 0; i + j <= kQDegree; ++j)
            r[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    }
    return r;
}

inline BigQPoly big_mul(const BigQPoly& a, const BigQPoly& b) {
    BigQPoly r(a.size() + b.size() - 1, BigInt(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

inline BigQPoly big_add(BigQPoly a, const BigQPoly& b, long scale = 1) {
    if (a.size() < b.size()) a.resize(b.size(), BigInt(0));
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += scale * b[i];
    return a;
}

/// Multilinear polynomial with site sets as bit masks.
using MaskPoly = std::vector<std::pair<std::uint64_t, std::int64_t>>;

inline MaskPoly mask_mul(const MaskPoly& a, const MaskPoly& b) {
    std::unordered_map<std::uint64_t, std::int64_t> acc;
    acc.reserve(a.size() * b.size());
    for (const auto& [s, x] : a)
        for (const auto& [t, y] : b) acc[s | t] += x * y;
    MaskPoly r;
    r.reserve(acc.size());
    for (const auto& [m, c] : acc)
        if (c != 0) r.emplace_back(m, c);
    return r;
}

/// Set partitions of {0..m-1}, each block listed by element.
inline std::vector<std::vector<std::vector<int>>> set_partitions(int m) {
    std::vector<std::vector<std::vector<int>>> out{{}};
    for (int e = 0; e < m; ++e) {
        std::vector<std::vector<std::vector<int>>> next;
        for (const auto& p : out) {
            for (std::size_t b = 0; b < p.size(); ++b) {
                auto q = p;
                q[b].push_back(e);
                next.push_back(std::move(q));
            }
            auto q = p;
            q.push_back({e});
            next.push_back(std::move(q));
        }
        out = std::move(next);
    }
    return out;
}

inline std::int64_t factorial(int n) {
    std::int64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace detail

/// Exact moments of the TLG interaction diagonal on the periodic ladder.
///
/// Writes H_d = sum_x h_x with h_x the two bonds (x, x+1) and (x, x+2). Under
/// the Bernoulli(q) product measure every monomial of p distinct sites has
/// mean q^p, so E[H_d^k] is a polynomial in q whose p-th coefficient is the
/// summed coefficient of p-site monomials. Substituting (N)_p/(L)_p for q^p
/// turns it into the canonical average, n^p the grand-canonical one.
///
/// The polynomial is assembled from joint cumulants of the local terms:
/// kappa_m = L * sum over offsets of kappa(h_0, h_o2, ..., h_om). Terms with
/// disjoint supports are independent under the product measure, so only
/// offsets within 3(m-1) of the anchor contribute once the ring is large
/// enough; this per-site sum does not depend on L and is cached. Small rings
/// sum over all offsets modulo L.
class TlgMomentEngine {
public:
    /// The budget covers all work done by this engine from construction on.
    explicit TlgMomentEngine(std::optional<double> budget_seconds = std::nullopt)
        : budget_(budget_seconds), start_(std::chrono::steady_clock::now()) {}

    /// Coefficients C[p] of E[H_d^k] as a polynomial in q.
    std::vector<BigInt> moment_coefficients(int k, int L, int anchor = 0) {
        check_args(k, L);
        std::array<detail::BigQPoly, detail::kMaxMomentOrder> kappa;
        for (int m = 1; m <= k; ++m) kappa[static_cast<std::size_t>(m - 1)] = cumulant(m, L, anchor);
        const auto& k1 = kappa[0];
        detail::BigQPoly r;
        using detail::big_add;
        using detail::big_mul;
        switch (k) {
            case 1: r = k1; break;
            case 2: r = big_add(kappa[1], big_mul(k1, k1)); break;
            case 3:
                r = big_add(big_add(kappa[2], big_mul(kappa[1], k1), 3), big_mul(big_mul(k1, k1), k1));
                break;
            default: {
                const auto k11 = big_mul(k1, k1);
                r = big_add(kappa[3], big_mul(kappa[2], k1), 4);
                r = big_add(r, big_mul(kappa[1], kappa[1]), 3);
                r = big_add(r, big_mul(kappa[1], k11), 6);
                r = big_add(r, big_mul(k11, k11));
            }
        }
        while (r.size() > 1 && r.back() == 0) r.pop_back();
        return r;
    }

    Rational hd_moment(int k, int L, int N, Ensemble e = Ensemble::Canonical, int anchor = 0) {
        if (N < 0 || N > L) throw ConfigError("hd_moment: need 0 <= N <= L");
        const auto c = moment_coefficients(k, L, anchor);
        Rational r = 0;
        for (std::size_t p = 0; p < c.size(); ++p) {
            if (c[p] == 0) continue;
            if (static_cast<int>(p) > L) throw Error("hd_moment: monomial with more sites than the ring");
            r += Rational(c[p]) * trace_monomial(static_cast<int>(p), L, N, e);
        }
        return r;
    }

    MomentSet moments(int L, int N, Ensemble e = Ensemble::Canonical, int kmax = 4) {
        MomentSet s{L, N, e, {}};
        for (int k = 1; k <= kmax; ++k) s.moments.push_back(hd_moment(k, L, N, e));
        return s;
    }

    /// Whether kappa_m at ring size L uses the L-independent offset window.
    static bool windowed(int m, int L) { return L >= 2 * reach(m) + 8; }

private:
    static int reach(int m) { return 3 * (m - 1); }

    static void check_args(int k, int L) {
        if (k < 1 || k > detail::kMaxMomentOrder) throw ConfigError("hd_moment: k must be in 1..4");
        if (L < 6 || L % 2 != 0) throw ConfigError("hd_moment: periodic ladder needs even L >= 6");
    }

    /// kappa_m(q) at ring size L as exact integer coefficients.
    detail::BigQPoly cumulant(int m, int L, int anchor) {
        detail::QPoly density{};
        if (windowed(m, L)) {
            auto& cached = window_[static_cast<std::size_t>(m - 1)];
            if (!cached) cached = offset_sum(m, L, anchor, true);
            density = *cached;
        } else {
            if (L != ring_cache_L_) {
                ring_cache_.clear();
                ring_cache_L_ = L;
            }
            density = offset_sum(m, L, anchor, false);
        }
        detail::BigQPoly out(detail::kQDegree + 1);
        for (std::size_t p = 0; p < out.size(); ++p) out[p] = BigInt(density[p]) * L;
        return out;
    }

    /// sum over offsets (o2..om) of kappa(h_a, h_{a+o2}, ..., h_{a+om}).
    detail::QPoly offset_sum(int m, int L, int anchor, bool window) {
        const int lo = window ? -reach(m) : 0;
        const int hi = window ? reach(m) : L - 1;
        const int span = hi - lo + 1;
        std::int64_t total = 1;
        for (int i = 1; i < m; ++i) total *= span;
        const auto parts = detail::set_partitions(m);

        detail::QPoly sum{};
        std::vector<int> offs(static_cast<std::size_t>(m - 1), lo);
        std::vector<int> pos(static_cast<std::size_t>(m));
        for (std::int64_t t = 0; t < total; ++t) {
            if (budget_ && (t & 255) == 0) {
                const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
                if (el.count() > *budget_)
                    throw BudgetExceeded("hd_moment: budget exhausted at order " + std::to_string(m) + " after " +
                                         std::to_string(t) + " of " + std::to_string(total) + " offset tuples");
            }
            pos[0] = window ? 0 : anchor % L;
            for (int i = 1; i < m; ++i) {
                const int p = anchor + offs[static_cast<std::size_t>(i - 1)];
                pos[static_cast<std::size_t>(i)] = window ? p - anchor : ((p % L) + L) % L;
            }
            const auto c = joint_cumulant(pos, parts, L, window);
            for (std::size_t p = 0; p < sum.size(); ++p) sum[p] += c[p];
            for (std::size_t i = 0; i < offs.size(); ++i) {
                if (++offs[i] <= hi) break;
                offs[i] = lo;
            }
        }
        return sum;
    }

    detail::QPoly joint_cumulant(const std::vector<int>& pos, const std::vector<std::vector<std::vector<int>>>& parts,
                                 int L, bool window) {
        detail::QPoly tot{};
        for (const auto& part : parts) {
            const int k = static_cast<int>(part.size());
            const std::int64_t coef = ((k - 1) % 2 == 0 ? 1 : -1) * detail::factorial(k - 1);
            detail::QPoly prod{};
            prod[0] = 1;
            for (const auto& block : part) {
                std::vector<int> sites;
                for (int j : block) sites.push_back(pos[static_cast<std::size_t>(j)]);
                prod = detail::qpoly_mul(prod, block_moment(std::move(sites), L, window));
            }
            for (std::size_t p = 0; p < tot.size(); ++p) tot[p] += coef * prod[p];
        }
        return tot;
    }

    /// E[prod_x h_x] as a q-polynomial.
    const detail::QPoly& block_moment(std::vector<int> sites, int L, bool window) {
        std::sort(sites.begin(), sites.end());
        if (window) {
            const int base = sites.front();
            for (auto& s : sites) s -= base;
        }
        auto& cache = window ? window_cache_ : ring_cache_;
        auto it = cache.find(sites);
        if (it != cache.end()) return it->second;
        detail::MaskPoly p{{0, 1}};
        for (int x : sites) p = detail::mask_mul(p, local_term(x, L, window));
        detail::QPoly q{};
        for (const auto& [mask, c] : p) q[static_cast<std::size_t>(std::popcount(mask))] += c;
        return cache.emplace(std::move(sites), q).first->second;
    }

    /// h_x as a mask polynomial, built from the two bond polynomials.
    static detail::MaskPoly local_term(int x, int L, bool window) {
        // window coordinates start at -1; shift keeps bits non-negative
        constexpr int kShift = 4;
        auto site = [&](int s) { return window ? s : ((s % L) + L) % L; };
        Bond diag{site(x), site(x + 1), {site(x - 1), site(x + 2)}};
        Bond leg{site(x), site(x + 2), {site(x + 1)}};
        auto poly = bond_polynomial(diag);
        poly += bond_polynomial(leg);
        detail::MaskPoly out;
        for (const auto& [s, c] : poly.terms()) {
            std::uint64_t m = 0;
            for (int v : s) {
                const int bit = window ? v + kShift : v;
                if (bit < 0 || bit > 63) throw Error("hd_moment: site outside mask range");
                m |= std::uint64_t{1} << bit;
            }
            out.emplace_back(m, static_cast<std::int64_t>(c));
        }
        return out;
    }

    std::optional<double> budget_;
    std::chrono::steady_clock::time_point start_;
    std::array<std::optional<detail::QPoly>, detail::kMaxMomentOrder> window_;
    std::map<std::vector<int>, detail::QPoly> window_cache_;
    std::map<std::vector<int>, detail::QPoly> ring_cache_;
    int ring_cache_L_ = -1;
};

inline Rational hd_moment(int k, int L, int N, Ensemble e = Ensemble::Canonical) {
    return TlgMomentEngine().hd_moment(k, L, N, e);
}

// ---------------------------------------------------------------- oracle

namespace detail {

/// sum over configurations with `popcount` particles of (H_d)^k, k = 1..4.
inline std::array<std::array<BigInt, 4>, 64> hd_power_sums_by_filling(int L, bool all_fillings, int N) {
    const auto masks = bond_masks(tlg_bonds(L, Boundary::Periodic));
    std::array<std::array<BigInt, 4>, 64> out{};
    std::vector<std::array<std::uint64_t, 4>> acc(static_cast<std::size_t>(L + 1), {0, 0, 0, 0});
    auto visit = [&](Config c) {
        std::uint64_t h = 0;
        for (const auto& m : masks) h += bond_active(m, c) ? 1 : 0;
        auto& a = acc[static_cast<std::size_t>(std::popcount(c))];
        std::uint64_t p = h;
        for (int k = 0; k < 4; ++k, p *= h) a[static_cast<std::size_t>(k)] += p;
    };
    if (all_fillings) {
        for (Config c = 0; c < (Config{1} << L); ++c) visit(c);
    } else if (N == 0) {
        visit(0);
    } else {
        Config c = (Config{1} << N) - 1;
        const Config limit = Config{1} << L;
        while (c < limit) {
            visit(c);
            const Config u = c & (~c + 1);
            const Config v = c + u;
            c = v + (((v ^ c) / u) >> 2);
        }
    }
    for (int n = 0; n <= L; ++n)
        for (int k = 0; k < 4; ++k)
            out[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] =
                acc[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
    return out;
}

}  // namespace detail

inline constexpr std::uint64_t kOracleMaxConfigs = 10'000'000;

/// Brute-force E[(H_d)^k], k = 1..4, by enumerating configurations and
/// counting active bonds directly.
inline MomentSet hd_moments_oracle(int L, int N, Ensemble e = Ensemble::Canonical) {
    TlgParams{L, N, 0.0, 1.0, Boundary::Periodic}.validate();
    MomentSet s{L, N, e, {}};
    if (e == Ensemble::Canonical) {
        const std::uint64_t count = binomial(L, N);
        if (count > kOracleMaxConfigs) throw CapacityError("hd_moment_oracle: binomial(L, N) exceeds 1e7");
        const auto sums = detail::hd_power_sums_by_filling(L, false, N);
        for (int k = 0; k < 4; ++k)
            s.moments.push_back(Rational(sums[static_cast<std::size_t>(N)][static_cast<std::size_t>(k)], BigInt(count)));
        return s;
    }
    if (L > 26) throw CapacityError("hd_moment_oracle: grand-canonical enumeration limited to L <= 26");
    const auto sums = detail::hd_power_sums_by_filling(L, true, N);
    const Rational n(N, L);
    for (int k = 0; k < 4; ++k) {
        Rational r = 0;
        for (int c = 0; c <= L; ++c) {
            Rational w = 1;
            for (int i = 0; i < c; ++i) w *= n;
            for (int i = c; i < L; ++i) w *= 1 - n;
            r += w * Rational(sums[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)]);
        }
        s.moments.push_back(r);
    }
    return s;
}

inline Rational hd_moment_oracle(int k, int L, int N, Ensemble e = Ensemble::Canonical) {
    if (k < 1 || k > 4) throw ConfigError("hd_moment_oracle: k must be in 1..4");
    return hd_moments_oracle(L, N, e)[k];
}

// ---------------------------------------------------------------- GEC

/// Exact GEC mean and variance over the sector, from the H_d moments.
struct TlgGecMoments {
    Rational mean;
    Rational variance;

    [[nodiscard]] double mean_value() const { return mean.convert_to<double>(); }
    [[nodiscard]] double variance_value() const { return variance.convert_to<double>(); }
};

namespace detail {

/// Exact rational value of a finite double.
inline Rational exact_rational(double x) {
    if (!std::isfinite(x)) throw ConfigError("tlg: parameters must be finite");
    int exp = 0;
    const double frac = std::frexp(x, &exp);
    const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
    Rational r(mant);
    exp -= 53;
    const BigInt two_pow = BigInt(1) << std::abs(exp);
    return exp >= 0 ? r * Rational(two_pow) : r / Rational(two_pow);
}

}  // namespace detail

/// mean = (2 t^2 E1 + V^2 (E2 - E1^2)) / (t^2 E1 + V^2 (E2 - E1^2)),
/// second moment from the fourth-order expression, variance = second - mean^2.
inline TlgGecMoments tlg_gec_moments(const MomentSet& m, double V, double t0) {
    if (m.moments.size() < 4) throw ConfigError("tlg_gec_moments: need moments up to k = 4");
    const Rational v2 = detail::exact_rational(V) * detail::exact_rational(V);
    const Rational t2 = detail::exact_rational(t0) * detail::exact_rational(t0);
    const Rational &e1 = m[1], &e2 = m[2], &e3 = m[3], &e4 = m[4];
    const Rational spread = e2 - e1 * e1;
    const Rational den = t2 * e1 + v2 * spread;
    if (den == 0) throw DegenerateError("tlg_gec: zero spectral width (N = 0, N = L, or t0 = V = 0)");
    TlgGecMoments g;
    g.mean = (2 * t2 * e1 + v2 * spread) / den;
    const Rational e1_2 = e1 * e1;
    const Rational second = (4 * t2 * t2 * e2 + v2 * v2 * (e4 - 3 * e1_2 * e1_2 + 6 * e2 * e1_2 - 4 * e3 * e1) +
                             4 * t2 * v2 * (e3 + e1_2 * e1 - 2 * e1 * e2)) /
                            (den * den);
    g.variance = second - g.mean * g.mean;
    return g;
}

inline TlgGecMoments tlg_gec_moments(int L, int N, double V, double t0 = 1.0, Ensemble e = Ensemble::Canonical) {
    return tlg_gec_moments(TlgMomentEngine().moments(L, N, e), V, t0);
}

inline double tlg_gec_mean(int L, int N, double V, double t0 = 1.0, Ensemble e = Ensemble::Canonical) {
    return tlg_gec_moments(L, N, V, t0, e).mean_value();
}

inline double tlg_gec_var(int L, int N, double V, double t0 = 1.0, Ensemble e = Ensemble::Canonical) {
    return tlg_gec_moments(L, N, V, t0, e).variance_value();
}

}  // namespace gec
