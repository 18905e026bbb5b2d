#pragma once

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gec/error.hpp"
#include "gec/fock/basis.hpp"
#include "gec/models/tlg.hpp"

namespace gec {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// coefficient * n_{s1} n_{s2} ... with distinct sorted sites; no sites is
/// the constant monomial.
struct DensityMonomial {
    std::vector<int> sites;
    BigInt coefficient;
};

/// Multilinear polynomial in occupation variables with n^2 = n.
/// Zero coefficients are never stored.
class DensityPolynomial {
public:
    using Terms = std::map<std::vector<int>, BigInt>;

    DensityPolynomial() = default;

    static DensityPolynomial constant(const BigInt& c) {
        DensityPolynomial p;
        p.add({}, c);
        return p;
    }

    /// Adds c * prod_{s in sites} n_s; repeated sites collapse.
    void add(std::vector<int> sites, const BigInt& c) {
        std::sort(sites.begin(), sites.end());
        sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
        if (c == 0) return;
        auto [it, fresh] = terms_.try_emplace(std::move(sites), c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    [[nodiscard]] const Terms& terms() const noexcept { return terms_; }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }
    [[nodiscard]] bool empty() const noexcept { return terms_.empty(); }

    [[nodiscard]] BigInt coefficient(std::vector<int> sites) const {
        std::sort(sites.begin(), sites.end());
        auto it = terms_.find(sites);
        return it == terms_.end() ? BigInt(0) : it->second;
    }

    [[nodiscard]] std::vector<DensityMonomial> monomials() const {
        std::vector<DensityMonomial> out;
        out.reserve(terms_.size());
        for (const auto& [s, c] : terms_) out.push_back({s, c});
        return out;
    }

    /// Value on a 0/1 configuration (site s occupied iff bit s of c is set).
    [[nodiscard]] BigInt evaluate(Config c) const {
        BigInt v = 0;
        for (const auto& [s, coef] : terms_) {
            bool on = true;
            for (int site : s) {
                if (site < 0 || site > 63) throw ConfigError("DensityPolynomial::evaluate: site outside bit range");
                on = on && ((c >> site) & 1U);
            }
            if (on) v += coef;
        }
        return v;
    }

    DensityPolynomial& operator+=(const DensityPolynomial& o) {
        for (const auto& [s, c] : o.terms_) add(s, c);
        return *this;
    }

    friend bool operator==(const DensityPolynomial& a, const DensityPolynomial& b) { return a.terms_ == b.terms_; }

private:
    Terms terms_;
};

/// Product with site-set union (idempotency) and like terms collected.
inline DensityPolynomial poly_mul(const DensityPolynomial& p, const DensityPolynomial& q) {
    DensityPolynomial r;
    for (const auto& [s, a] : p.terms()) {
        for (const auto& [t, b] : q.terms()) {
            std::vector<int> u;
            u.reserve(s.size() + t.size());
            std::set_union(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(u));
            r.add(std::move(u), a * b);
        }
    }
    return r;
}

/// C (n_a + n_b - 2 n_a n_b) with C = 1 - prod_{c in common} n_c.
inline DensityPolynomial bond_polynomial(const Bond& b) {
    if (b.common.empty() || b.common.size() > 2) throw ConfigError("bond_polynomial: |common| must be 1 or 2");
    DensityPolynomial p;
    auto with = [&](std::vector<int> s) {
        s.insert(s.end(), b.common.begin(), b.common.end());
        return s;
    };
    p.add({b.a}, 1);
    p.add({b.b}, 1);
    p.add({b.a, b.b}, -2);
    p.add(with({b.a}), -1);
    p.add(with({b.b}), -1);
    p.add(with({b.a, b.b}), 2);
    return p;
}

enum class Ensemble { Canonical, GrandCanonical };

inline Ensemble parse_ensemble(const std::string& s) {
    if (s == "canonical") return Ensemble::Canonical;
    if (s == "grand-canonical" || s == "grand_canonical" || s == "gc") return Ensemble::GrandCanonical;
    throw ConfigError("unknown ensemble '" + s + "'");
}

inline const char* to_string(Ensemble e) { return e == Ensemble::Canonical ? "canonical" : "grand-canonical"; }

/// Average of a product of p distinct occupation operators: falling
/// factorial ratio (N)_p/(L)_p (canonical) or (N/L)^p (grand canonical).
inline Rational trace_monomial(int p, int L, int N, Ensemble e) {
    if (L < 1 || N < 0 || N > L) throw ConfigError("trace_monomial: need L >= 1 and 0 <= N <= L");
    if (p < 0 || p > L) throw ConfigError("trace_monomial: need 0 <= p <= L");
    if (e == Ensemble::GrandCanonical) {
        Rational r = 1;
        const Rational n(N, L);
        for (int i = 0; i < p; ++i) r *= n;
        return r;
    }
    if (p > N) return 0;
    BigInt num = 1, den = 1;
    for (int t = 0; t < p; ++t) {
        num *= N - t;
        den *= L - t;
    }
    return Rational(num, den);
}

/// Average of a polynomial over sites in [0, L).
inline Rational poly_expectation(const DensityPolynomial& poly, int L, int N, Ensemble e) {
    Rational r = 0;
    for (const auto& [s, c] : poly.terms()) r += Rational(c) * trace_monomial(static_cast<int>(s.size()), L, N, e);
    return r;
}

}  // namespace gec
