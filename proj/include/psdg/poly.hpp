#pragma once

// Dense univariate polynomials over a field scalar S (exact or floating).
// Coefficients are stored in ascending order of degree and kept normalized:
// trailing zero coefficients are stripped, the zero polynomial has an empty
// coefficient vector and degree kNegInfDegree (standing in for minus
// infinity).

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "psdg/scalars.hpp"

namespace psdg {

inline constexpr int kNegInfDegree = std::numeric_limits<int>::min();

template <class S>
class Poly {
public:
    using scalar_type = S;
    using field = scalar_field<S>;

    Poly() = default;
    explicit Poly(std::vector<S> coeffs) : c_(std::move(coeffs)) { normalize(); }
    static Poly constant(const S& v) { return Poly(std::vector<S>{v}); }
    static Poly x() { return Poly(std::vector<S>{field::zero(), field::one()}); }
    // x^k with coefficient c.
    static Poly monomial(const S& c, int k) {
        if (k < 0) throw std::invalid_argument("Poly::monomial: negative exponent");
        std::vector<S> v(static_cast<size_t>(k) + 1, field::zero());
        v.back() = c;
        return Poly(std::move(v));
    }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return c_.empty() ? kNegInfDegree : static_cast<int>(c_.size()) - 1; }

    // Coefficient of x^k (zero outside the stored range).
    S coeff(int k) const {
        if (k < 0 || static_cast<size_t>(k) >= c_.size()) return field::zero();
        return c_[static_cast<size_t>(k)];
    }
    const std::vector<S>& coeffs() const { return c_; }

    S leading() const {
        if (c_.empty()) throw std::invalid_argument("Poly::leading: zero polynomial");
        return c_.back();
    }

    Poly operator-() const {
        Poly r = *this;
        for (S& v : r.c_) v = -v;
        return r;
    }

    Poly& operator+=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), field::zero());
        for (size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        normalize();
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), field::zero());
        for (size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        normalize();
        return *this;
    }
    Poly& operator*=(const Poly& o) { *this = *this * o; return *this; }
    Poly& operator*=(const S& s) {
        for (S& v : c_) v *= s;
        normalize();
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { a += b; return a; }
    friend Poly operator-(Poly a, const Poly& b) { a -= b; return a; }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<S> r(a.c_.size() + b.c_.size() - 1, field::zero());
        for (size_t i = 0; i < a.c_.size(); ++i) {
            if (field::is_zero(a.c_[i])) continue;
            for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        }
        return Poly(std::move(r));
    }
    friend Poly operator*(Poly a, const S& s) { a *= s; return a; }
    friend Poly operator*(const S& s, Poly a) { a *= s; return a; }
    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    S eval(const S& x) const {
        S acc = field::zero();
        for (size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
        return acc;
    }

    std::complex<double> eval_complex(std::complex<double> z) const {
        std::complex<double> acc{0.0, 0.0};
        for (size_t k = c_.size(); k-- > 0;) acc = acc * z + field::to_complex(c_[k]);
        return acc;
    }

    Poly derivative() const {
        if (c_.size() < 2) return Poly();
        std::vector<S> r(c_.size() - 1, field::zero());
        for (size_t k = 1; k < c_.size(); ++k) r[k - 1] = c_[k] * S(static_cast<int>(k));
        return Poly(std::move(r));
    }

    // Euclidean division: *this = q * d + r with deg r < deg d.
    std::pair<Poly, Poly> divmod(const Poly& d) const {
        if (d.is_zero()) throw std::invalid_argument("Poly::divmod: division by zero polynomial");
        Poly r = *this;
        if (r.degree() < d.degree()) return {Poly(), r};
        std::vector<S> q(static_cast<size_t>(r.degree() - d.degree()) + 1, field::zero());
        S lead = d.leading();
        while (!r.is_zero() && r.degree() >= d.degree()) {
            int k = r.degree() - d.degree();
            S c = r.leading() / lead;
            q[static_cast<size_t>(k)] = c;
            // r -= c * x^k * d, done in place
            for (size_t j = 0; j < d.c_.size(); ++j)
                r.c_[static_cast<size_t>(k) + j] -= c * d.c_[j];
            r.normalize();
        }
        return {Poly(std::move(q)), r};
    }

    // Substitute x -> alpha*x + beta.
    Poly compose_affine(const S& alpha, const S& beta) const {
        Poly lin(std::vector<S>{beta, alpha});
        Poly acc;
        for (size_t k = c_.size(); k-- > 0;) {
            acc = acc * lin;
            acc += Poly::constant(c_[k]);
        }
        return acc;
    }

    // x^D * P(1/x); requires D >= deg P so the result is a polynomial.
    Poly reversal(int D) const {
        if (is_zero()) {
            if (D < 0) throw std::invalid_argument("Poly::reversal: D below degree");
            return Poly();
        }
        if (D < degree()) throw std::invalid_argument("Poly::reversal: D below degree");
        std::vector<S> r(static_cast<size_t>(D) + 1, field::zero());
        for (size_t k = 0; k < c_.size(); ++k)
            r[static_cast<size_t>(D) - k] = c_[k];
        return Poly(std::move(r));
    }

    Poly pow(int e) const {
        if (e < 0) throw std::invalid_argument("Poly::pow: negative exponent");
        Poly acc = Poly::constant(field::one());
        Poly base = *this;
        while (e > 0) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }

    // Coefficient-wise application of the scalar conjugation; together with
    // x real this realizes P(x) -> conj(P(conj(x))).
    Poly conj_coeffs() const {
        Poly r = *this;
        for (S& v : r.c_) v = field::conj(v);
        return r;
    }

private:
    void normalize() {
        while (!c_.empty() && field::is_zero(c_.back())) c_.pop_back();
    }

    std::vector<S> c_;
};

// Monic gcd over a field (exact scalars only; last nonzero remainder).
template <class S>
Poly<S> poly_gcd(Poly<S> a, Poly<S> b) {
    static_assert(scalar_field<S>::exact, "poly_gcd requires exact scalars");
    while (!b.is_zero()) {
        Poly<S> r = a.divmod(b).second;
        a = b;
        b = r;
    }
    if (a.is_zero()) return a;
    S inv_lead = scalar_field<S>::one() / a.leading();
    return a * inv_lead;
}

// P / gcd(P, P'): same roots, all simple.
template <class S>
Poly<S> squarefree_part(const Poly<S>& p) {
    static_assert(scalar_field<S>::exact, "squarefree_part requires exact scalars");
    if (p.is_zero() || p.degree() == 0) return p;
    Poly<S> g = poly_gcd(p, p.derivative());
    if (g.degree() == 0) return p;
    return p.divmod(g).first;
}

// Map coefficients through a scalar conversion functor.
template <class T, class S, class F>
Poly<T> map_poly(const Poly<S>& p, F&& f) {
    std::vector<T> out;
    out.reserve(p.coeffs().size());
    for (const S& c : p.coeffs()) out.push_back(f(c));
    return Poly<T>(std::move(out));
}

}  // namespace psdg
