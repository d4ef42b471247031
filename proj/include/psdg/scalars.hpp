#pragma once

// Exact and floating-point scalar types used throughout the library.
//
// The exact tower is
//
//     Rational  =  GMP rationals
//     Quad      =  Rational + Rational*sqrt(2)        (real quadratic field)
//     GComplex<R> =  R + i*R  for R in {Rational, Quad}
//
// Quad exists because the unitary congruences used by the degree-reduction
// machinery contain entries 1/sqrt(2); everything they produce stays inside
// the field generated by i and sqrt(2) over the rationals, so certificates
// built from them can be stored and verified without rounding.
//
// scalar_field<S> provides the small uniform interface the polynomial and
// matrix templates need (zero/one, conjugation, exactness flag, conversion
// to std::complex<double> for printing and numeric cross-checks).

#include <complex>
#include <cstdint>
#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace psdg {

using Rational = mpq_class;

/* ------------------------------------------------------------------ */
/* Rational helpers                                                    */
/* ------------------------------------------------------------------ */

// Build p/q in canonical form.  gmpxx does not canonicalize two-argument
// constructions automatically.
inline Rational make_rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("make_rational: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Parse "p", "-p", or "p/q" (arbitrary precision).  Rejects anything else,
// in particular decimal notation: exact inputs must really be exact.
inline Rational rational_from_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("rational_from_string: empty string");
    for (char c : s) {
        if (!(c == '-' || c == '+' || c == '/' || (c >= '0' && c <= '9')))
            throw std::invalid_argument("rational_from_string: invalid character in '" + s + "'");
    }
    mpq_class q;
    if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("rational_from_string: cannot parse '" + s + "'");
    if (q.get_den() == 0)
        throw std::invalid_argument("rational_from_string: zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

inline std::string rational_to_string(const Rational& q) {
    return q.get_str();
}

inline double to_double(const Rational& q) { return q.get_d(); }

// Exact square test; when true and root != nullptr, *root is the
// nonnegative square root.
inline bool rational_is_square(const Rational& q, Rational* root = nullptr) {
    if (sgn(q) < 0) return false;
    mpz_class num = q.get_num(), den = q.get_den();
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0) return false;
    if (mpz_perfect_square_p(den.get_mpz_t()) == 0) return false;
    if (root) {
        mpz_class rn, rd;
        mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
        mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
        Rational r(rn, rd);
        r.canonicalize();
        *root = r;
    }
    return true;
}

/* ------------------------------------------------------------------ */
/* Quad: a + b*sqrt(2)                                                 */
/* ------------------------------------------------------------------ */

class Quad {
public:
    Quad() : a_(0), b_(0) {}
    Quad(int v) : a_(v), b_(0) {}                     // NOLINT(implicit)
    Quad(const Rational& a) : a_(a), b_(0) {}         // NOLINT(implicit)
    Quad(const Rational& a, const Rational& b) : a_(a), b_(b) {}

    static Quad sqrt2() { return Quad(Rational(0), Rational(1)); }

    const Rational& rational_part() const { return a_; }
    const Rational& sqrt2_part() const { return b_; }

    bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
    bool is_rational() const { return sgn(b_) == 0; }

    Quad operator-() const { return Quad(-a_, -b_); }

    Quad& operator+=(const Quad& o) { a_ += o.a_; b_ += o.b_; return *this; }
    Quad& operator-=(const Quad& o) { a_ -= o.a_; b_ -= o.b_; return *this; }
    Quad& operator*=(const Quad& o) {
        // (a + b s)(c + d s) = (ac + 2bd) + (ad + bc) s,  s = sqrt(2)
        Rational na = a_ * o.a_ + 2 * (b_ * o.b_);
        Rational nb = a_ * o.b_ + b_ * o.a_;
        a_ = na; b_ = nb;
        return *this;
    }
    Quad& operator/=(const Quad& o) {
        // 1/(c + d s) = (c - d s)/(c^2 - 2 d^2)
        Rational nrm = o.a_ * o.a_ - 2 * (o.b_ * o.b_);
        if (sgn(nrm) == 0) throw std::invalid_argument("Quad: division by zero");
        Quad num = *this; num *= Quad(o.a_, -o.b_);
        a_ = num.a_ / nrm; b_ = num.b_ / nrm;
        return *this;
    }

    friend Quad operator+(Quad x, const Quad& y) { x += y; return x; }
    friend Quad operator-(Quad x, const Quad& y) { x -= y; return x; }
    friend Quad operator*(Quad x, const Quad& y) { x *= y; return x; }
    friend Quad operator/(Quad x, const Quad& y) { x /= y; return x; }
    friend bool operator==(const Quad& x, const Quad& y) { return x.a_ == y.a_ && x.b_ == y.b_; }
    friend bool operator!=(const Quad& x, const Quad& y) { return !(x == y); }

    // Exact sign of a + b*sqrt(2).
    int sign() const {
        int sa = sgn(a_), sb = sgn(b_);
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        // Opposite signs: compare a^2 with 2 b^2; the larger magnitude wins.
        Rational d = a_ * a_ - 2 * (b_ * b_);
        int sd = sgn(d);
        return sd == 0 ? 0 : (sd > 0 ? sa : sb);
    }

    double to_double() const {
        return a_.get_d() + b_.get_d() * 1.41421356237309504880168872420969808;
    }

    std::string to_string() const {
        if (sgn(b_) == 0) return rational_to_string(a_);
        std::string s = rational_to_string(a_);
        s += (sgn(b_) >= 0) ? "+" : "-";
        Rational ab = abs(b_);
        s += rational_to_string(ab) + "*sqrt2";
        return s;
    }

private:
    Rational a_, b_;
};

/* ------------------------------------------------------------------ */
/* GComplex<R>: R + i R over an exact real field R                     */
/* ------------------------------------------------------------------ */

template <class R>
struct GComplex {
    R re{}, im{};

    GComplex() = default;
    GComplex(int v) : re(v), im(0) {}                 // NOLINT(implicit)
    GComplex(const R& r) : re(r), im(R(0)) {}         // NOLINT(implicit)
    GComplex(const R& r, const R& i) : re(r), im(i) {}

    static GComplex i() { return GComplex(R(0), R(1)); }

    bool is_zero() const { return re == R(0) && im == R(0); }
    bool is_real() const { return im == R(0); }

    GComplex conj() const { return GComplex(re, -im); }

    GComplex operator-() const { return GComplex(-re, -im); }

    GComplex& operator+=(const GComplex& o) { re += o.re; im += o.im; return *this; }
    GComplex& operator-=(const GComplex& o) { re -= o.re; im -= o.im; return *this; }
    GComplex& operator*=(const GComplex& o) {
        R nr = re * o.re - im * o.im;
        R ni = re * o.im + im * o.re;
        re = nr; im = ni;
        return *this;
    }
    GComplex& operator/=(const GComplex& o) {
        R nrm = o.re * o.re + o.im * o.im;
        if (nrm == R(0)) throw std::invalid_argument("GComplex: division by zero");
        GComplex num = *this; num *= o.conj();
        re = num.re / nrm; im = num.im / nrm;
        return *this;
    }

    friend GComplex operator+(GComplex x, const GComplex& y) { x += y; return x; }
    friend GComplex operator-(GComplex x, const GComplex& y) { x -= y; return x; }
    friend GComplex operator*(GComplex x, const GComplex& y) { x *= y; return x; }
    friend GComplex operator/(GComplex x, const GComplex& y) { x /= y; return x; }
    friend bool operator==(const GComplex& x, const GComplex& y) { return x.re == y.re && x.im == y.im; }
    friend bool operator!=(const GComplex& x, const GComplex& y) { return !(x == y); }
};

using Gaussian = GComplex<Rational>;      // Q(i)
using QuadGaussian = GComplex<Quad>;      // Q(i, sqrt 2)

inline QuadGaussian lift_to_quad(const Gaussian& g) {
    return QuadGaussian(Quad(g.re), Quad(g.im));
}

/* ------------------------------------------------------------------ */
/* scalar_field<S>: uniform hooks for the templates                    */
/* ------------------------------------------------------------------ */

template <class S>
struct scalar_field;  // primary template intentionally undefined

template <>
struct scalar_field<Rational> {
    static constexpr bool exact = true;
    static constexpr bool complex_entries = false;
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static bool is_zero(const Rational& x) { return sgn(x) == 0; }
    static Rational conj(const Rational& x) { return x; }
    static std::complex<double> to_complex(const Rational& x) { return {x.get_d(), 0.0}; }
    static std::string to_string(const Rational& x) { return rational_to_string(x); }
};

template <>
struct scalar_field<Quad> {
    static constexpr bool exact = true;
    static constexpr bool complex_entries = false;
    static Quad zero() { return Quad(); }
    static Quad one() { return Quad(1); }
    static bool is_zero(const Quad& x) { return x.is_zero(); }
    static Quad conj(const Quad& x) { return x; }
    static std::complex<double> to_complex(const Quad& x) { return {x.to_double(), 0.0}; }
    static std::string to_string(const Quad& x) { return x.to_string(); }
};

template <>
struct scalar_field<double> {
    static constexpr bool exact = false;
    static constexpr bool complex_entries = false;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static bool is_zero(double x) { return x == 0.0; }
    static double conj(double x) { return x; }
    static std::complex<double> to_complex(double x) { return {x, 0.0}; }
    static std::string to_string(double x) { return std::to_string(x); }
};

template <class R>
struct scalar_field<GComplex<R>> {
    static constexpr bool exact = true;
    static constexpr bool complex_entries = true;
    static GComplex<R> zero() { return GComplex<R>(); }
    static GComplex<R> one() { return GComplex<R>(1); }
    static bool is_zero(const GComplex<R>& x) { return x.is_zero(); }
    static GComplex<R> conj(const GComplex<R>& x) { return x.conj(); }
    static std::complex<double> to_complex(const GComplex<R>& x) {
        return {scalar_field<R>::to_complex(x.re).real(), scalar_field<R>::to_complex(x.im).real()};
    }
    static std::string to_string(const GComplex<R>& x) {
        return scalar_field<R>::to_string(x.re) + (scalar_field<R>::is_zero(x.im) ? "" : ("+i*" + scalar_field<R>::to_string(x.im)));
    }
};

template <>
struct scalar_field<std::complex<double>> {
    static constexpr bool exact = false;
    static constexpr bool complex_entries = true;
    static std::complex<double> zero() { return {0.0, 0.0}; }
    static std::complex<double> one() { return {1.0, 0.0}; }
    static bool is_zero(const std::complex<double>& x) { return x.real() == 0.0 && x.imag() == 0.0; }
    static std::complex<double> conj(const std::complex<double>& x) { return std::conj(x); }
    static std::complex<double> to_complex(const std::complex<double>& x) { return x; }
    static std::string to_string(const std::complex<double>& x) {
        return std::to_string(x.real()) + "+i*" + std::to_string(x.imag());
    }
};

}  // namespace psdg
