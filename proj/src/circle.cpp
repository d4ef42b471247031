#include "psdg/circle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace psdg {

using CD = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void validate_moebius(const MoebiusMap& m, const char* who) {
    if (m.z0.re * m.z0.re + m.z0.im * m.z0.im != Rational(1))
        throw std::invalid_argument(std::string(who) + ": |z0| != 1");
    if (sgn(m.w0.im) == 0)
        throw std::invalid_argument(std::string(who) + ": w0 is real");
}

template <class S>
S from_gaussian(const Gaussian& g) {
    if constexpr (std::is_same_v<S, Gaussian>) {
        return g;
    } else {
        return scalar_field<Gaussian>::to_complex(g);
    }
}

template <class S>
S pow_nonneg(const S& base, int e) {
    S r = scalar_field<S>::one();
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// z^e for |z| = 1, negative exponents via z^{-1} = conj(z).
Gaussian unit_pow(const Gaussian& z, int e) {
    return e >= 0 ? pow_nonneg(z, e) : pow_nonneg(z.conj(), -e);
}

template <class S>
double laurent_coeff_scale(const LaurentMatrixPoly<S>& l) {
    double s = 0.0;
    if (!l.is_zero()) {
        for (int k = l.low_degree(); k <= l.high_degree(); ++k) {
            Mat<S> a = l.coeff(k);
            for (int i = 0; i < a.rows(); ++i)
                for (int j = 0; j < a.cols(); ++j)
                    s = std::max(s, std::abs(scalar_field<S>::to_complex(a(i, j))));
        }
    }
    return 1.0 + s;
}

template <class S>
LaurentMatrixPoly<S> lambda_transform_impl(const MoebiusMap& m, const MatrixPoly<S>& f) {
    validate_moebius(m, "lambda_transform");
    if (f.is_zero()) return LaurentMatrixPoly<S>(f.rows(), f.cols());

    const S z0 = from_gaussian<S>(m.z0);
    const S w0 = from_gaussian<S>(m.w0);
    const S z0c = scalar_field<S>::conj(z0);
    const S w0c = scalar_field<S>::conj(w0);
    const S one = scalar_field<S>::one();

    const int d = f.degree();
    const int band = (d + 1) / 2;

    // lambda^{-1}(z) = nu(z) / delta(z) with nu = conj(w0) z - z0 w0 and
    // delta = z - z0, and ((z-z0)~(z-z0))^band = (-conj z0)^band delta^{2 band} z^{-band},
    // so the transform is (-conj z0)^band z^{-band} sum_k F_k nu^k delta^{2 band - k}.
    const Poly<S> nu(std::vector<S>{-(z0 * w0), w0c});
    const Poly<S> delta(std::vector<S>{-z0, one});

    std::vector<Poly<S>> nu_pow(static_cast<size_t>(d) + 1);
    std::vector<Poly<S>> delta_pow(static_cast<size_t>(2 * band) + 1);
    nu_pow[0] = Poly<S>::constant(one);
    for (int k = 1; k <= d; ++k) nu_pow[static_cast<size_t>(k)] = nu_pow[static_cast<size_t>(k) - 1] * nu;
    delta_pow[0] = Poly<S>::constant(one);
    for (int k = 1; k <= 2 * band; ++k)
        delta_pow[static_cast<size_t>(k)] = delta_pow[static_cast<size_t>(k) - 1] * delta;

    MatrixPoly<S> p(f.rows(), f.cols());
    for (int k = 0; k <= d; ++k) {
        Mat<S> a = f.coeff(k);
        if (a.is_zero()) continue;
        p += (nu_pow[static_cast<size_t>(k)] * delta_pow[static_cast<size_t>(2 * band - k)]) *
             MatrixPoly<S>::constant(a);
    }
    p = Poly<S>::constant(pow_nonneg(-z0c, band)) * p;
    return LaurentMatrixPoly<S>::from_matrix_poly(p).shifted(-band);
}

template <class S>
MatrixPoly<S> lambda_recover_impl(const MoebiusMap& m, const LaurentMatrixPoly<S>& l, int deg_f,
                                  double tol) {
    validate_moebius(m, "lambda_recover");
    if (deg_f < 0) throw std::invalid_argument("lambda_recover: negative target degree");
    if (l.is_zero()) return MatrixPoly<S>(l.rows(), l.cols());

    const int band = (deg_f + 1) / 2;
    if (l.low_degree() < -band || l.high_degree() > band) {
        std::ostringstream os;
        os << "lambda_recover: Laurent support [" << l.low_degree() << ", " << l.high_degree()
           << "] exceeds the band [" << -band << ", " << band << "] of degree-" << deg_f
           << " transforms; not in the image of the transform";
        throw std::invalid_argument(os.str());
    }

    const S z0 = from_gaussian<S>(m.z0);
    const S w0 = from_gaussian<S>(m.w0);
    const S z0c = scalar_field<S>::conj(z0);
    const S w0c = scalar_field<S>::conj(w0);
    const S one = scalar_field<S>::one();

    // F(x) = (4 Im(w0)^2)^{-band} sum_k L_k z0^k (x - w0)^{band+k} (x - conj w0)^{band-k}.
    const Poly<S> qa(std::vector<S>{-w0, one});
    const Poly<S> qb(std::vector<S>{-w0c, one});
    std::vector<Poly<S>> qa_pow(static_cast<size_t>(2 * band) + 1);
    std::vector<Poly<S>> qb_pow(static_cast<size_t>(2 * band) + 1);
    qa_pow[0] = Poly<S>::constant(one);
    qb_pow[0] = Poly<S>::constant(one);
    for (int k = 1; k <= 2 * band; ++k) {
        qa_pow[static_cast<size_t>(k)] = qa_pow[static_cast<size_t>(k) - 1] * qa;
        qb_pow[static_cast<size_t>(k)] = qb_pow[static_cast<size_t>(k) - 1] * qb;
    }

    MatrixPoly<S> r(l.rows(), l.cols());
    for (int k = l.low_degree(); k <= l.high_degree(); ++k) {
        Mat<S> a = l.coeff(k);
        if (a.is_zero()) continue;
        const S zp = k >= 0 ? pow_nonneg(z0, k) : pow_nonneg(z0c, -k);
        r += (qa_pow[static_cast<size_t>(band + k)] * qb_pow[static_cast<size_t>(band - k)] * zp) *
             MatrixPoly<S>::constant(a);
    }

    S scale;
    if constexpr (scalar_field<S>::exact) {
        const Rational v = m.w0.im;
        scale = pow_nonneg(S(Rational(1) / (4 * v * v)), band);
    } else {
        const double v = to_double(m.w0.im);
        scale = S(std::pow(4.0 * v * v, -band), 0.0);
    }
    r = Poly<S>::constant(scale) * r;

    if (r.degree() > deg_f) {
        if constexpr (scalar_field<S>::exact) {
            std::ostringstream os;
            os << "lambda_recover: recovered polynomial has exact degree " << r.degree()
               << " > " << deg_f << "; not in the image of the transform at this degree";
            throw std::runtime_error(os.str());
        } else {
            double trail = 0.0;
            for (int k = deg_f + 1; k <= r.degree(); ++k) {
                Mat<S> a = r.coeff(k);
                for (int i = 0; i < a.rows(); ++i)
                    for (int j = 0; j < a.cols(); ++j)
                        trail = std::max(trail, std::abs(scalar_field<S>::to_complex(a(i, j))));
            }
            const double ref = laurent_coeff_scale(l);
            if (trail > tol * ref) {
                std::ostringstream os;
                os << "lambda_recover: coefficients beyond degree " << deg_f
                   << " have residual " << trail << " > " << tol * ref
                   << "; not in the image of the transform at this degree";
                throw std::runtime_error(os.str());
            }
        }
    }

    MatrixPoly<S> out(l.rows(), l.cols());
    const int top = std::min(r.degree(), deg_f);
    for (int k = 0; k <= top; ++k) out.set_coeff(k, r.coeff(k));
    return out;
}

// Wrap an angle, given as a rational multiple of pi, into [0, 2).
Rational normalize_angle(const Rational& a) {
    const Rational half = a / 2;
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), half.get_num().get_mpz_t(), half.get_den().get_mpz_t());
    return a - 2 * Rational(fl);
}

Gaussian laurent_eval_unit(const LaurentMatrixPoly<Gaussian>& b, const Gaussian& z) {
    Gaussian acc(0);
    if (b.is_zero()) return acc;
    for (int k = b.low_degree(); k <= b.high_degree(); ++k) acc += b.coeff(k)(0, 0) * unit_pow(z, k);
    return acc;
}

LaurentMatrixPoly<Gaussian> laurent_derivative(const LaurentMatrixPoly<Gaussian>& b) {
    LaurentMatrixPoly<Gaussian> d(b.rows(), b.cols());
    if (b.is_zero()) return d;
    for (int k = b.low_degree(); k <= b.high_degree(); ++k) {
        if (k == 0) continue;
        d.set_coeff(k - 1, b.coeff(k) * Gaussian(k));
    }
    return d;
}

void require_scalar_on_circle(const LaurentMatrixPoly<Gaussian>& b, const Gaussian& z,
                              const char* who) {
    if (b.rows() != 1 || b.cols() != 1)
        throw std::invalid_argument(std::string(who) + ": not a 1x1 Laurent polynomial");
    if (z.re * z.re + z.im * z.im != Rational(1))
        throw std::invalid_argument(std::string(who) + ": evaluation point is not on the unit circle");
}

double value_at_float(const LaurentMatrixPoly<Gaussian>& b, CD z) {
    return b.evaluate_complex(z)(0, 0).real();
}

double slope_at_float(const LaurentMatrixPoly<Gaussian>& der, CD z) {
    return (CD(0.0, 1.0) * z * der.evaluate_complex(z)(0, 0)).real();
}

}  // namespace

/* ------------------------------------------------------------------ */
/* Moebius maps                                                        */
/* ------------------------------------------------------------------ */

MoebiusMap default_moebius() { return MoebiusMap{Gaussian(1), Gaussian::i()}; }

MoebiusMap make_moebius(const Gaussian& z0, const Gaussian& w0) {
    MoebiusMap m{z0, w0};
    validate_moebius(m, "make_moebius");
    return m;
}

Gaussian moebius_apply(const MoebiusMap& m, const Rational& x) {
    validate_moebius(m, "moebius_apply");
    const Gaussian gx(x);
    return m.z0 * (gx - m.w0) / (gx - m.w0.conj());
}

std::complex<double> moebius_apply(const MoebiusMap& m, std::complex<double> x) {
    validate_moebius(m, "moebius_apply");
    const CD z0 = scalar_field<Gaussian>::to_complex(m.z0);
    const CD w0 = scalar_field<Gaussian>::to_complex(m.w0);
    return z0 * (x - w0) / (x - std::conj(w0));
}

Gaussian moebius_apply_infinity(const MoebiusMap& m) {
    validate_moebius(m, "moebius_apply_infinity");
    return m.z0;
}

Rational moebius_inverse(const MoebiusMap& m, const Gaussian& z) {
    validate_moebius(m, "moebius_inverse");
    if (z == m.z0)
        throw std::domain_error("moebius_inverse: z0 pulls back to the point at infinity");
    const Gaussian q = (z * m.w0.conj() - m.z0 * m.w0) / (z - m.z0);
    if (!q.is_real())
        throw std::invalid_argument("moebius_inverse: point is not on the unit circle");
    return q.re;
}

double moebius_inverse(const MoebiusMap& m, std::complex<double> z) {
    validate_moebius(m, "moebius_inverse");
    const CD z0 = scalar_field<Gaussian>::to_complex(m.z0);
    const CD w0 = scalar_field<Gaussian>::to_complex(m.w0);
    if (z == z0) throw std::domain_error("moebius_inverse: z0 pulls back to the point at infinity");
    return ((z * std::conj(w0) - z0 * w0) / (z - z0)).real();
}

/* ------------------------------------------------------------------ */
/* Laurent transfer and recovery                                       */
/* ------------------------------------------------------------------ */

LaurentMatrixPoly<Gaussian> lambda_transform(const MoebiusMap& m, const MatrixPoly<Gaussian>& f) {
    return lambda_transform_impl<Gaussian>(m, f);
}

LaurentMatrixPoly<CD> lambda_transform(const MoebiusMap& m, const MatrixPoly<CD>& f) {
    return lambda_transform_impl<CD>(m, f);
}

MatrixPoly<Gaussian> lambda_recover(const MoebiusMap& m, const LaurentMatrixPoly<Gaussian>& l,
                                    int deg_f) {
    return lambda_recover_impl<Gaussian>(m, l, deg_f, 0.0);
}

MatrixPoly<CD> lambda_recover(const MoebiusMap& m, const LaurentMatrixPoly<CD>& l, int deg_f,
                              double tol) {
    return lambda_recover_impl<CD>(m, l, deg_f, tol);
}

/* ------------------------------------------------------------------ */
/* Points on the unit circle                                           */
/* ------------------------------------------------------------------ */

bool circle_point_is_exact(const Rational& angle) {
    const Rational r = normalize_angle(angle);
    return r.get_den() == 1 || r.get_den() == 2;
}

Gaussian circle_point_exact(const Rational& angle) {
    const Rational twice = 2 * normalize_angle(angle);
    if (twice.get_den() != 1)
        throw std::invalid_argument(
            "circle_point_exact: e^{i pi " + rational_to_string(angle) + "} is not a Gaussian rational");
    switch (twice.get_num().get_si()) {
        case 0: return Gaussian(1);
        case 1: return Gaussian::i();
        case 2: return Gaussian(-1);
        case 3: return -Gaussian::i();
        default: throw std::logic_error("circle_point_exact: angle normalization out of range");
    }
}

std::complex<double> circle_point(const Rational& angle) {
    const double th = kPi * to_double(normalize_angle(angle));
    return {std::cos(th), std::sin(th)};
}

/* ------------------------------------------------------------------ */
/* Exact evaluation on T                                               */
/* ------------------------------------------------------------------ */

Rational laurent_value_on_circle(const LaurentMatrixPoly<Gaussian>& b, const Gaussian& z) {
    require_scalar_on_circle(b, z, "laurent_value_on_circle");
    const Gaussian v = laurent_eval_unit(b, z);
    if (!v.is_real())
        throw std::invalid_argument(
            "laurent_value_on_circle: value is not real (the polynomial is not circle-Hermitian)");
    return v.re;
}

Rational laurent_slope_on_circle(const LaurentMatrixPoly<Gaussian>& b, const Gaussian& z) {
    require_scalar_on_circle(b, z, "laurent_slope_on_circle");
    const Gaussian t = Gaussian::i() * z * laurent_eval_unit(laurent_derivative(b), z);
    if (!t.is_real())
        throw std::invalid_argument(
            "laurent_slope_on_circle: slope is not real (the polynomial is not circle-Hermitian)");
    return t.re;
}

/* ------------------------------------------------------------------ */
/* Boundary conditions for circle descriptions                         */
/* ------------------------------------------------------------------ */

bool circle_description_check(const std::vector<LaurentMatrixPoly<Gaussian>>& gens,
                              const CircleSet& domain, std::string* reason) {
    for (size_t j = 0; j < gens.size(); ++j) {
        if (gens[j].rows() != 1 || gens[j].cols() != 1)
            throw std::invalid_argument("circle_description_check: generator " + std::to_string(j) +
                                        " is not 1x1");
        if (!gens[j].is_circle_hermitian())
            throw std::invalid_argument("circle_description_check: generator " + std::to_string(j) +
                                        " is not circle-Hermitian");
    }
    for (const CircleArc& arc : domain.arcs) {
        const Rational len = arc.to_angle - arc.from_angle;
        if (sgn(len) <= 0 || len > 2)
            throw std::invalid_argument("circle_description_check: arc length must lie in (0, 2]");
    }

    std::vector<LaurentMatrixPoly<Gaussian>> ders;
    std::vector<double> scales;
    ders.reserve(gens.size());
    scales.reserve(gens.size());
    for (const auto& b : gens) {
        ders.push_back(laurent_derivative(b));
        scales.push_back(laurent_coeff_scale(b));
    }

    // First-order data of generator j at the point with angle a: whether it
    // vanishes there and its tangential slope.  Gaussian-rational points are
    // probed exactly, all others in floating point.
    const auto probe = [&](size_t j, const Rational& a, bool& vanishes, bool& slope_nonzero,
                           double& slope) {
        if (circle_point_is_exact(a)) {
            const Gaussian z = circle_point_exact(a);
            const Rational v = laurent_value_on_circle(gens[j], z);
            const Rational s = laurent_slope_on_circle(gens[j], z);
            vanishes = sgn(v) == 0;
            slope_nonzero = sgn(s) != 0;
            slope = to_double(s);
        } else {
            const CD z = circle_point(a);
            const double v = value_at_float(gens[j], z);
            const double s = slope_at_float(ders[j], z);
            vanishes = std::abs(v) <= 1e-9 * scales[j];
            slope_nonzero = std::abs(s) > 1e-9 * scales[j];
            slope = s;
        }
    };
    const auto angle_str = [](const Rational& a) { return rational_to_string(a) + "*pi"; };

    // Every endpoint of a proper arc needs one generator vanishing to first
    // order there.
    for (const CircleArc& arc : domain.arcs) {
        if (arc.to_angle - arc.from_angle == 2) continue;  // full circle: no boundary
        for (const Rational& raw : {arc.from_angle, arc.to_angle}) {
            const Rational a = normalize_angle(raw);
            bool ok = false;
            for (size_t j = 0; j < gens.size() && !ok; ++j) {
                bool vz = false, snz = false;
                double s = 0.0;
                probe(j, a, vz, snz, s);
                ok = vz && snz;
            }
            if (!ok) {
                if (reason)
                    *reason = "arc endpoint at angle " + angle_str(a) +
                              ": no generator vanishes there with nonzero tangential slope";
                return false;
            }
        }
    }

    // Every isolated point needs a pair of generators crossing zero there
    // with opposite slopes, so that their product is <= 0 nearby.
    for (const Rational& rawp : domain.points) {
        const Rational a = normalize_angle(rawp);
        std::vector<size_t> cand;
        std::vector<double> cslope;
        for (size_t j = 0; j < gens.size(); ++j) {
            bool vz = false, snz = false;
            double s = 0.0;
            probe(j, a, vz, snz, s);
            if (vz && snz) {
                cand.push_back(j);
                cslope.push_back(s);
            }
        }
        bool ok = false;
        const double theta = kPi * to_double(a);
        for (size_t p = 0; p < cand.size() && !ok; ++p) {
            for (size_t q = p + 1; q < cand.size() && !ok; ++q) {
                if (cslope[p] * cslope[q] >= 0.0) continue;
                // Opposite first-order signs; confirm on 16 sampled points
                // within angular radius 1e-3.
                const double tol_pair = 1e-12 * scales[cand[p]] * scales[cand[q]];
                bool confirmed = true;
                for (int i = 1; i <= 8 && confirmed; ++i) {
                    const double off = (1e-3 * i) / 8.0;
                    for (const double th : {theta + off, theta - off}) {
                        const CD z(std::cos(th), std::sin(th));
                        if (value_at_float(gens[cand[p]], z) * value_at_float(gens[cand[q]], z) >
                            tol_pair) {
                            confirmed = false;
                            break;
                        }
                    }
                }
                ok = confirmed;
            }
        }
        if (!ok) {
            if (reason)
                *reason = "isolated point at angle " + angle_str(a) +
                          ": no generator pair vanishes there with opposite nonzero slopes and "
                          "nonpositive product nearby";
            return false;
        }
    }
    return true;
}

/* ------------------------------------------------------------------ */
/* Membership via pullback to the line                                 */
/* ------------------------------------------------------------------ */

CircleMembershipReport circle_membership(const MoebiusMap& m, const LaurentMatrixPoly<Gaussian>& l,
                                         const std::vector<LaurentMatrixPoly<Gaussian>>& gens,
                                         int degree, double tol) {
    validate_moebius(m, "circle_membership");
    if (l.rows() <= 0 || l.rows() != l.cols())
        throw std::invalid_argument("circle_membership: L must be square and nonempty");
    if (!l.is_circle_hermitian())
        throw std::invalid_argument("circle_membership: L is not circle-Hermitian");
    for (size_t j = 0; j < gens.size(); ++j) {
        if (gens[j].rows() != 1 || gens[j].cols() != 1 || !gens[j].is_circle_hermitian())
            throw std::invalid_argument("circle_membership: generator " + std::to_string(j) +
                                        " must be a 1x1 circle-Hermitian Laurent polynomial");
    }

    const auto band_of = [](const LaurentMatrixPoly<Gaussian>& p) {
        if (p.is_zero()) return 0;
        return std::max(std::abs(p.low_degree()), std::abs(p.high_degree()));
    };

    CircleMembershipReport rep;
    rep.band = band_of(l);
    rep.pullback = lambda_recover(m, l, 2 * rep.band);

    for (const auto& b : gens) {
        const MatrixPoly<Gaussian> gp = lambda_recover(m, b, 2 * band_of(b));
        const Poly<Gaussian> ge = gp.is_zero() ? Poly<Gaussian>() : gp.entry(0, 0);
        std::vector<Rational> rc;
        for (int k = 0; k <= (ge.is_zero() ? -1 : ge.degree()); ++k) {
            const Gaussian c = ge.coeff(k);
            if (sgn(c.im) != 0)
                throw std::logic_error(
                    "circle_membership: pullback of a circle-Hermitian generator must have real "
                    "coefficients");
            rc.push_back(c.re);
        }
        rep.line_generators.push_back(Poly<Rational>(std::move(rc)));
    }

    if (degree < rep.pullback.degree())
        throw std::invalid_argument("circle_membership: truncation degree below the pullback degree");
    rep.sigma_power = std::max(0, (degree + 1) / 2 - rep.band);

    TruncatedPreordering t;
    t.S = Description::from_polys(rep.line_generators);
    t.n = l.rows();
    t.d = degree;
    t.mode = TruncMode::QuadraticModule;
    const MembershipReport mr = check_membership(rep.pullback, t, tol);

    rep.status = mr.status;
    if (mr.status == MembershipStatus::Member) rep.line_certificate = mr.certificate;
    rep.witness = mr.witness;
    std::ostringstream os;
    os << "reduced to the line through x = lambda^{-1}(z): decided omega^" << rep.band
       << " * L(lambda(x)) against the quadratic module of the pulled-back generators at degree "
       << degree << "; a Member outcome certifies sigma^" << rep.sigma_power
       << " * L in the circle quadratic module, sigma(z) = (z-z0)~(z-z0)";
    if (!mr.note.empty()) os << "; line solver: " << mr.note;
    rep.note = os.str();
    return rep;
}

}  // namespace psdg
