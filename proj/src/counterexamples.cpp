#include "psdg/counterexamples.hpp"

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace psdg {

using CD = std::complex<double>;

namespace {

constexpr mp_bitcnt_t kSqrtBits = 192;  // ~57 correct decimal digits
constexpr int kDecimalDigits = 34;      // printed significant digits (>= 30)

// value = 0.mantissa * 10^exp10  ->  "d.ddd...e<exp10 - 1>"
std::string mpf_to_decimal(const mpf_class& v, int digits) {
    mp_exp_t exp10 = 0;
    std::string m = v.get_str(exp10, 10, static_cast<size_t>(digits));
    bool neg = !m.empty() && m[0] == '-';
    if (neg) m.erase(m.begin());
    if (m.empty()) return "0";
    m.resize(static_cast<size_t>(digits), '0');  // keep trailing significant zeros
    std::ostringstream out;
    if (neg) out << '-';
    out << m[0] << '.' << m.substr(1) << 'e' << (static_cast<long>(exp10) - 1);
    return out.str();
}

Poly<Rational> rational_poly(std::vector<Rational> cs) { return Poly<Rational>(std::move(cs)); }

// (x - r1)(x - r2)(x - r3) expanded.
Poly<Rational> cubic_from_roots(const Rational& r1, const Rational& r2, const Rational& r3) {
    return rational_poly({-r1 * r2 * r3, r1 * r2 + r1 * r3 + r2 * r3, -(r1 + r2 + r3), 1});
}

// The 2 x 2 family matrix over any off-diagonal scalar d (exact or float).
template <typename S>
MatrixPoly<S> family_matrix(const S& A, const S& B, const S& C, const S& d) {
    Mat<S> c0(2, 2), c1(2, 2), c2(2, 2);
    c0(0, 0) = A;
    c0(0, 1) = d;
    c0(1, 0) = d;
    c0(1, 1) = C;
    c1(0, 0) = S(1);
    c1(1, 1) = B;
    c2(1, 1) = S(1);
    return MatrixPoly<S>(std::vector<Mat<S>>{c0, c1, c2});
}

Rational eval_rational(const Poly<Rational>& p, const Rational& x) {
    Rational acc = 0;
    for (int k = p.is_zero() ? -1 : p.degree(); k >= 0; --k) acc = acc * x + p.coeff(k);
    return acc;
}

}  // namespace

/* ------------------------------------------------------------------ */
/* Conditions and construction                                         */
/* ------------------------------------------------------------------ */

FkConditions fk_conditions(const Rational& x1, const Rational& x2, const Rational& x3,
                           const Rational& k) {
    if (!(x1 < x2 && x2 < x3))
        throw std::invalid_argument("fk_conditions: parameters must satisfy x1 < x2 < x3");
    FkConditions c;
    c.k = k;
    c.dsq = k * k * k + k * k * (-2 * x1 + x2 + x3) + k * (x2 * x3 + x1 * x1 - x1 * x2 - x1 * x3);
    const Rational half_spread = (x2 - x3) / 2;
    c.vertex_value =
        Rational(3, 4) * k * k + k * (-x1 + (x2 + x3) / 2) - half_spread * half_spread;
    c.k_positive = sgn(k) > 0;
    c.dsq_positive = sgn(c.dsq) > 0;
    c.vertex_positive = sgn(c.vertex_value) > 0;
    return c;
}

FkInstance fk_build(const Rational& x1, const Rational& x2, const Rational& x3,
                    const Rational& k) {
    const FkConditions cond = fk_conditions(x1, x2, x3, k);
    if (!cond.all()) {
        std::ostringstream msg;
        msg << "fk_build: parameter conditions fail:";
        if (!cond.k_positive) msg << " k <= 0;";
        if (!cond.dsq_positive) msg << " Dsq = " << rational_to_string(cond.dsq) << " <= 0;";
        if (!cond.vertex_positive)
            msg << " bottom-right vertex value = " << rational_to_string(cond.vertex_value)
                << " <= 0;";
        throw std::invalid_argument(msg.str());
    }

    FkInstance inst;
    inst.x1 = x1;
    inst.x2 = x2;
    inst.x3 = x3;
    inst.k = k;
    inst.A = k - x1;
    inst.B = -k - x2 - x3;
    inst.C = k * k + k * (-x1 + x2 + x3) + x2 * x3;
    inst.Dsq = inst.A * inst.C + x1 * x2 * x3;

    Rational root;
    inst.exact = rational_is_square(inst.Dsq, &root);
    if (inst.exact) {
        inst.D_exact = root;
        inst.D_approx = root;
        inst.det_residual = 0.0;
        inst.F_exact = family_matrix<Gaussian>(Gaussian(inst.A), Gaussian(inst.B),
                                               Gaussian(inst.C), Gaussian(root));
        mpf_class d_hp(root, kSqrtBits);
        inst.D_decimal = mpf_to_decimal(d_hp, kDecimalDigits);
        inst.F = family_matrix<CD>(CD(to_double(inst.A)), CD(to_double(inst.B)),
                                   CD(to_double(inst.C)), CD(to_double(root)));
    } else {
        mpf_class dsq_hp(inst.Dsq, kSqrtBits);
        mpf_class d_hp(0, kSqrtBits);
        mpf_sqrt(d_hp.get_mpf_t(), dsq_hp.get_mpf_t());
        inst.D_approx = Rational(mpq_class(d_hp));
        inst.D_decimal = mpf_to_decimal(d_hp, kDecimalDigits);
        // det(F with D_approx) - (x - x1)(x - x2)(x - x3) has every
        // coefficient zero by exact algebra except the constant one, which
        // is Dsq - D_approx^2.
        Rational res = inst.Dsq - inst.D_approx * inst.D_approx;
        if (sgn(res) < 0) res = -res;
        inst.det_residual = to_double(res);
        inst.F = family_matrix<CD>(CD(to_double(inst.A)), CD(to_double(inst.B)),
                                   CD(to_double(inst.C)), CD(d_hp.get_d()));
    }
    return inst;
}

std::optional<Rational> fk_search_exact_k(const Rational& x1, const Rational& x2,
                                          const Rational& x3, int num_bound, int den_bound) {
    if (!(x1 < x2 && x2 < x3))
        throw std::invalid_argument("fk_search_exact_k: parameters must satisfy x1 < x2 < x3");
    if (num_bound < 1 || den_bound < 1)
        throw std::invalid_argument("fk_search_exact_k: bounds must be >= 1");
    for (int q = 1; q <= den_bound; ++q) {
        for (int p = 1; p <= num_bound; ++p) {
            Rational k = make_rational(p, q);
            if (k.get_num() != p || k.get_den() != q) continue;  // non-canonical duplicate
            const FkConditions cond = fk_conditions(x1, x2, x3, k);
            if (!cond.all()) continue;
            const Rational dsq = (k - x1) * (k * k + k * (-x1 + x2 + x3) + x2 * x3) + x1 * x2 * x3;
            if (rational_is_square(dsq, nullptr)) return k;
        }
    }
    return std::nullopt;
}

/* ------------------------------------------------------------------ */
/* Positivity report                                                   */
/* ------------------------------------------------------------------ */

FkPsdReport fk_psd_report(const FkInstance& inst, const SemialgSet& K) {
    FkPsdReport rep;

    // Top-left entry x + A: vanishes at x1 - k, increasing; need K right of it.
    {
        FkPsdFact& f = rep.top_left;
        f.name = "top_left_nonnegative";
        const Rational root = inst.x1 - inst.k;
        f.pass = !K.is_empty();
        for (const Piece& p : K.pieces()) {
            if (p.lo_unbounded) {
                f.pass = false;
                f.note += "piece unbounded below; ";
                continue;
            }
            if (p.lo < root) f.pass = false;
            f.points.emplace_back(p.lo, p.lo + inst.A);
            if (p.kind == Piece::Kind::Interval && !p.hi_unbounded)
                f.points.emplace_back(p.hi, p.hi + inst.A);
        }
        f.note += "entry vanishes at " + rational_to_string(root);
    }

    // Bottom-right entry x^2 + B x + C: positive minimum at the vertex.
    {
        FkPsdFact& f = rep.bottom_right;
        f.name = "bottom_right_positive";
        const Rational vx = -inst.B / 2;
        const Rational vval = inst.C - inst.B * inst.B / 4;
        f.pass = sgn(vval) > 0;
        f.points.emplace_back(vx, vval);
        const FkConditions cond = fk_conditions(inst.x1, inst.x2, inst.x3, inst.k);
        f.note = (vval == cond.vertex_value)
                     ? "vertex value equals the parameter-condition value"
                     : "vertex value DISAGREES with the parameter-condition value";
    }

    // Determinant: exactly (x - x1)(x - x2)(x - x3); need K inside
    // [x1, x2] ∪ [x3, ∞).
    {
        FkPsdFact& f = rep.determinant;
        f.name = "determinant_nonnegative";
        const Poly<Rational> p_k = rational_poly({inst.C, inst.B, 1});
        const Poly<Rational> det_sym =
            rational_poly({inst.A, 1}) * p_k - Poly<Rational>::constant(inst.Dsq);
        const Poly<Rational> target = cubic_from_roots(inst.x1, inst.x2, inst.x3);
        const bool identity_ok = det_sym == target;
        f.pass = identity_ok && !K.is_empty();
        if (!identity_ok) f.note = "determinant identity FAILED; ";
        for (const Piece& p : K.pieces()) {
            const bool inside_left = !p.lo_unbounded && p.lo >= inst.x1 && !p.hi_unbounded &&
                                     p.hi <= inst.x2;
            const bool inside_right = !p.lo_unbounded && p.lo >= inst.x3;
            if (!(inside_left || inside_right)) f.pass = false;
            if (!p.lo_unbounded) f.points.emplace_back(p.lo, eval_rational(det_sym, p.lo));
            if (p.kind == Piece::Kind::Interval && !p.lo_unbounded && !p.hi_unbounded) {
                const Rational mid = (p.lo + p.hi) / 2;
                f.points.emplace_back(mid, eval_rational(det_sym, mid));
                f.points.emplace_back(p.hi, eval_rational(det_sym, p.hi));
            }
        }
        const Rational gap_mid = (inst.x2 + inst.x3) / 2;
        f.points.emplace_back(gap_mid, eval_rational(det_sym, gap_mid));
        f.note += "last point samples the gap (" + rational_to_string(inst.x2) + ", " +
                  rational_to_string(inst.x3) + ") where the determinant is negative";
    }

    rep.all_pass = rep.top_left.pass && rep.bottom_right.pass && rep.determinant.pass;
    return rep;
}

/* ------------------------------------------------------------------ */
/* Refutations                                                         */
/* ------------------------------------------------------------------ */

Claim1Refutation fk_refute_claim1(const FkInstance& inst, const SemialgSet& K1) {
    const auto& pieces = K1.pieces();
    const bool shape_ok = pieces.size() >= 2 && pieces.front().kind == Piece::Kind::Interval &&
                          !pieces.front().lo_unbounded && !pieces.front().hi_unbounded &&
                          pieces.front().lo == inst.x1 && pieces.front().hi == inst.x2 &&
                          !pieces[1].lo_unbounded && pieces[1].lo == inst.x3 &&
                          pieces.back().hi_unbounded;
    if (!shape_ok)
        throw std::invalid_argument(
            "fk_refute_claim1: K1 must be [x1, x2], then pieces starting at x3, ending in a "
            "ray [.., inf)");

    Claim1Refutation r;

    // q(x; k0) = det(F - diag(0, k0) (x - x2)(x - x3)); re-derive the product
    // form exactly for each k0 we use.
    const Poly<Rational> w2 =
        rational_poly({inst.x2 * inst.x3, -(inst.x2 + inst.x3), 1});  // (x - x2)(x - x3)
    const Poly<Rational> p_k = rational_poly({inst.C, inst.B, 1});
    const Poly<Rational> top = rational_poly({inst.A, 1});  // x + A
    auto q_poly = [&](const Rational& k0) {
        const Poly<Rational> det_lhs =
            top * (p_k - Poly<Rational>::constant(k0) * w2) - Poly<Rational>::constant(inst.Dsq);
        const Poly<Rational> lin =
            rational_poly({-(inst.x1 - inst.x1 * k0 + inst.k * k0), 1 - k0});
        if (det_lhs != w2 * lin)
            throw std::logic_error("fk_refute_claim1: determinant product identity failed");
        return det_lhs;
    };

    r.midpoint = (inst.x2 + inst.x3) / 2;
    r.q_zero_at_midpoint = eval_rational(q_poly(Rational(0)), r.midpoint);
    r.zero_weight_refuted = sgn(r.q_zero_at_midpoint) < 0;

    r.corner_factor = (inst.x1 - inst.x2) * (inst.x1 - inst.x3);
    bool all_negative = true;
    for (int j = 1; j <= 8; ++j) {
        const Rational k0 = make_rational(j, 8);
        const Rational q_at_x1 = eval_rational(q_poly(k0), inst.x1);
        if (q_at_x1 != r.corner_factor * (-inst.k * k0))
            throw std::logic_error("fk_refute_claim1: corner value identity failed");
        if (sgn(q_at_x1) >= 0) all_negative = false;
        r.grid.emplace_back(k0, q_at_x1);
    }
    r.positive_weight_refuted =
        all_negative && sgn(r.corner_factor) > 0 && sgn(inst.k) > 0;

    r.refuted = r.zero_weight_refuted && r.positive_weight_refuted;
    r.note =
        "weight of (x - x2)(x - x3) forced to diag(0, k0), k0 in [0, 1]; zero case: "
        "determinant negative at the gap midpoint; positive case: determinant negative at x1 "
        "because (x1 - x2)(x1 - x3) > 0 and -k k0 < 0";
    return r;
}

Claim2Outcome fk_refute_claim2_sdp(const FkInstance& inst, const Description& S2, double tol) {
    Claim2Outcome out;
    const MatrixPoly<Gaussian> f =
        inst.exact ? inst.F_exact
                   : family_matrix<Gaussian>(Gaussian(inst.A), Gaussian(inst.B),
                                             Gaussian(inst.C), Gaussian(inst.D_approx));
    TruncatedPreordering t;
    t.S = S2;
    t.n = 2;
    t.d = 2;
    t.mode = TruncMode::Preordering;
    out.report = check_membership(f, t, tol);
    out.refuted = out.report.status == MembershipStatus::NotMemberAtDegree;
    std::ostringstream note;
    note << "degree-2 full-product membership: " << membership_status_name(out.report.status);
    if (out.refuted)
        note << "; verified infeasibility witness produced";
    else if (out.report.status == MembershipStatus::Unknown)
        note << "; failure to confirm the refutation, not a confirmation of membership";
    if (!inst.exact)
        note << "; off-diagonal entry uses the high-precision rational approximation (squared "
                "error "
             << inst.det_residual << ")";
    out.note = note.str();
    return out;
}

/* ------------------------------------------------------------------ */
/* Two unbounded intervals                                             */
/* ------------------------------------------------------------------ */

namespace {

// Exact dyadic rationalization of a float matrix polynomial, hermitized.
MatrixPoly<Gaussian> rationalize_hermitian(const MatrixPoly<CD>& f) {
    MatrixPoly<Gaussian> r = map_matrix_poly<Gaussian>(f, [](const CD& v) {
        return Gaussian(Rational(mpq_class(v.real())), Rational(mpq_class(v.imag())));
    });
    const Poly<Gaussian> half = Poly<Gaussian>::constant(Gaussian(Rational(1, 2)));
    return half * (r + r.adjoint());
}

// Drop trailing coefficients of noise size; the body keeps its noise (it is
// absorbed by the final residual check).
MatrixPoly<CD> trim_trailing(const MatrixPoly<CD>& f, double floor) {
    if (f.is_zero()) return f;
    int d = f.degree();
    auto coeff_norm = [&](int j) {
        double m = 0.0;
        const Mat<CD> c = f.coeff(j);
        for (int i = 0; i < c.rows(); ++i)
            for (int jj = 0; jj < c.cols(); ++jj) m = std::max(m, std::abs(c(i, jj)));
        return m;
    };
    while (d >= 0 && coeff_norm(d) <= floor) --d;
    MatrixPoly<CD> out(f.rows(), f.cols());
    for (int jdeg = 0; jdeg <= d; ++jdeg) out.set_coeff(jdeg, f.coeff(jdeg));
    return out;
}

}  // namespace

TwoUnboundedResult two_unbounded_factorize(const MatrixPoly<Gaussian>& F, const Rational& a,
                                           const Rational& b, double tol) {
    if (!(a < b)) throw std::invalid_argument("two_unbounded_factorize: need a < b");
    if (F.rows() != F.cols() || !F.is_hermitian())
        throw std::invalid_argument("two_unbounded_factorize: F must be square Hermitian");
    const int n = F.rows();

    TwoUnboundedResult res;
    if (F.is_zero()) {
        res.G = MatrixPoly<CD>(n, n);
        res.H = MatrixPoly<CD>(n, n);
        return res;
    }
    const int dF = F.degree();
    if (dF % 2 != 0) throw std::invalid_argument("two_unbounded_factorize: deg F must be even");

    // Affine change x = alpha y + beta maps (-inf, -1] ∪ [1, inf) onto
    // (-inf, a] ∪ [b, inf); coefficient reversal then lands on [-1, 1].
    const Rational alpha = (b - a) / 2, beta = (a + b) / 2;
    const MatrixPoly<Gaussian> shifted = F.affine_substitute(Gaussian(alpha), Gaussian(beta));
    const MatrixPoly<Gaussian> F1 = shifted.reversal(dF);

    TruncatedPreordering t;
    t.S = Description::from_polys(
        {rational_poly({1, 1}), rational_poly({1, -1})});  // 1 + y, 1 - y
    t.n = n;
    t.d = dF;
    t.mode = TruncMode::Preordering;
    res.membership_degree = dF;
    const MembershipReport rep = check_membership(F1, t, tol);
    if (rep.status != MembershipStatus::Member)
        throw std::runtime_error("two_unbounded_factorize: decomposition on [-1, 1] at degree " +
                                 std::to_string(dF) + " not found: " +
                                 membership_status_name(rep.status) +
                                 (rep.note.empty() ? "" : " (" + rep.note + ")"));

    // sigma blocks by exponent tuple over {1 + y, 1 - y}.
    MatrixPoly<CD> s00(n, n), s10(n, n), s01(n, n), s11(n, n);
    for (const CertificateBlock& blk : rep.certificate.blocks) {
        const Eigen::MatrixXcd q = 0.5 * (blk.gram + blk.gram.adjoint());
        const MatrixPoly<CD> sigma = gram_to_sigma(q, n);
        if (blk.e == std::vector<int>{0, 0})
            s00 = s00 + sigma;
        else if (blk.e == std::vector<int>{1, 0})
            s10 = s10 + sigma;
        else if (blk.e == std::vector<int>{0, 1})
            s01 = s01 + sigma;
        else if (blk.e == std::vector<int>{1, 1})
            s11 = s11 + sigma;
        else
            throw std::logic_error("two_unbounded_factorize: unexpected exponent tuple");
    }

    // Fold the linear weights: 1 ± y = ((1 ± y)^2 + (1 + y)(1 - y)) / 2, so
    //   F1 = tau0 + tau1 (1 + y)(1 - y),
    //   tau0 = sigma00 + (1 + y)^2 sigma10 / 2 + (1 - y)^2 sigma01 / 2,
    //   tau1 = sigma11 + (sigma10 + sigma01) / 2,
    // both PSD on all of R.
    const Poly<CD> gp(std::vector<CD>{1.0, 1.0}), gm(std::vector<CD>{1.0, -1.0});
    const Poly<CD> half_c = Poly<CD>::constant(CD(0.5));
    const MatrixPoly<CD> tau0 = s00 + half_c * (gp * gp) * s10 + half_c * (gm * gm) * s01;
    const MatrixPoly<CD> tau1 = s11 + half_c * (s10 + s01);

    const double scale = 1.0 + matrix_poly_max_norm(to_float(F));
    const double floor = 1e-7 * scale;

    // Spectral factor of a PSD-on-R piece, reversed to x^D * (.)(1/x).
    auto spectral_reversed = [&](const MatrixPoly<CD>& tau, int D) -> MatrixPoly<CD> {
        const MatrixPoly<CD> trimmed = trim_trailing(tau, floor);
        if (trimmed.is_zero()) return MatrixPoly<CD>(n, n);
        if (trimmed.degree() % 2 != 0)
            throw std::runtime_error(
                "two_unbounded_factorize: odd-degree piece after noise trim");
        if (trimmed.degree() / 2 > D)
            throw std::runtime_error("two_unbounded_factorize: factor degree exceeds its bound");
        const FejerRieszResult fr = fejer_riesz(rationalize_hermitian(trimmed), tol);
        return fr.factor.reversal(D);
    };

    const MatrixPoly<CD> g_rev = spectral_reversed(tau0, dF / 2);
    const MatrixPoly<CD> h_rev =
        dF < 2 ? MatrixPoly<CD>(n, n) : spectral_reversed(tau1, dF / 2 - 1);

    // Back through the affine change; the weight transforms by
    // (y^2 - 1) = (x - a)(x - b) / alpha^2, so H picks up a factor 1/alpha.
    const double alpha_d = to_double(alpha), beta_d = to_double(beta);
    const CD inv_alpha(1.0 / alpha_d), shift(-beta_d / alpha_d);
    res.G = g_rev.affine_substitute(inv_alpha, shift);
    res.H = Poly<CD>::constant(inv_alpha) * h_rev.affine_substitute(inv_alpha, shift);

    const Poly<CD> weight(std::vector<CD>{CD(to_double(a * b)), CD(to_double(-(a + b))), 1.0});
    const MatrixPoly<CD> recomposed =
        res.G.adjoint() * res.G + weight * (res.H.adjoint() * res.H);
    res.residual = matrix_poly_max_norm(to_float(F) - recomposed);
    if (res.residual > 1e-6 * scale)
        throw std::runtime_error("two_unbounded_factorize: residual " +
                                 std::to_string(res.residual) + " exceeds tolerance");
    return res;
}

}  // namespace psdg
