#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "psdg/counterexamples.hpp"
#include "test_util.hpp"

using namespace psdg;
using psdg_test::rand_gaussian;
using psdg_test::rand_rational;
using psdg_test::rng;

using CD = std::complex<double>;

namespace {

Poly<Rational> rpoly(std::vector<Rational> coeffs) { return Poly<Rational>(std::move(coeffs)); }

Gaussian g(const Rational& re) { return Gaussian(re); }

Poly<Gaussian> gpoly(std::vector<Rational> coeffs) {
    std::vector<Gaussian> c;
    for (auto& v : coeffs) c.emplace_back(v);
    return Poly<Gaussian>(std::move(c));
}

Rational q(long num, long den = 1) { return make_rational(num, den); }

// Smallest eigenvalue of a 2 x 2 Hermitian matrix.
double eigmin2(const Mat<CD>& m) {
    const double p = m(0, 0).real(), r = m(1, 1).real();
    const double off = std::abs(m(0, 1));
    const double mid = (p + r) / 2, rad = std::hypot((p - r) / 2, off);
    return mid - rad;
}

// Parse "d.ffff...e<exp>" back to an exact rational.
Rational parse_decimal(const std::string& s) {
    const size_t epos = s.find('e');
    REQUIRE(epos != std::string::npos);
    const std::string mant = s.substr(0, epos);
    const long expo = std::stol(s.substr(epos + 1));
    std::string digits;
    long frac_len = 0;
    bool seen_dot = false;
    for (char c : mant) {
        if (c == '.') {
            seen_dot = true;
            continue;
        }
        digits.push_back(c);
        if (seen_dot) ++frac_len;
    }
    mpz_class num(digits, 10);
    Rational val(num);
    mpz_class ten10 = 1;
    for (long i = 0; i < frac_len; ++i) ten10 *= 10;
    val /= Rational(ten10);
    mpz_class p10 = 1;
    for (long i = 0; i < std::labs(expo); ++i) p10 *= 10;
    if (expo >= 0)
        val *= Rational(p10);
    else
        val /= Rational(p10);
    return val;
}

MatrixPoly<Gaussian> scalar_gaussian(const Poly<Gaussian>& p) { return MatrixPoly<Gaussian>::scalar(p, 1); }

// Random parameters with the three conditions guaranteed (k large).
FkInstance random_instance() {
    for (;;) {
        Rational a = rand_rational(), b = rand_rational(), c = rand_rational();
        std::vector<Rational> xs{a, b, c};
        std::sort(xs.begin(), xs.end());
        if (xs[0] == xs[1] || xs[1] == xs[2]) continue;
        Rational k = 20 + rand_rational() * rand_rational();
        const FkConditions cond = fk_conditions(xs[0], xs[1], xs[2], k);
        if (!cond.all()) continue;
        return fk_build(xs[0], xs[1], xs[2], k);
    }
}

}  // namespace

TEST_CASE("fk_conditions on the reference parameters") {
    const FkConditions c = fk_conditions(q(0), q(1), q(2), q(1));
    CHECK(c.k_positive);
    CHECK(c.dsq_positive);
    CHECK(c.vertex_positive);
    CHECK(c.all());
    CHECK(c.dsq == q(6));
    CHECK(c.vertex_value == q(2));

    const FkConditions z = fk_conditions(q(0), q(1), q(2), q(0));
    CHECK_FALSE(z.k_positive);
    CHECK_FALSE(z.all());

    const FkConditions big = fk_conditions(q(0), q(1), q(2), q(1000000));
    CHECK(big.all());

    CHECK_THROWS_AS(fk_conditions(q(0), q(2), q(1), q(1)), std::invalid_argument);
    CHECK_THROWS_AS(fk_conditions(q(0), q(0), q(1), q(1)), std::invalid_argument);
}

TEST_CASE("fk_build on the irrational reference instance") {
    const FkInstance inst = fk_build(q(0), q(1), q(2), q(1));
    CHECK(inst.A == q(1));
    CHECK(inst.B == q(-4));
    CHECK(inst.C == q(6));
    CHECK(inst.Dsq == q(6));
    CHECK_FALSE(inst.exact);

    // Float view [[x + 1, sqrt 6], [sqrt 6, x^2 - 4x + 6]].
    REQUIRE(inst.F.rows() == 2);
    REQUIRE(inst.F.degree() == 2);
    CHECK(inst.F.coeff(0)(0, 0) == CD(1.0));
    CHECK(inst.F.coeff(1)(0, 0) == CD(1.0));
    CHECK(inst.F.coeff(0)(1, 1) == CD(6.0));
    CHECK(inst.F.coeff(1)(1, 1) == CD(-4.0));
    CHECK(inst.F.coeff(2)(1, 1) == CD(1.0));
    CHECK(std::abs(inst.F.coeff(0)(0, 1) - CD(std::sqrt(6.0))) <= 1e-15);
    CHECK(inst.F.coeff(0)(0, 1) == inst.F.coeff(0)(1, 0));

    // >= 30 significant digits of sqrt(6), verified by squaring the parsed value.
    CHECK(inst.D_decimal.rfind("2.449489742783178", 0) == 0);
    CHECK(inst.D_decimal.find('e') >= 31);
    const Rational parsed = parse_decimal(inst.D_decimal);
    Rational err = parsed * parsed - q(6);
    if (sgn(err) < 0) err = -err;
    CHECK(err < make_rational(1, 1000000) / Rational(mpz_class("1000000000000000000000000")));

    // High-precision determinant residual: only the constant coefficient can
    // differ, by Dsq - D_approx^2.
    CHECK(inst.det_residual > 0.0);
    CHECK(inst.det_residual <= 1e-20);
    Rational exact_res = inst.Dsq - inst.D_approx * inst.D_approx;
    if (sgn(exact_res) < 0) exact_res = -exact_res;
    CHECK(to_double(exact_res) == inst.det_residual);

    // PSD spot checks on K = [0, 1] ∪ [2, inf).
    for (double x : {0.0, 1.0, 2.0, 5.0}) CHECK(eigmin2(inst.F.evaluate(CD(x))) >= -1e-15);
    // ... and genuinely indefinite in the gap.
    CHECK(eigmin2(inst.F.evaluate(CD(1.5))) < -1e-3);

    CHECK_THROWS_AS(fk_build(q(0), q(1), q(2), q(0)), std::invalid_argument);
    CHECK_THROWS_AS(fk_build(q(0), q(1), q(2), q(-2)), std::invalid_argument);
}

TEST_CASE("fk_build exact instance with rational square root") {
    const FkInstance inst = fk_build(q(0), q(1, 8), q(17, 8), q(1));
    REQUIRE(inst.exact);
    CHECK(inst.D_exact == q(15, 8));
    CHECK(inst.D_approx == q(15, 8));
    CHECK(inst.Dsq == q(225, 64));
    CHECK(inst.det_residual == 0.0);
    CHECK(inst.D_decimal.rfind("1.8750000", 0) == 0);

    // Exact matrix [[x + 1, 15/8], [15/8, x^2 - 13/4 x + 225/64]].
    Mat<Gaussian> c0(2, 2), c1(2, 2), c2(2, 2);
    c0(0, 0) = g(q(1));
    c0(0, 1) = g(q(15, 8));
    c0(1, 0) = g(q(15, 8));
    c0(1, 1) = g(q(225, 64));
    c1(0, 0) = g(q(1));
    c1(1, 1) = g(q(-13, 4));
    c2(1, 1) = g(q(1));
    const MatrixPoly<Gaussian> expected(std::vector<Mat<Gaussian>>{c0, c1, c2});
    CHECK(inst.F_exact == expected);

    // Exact determinant identity det F = x (x - 1/8)(x - 17/8).
    const Poly<Gaussian> det = inst.F_exact.determinant();
    CHECK(det == gpoly({q(0), q(17, 64), q(-9, 4), q(1)}));
}

TEST_CASE("fk_search_exact_k scans denominators then numerators") {
    const auto hit = fk_search_exact_k(q(0), q(1, 8), q(17, 8), 4, 4);
    REQUIRE(hit.has_value());
    CHECK(*hit == q(1));

    // k(k + 1)(k + 2) is never a rational square for small p/q.
    CHECK_FALSE(fk_search_exact_k(q(0), q(1), q(2), 8, 8).has_value());

    CHECK_THROWS_AS(fk_search_exact_k(q(0), q(2), q(1), 4, 4), std::invalid_argument);
    CHECK_THROWS_AS(fk_search_exact_k(q(0), q(1), q(2), 0, 4), std::invalid_argument);
}

TEST_CASE("family identities hold for randomized valid parameters") {
    int built = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const FkInstance inst = random_instance();
        ++built;
        CHECK(inst.A == inst.k - inst.x1);
        CHECK(inst.B == -inst.k - inst.x2 - inst.x3);
        CHECK(inst.C ==
              inst.k * inst.k + inst.k * (-inst.x1 + inst.x2 + inst.x3) + inst.x2 * inst.x3);
        // Two routes to Dsq agree: A C + x1 x2 x3 and the expanded cubic.
        const FkConditions cond = fk_conditions(inst.x1, inst.x2, inst.x3, inst.k);
        CHECK(inst.Dsq == inst.A * inst.C + inst.x1 * inst.x2 * inst.x3);
        CHECK(inst.Dsq == cond.dsq);
        // Vertex value via completing the square.
        CHECK(cond.vertex_value == inst.C - inst.B * inst.B / 4);
        // The symbolic determinant identity (uses only Dsq, no square root).
        const Poly<Rational> det_sym =
            rpoly({inst.A, q(1)}) * rpoly({inst.C, inst.B, q(1)}) -
            Poly<Rational>::constant(inst.Dsq);
        const Poly<Rational> target =
            rpoly({-inst.x1, q(1)}) * rpoly({-inst.x2, q(1)}) * rpoly({-inst.x3, q(1)});
        CHECK(det_sym == target);
        if (!inst.exact) CHECK(inst.det_residual <= 1e-20);
    }
    CHECK(built == 60);
}

TEST_CASE("fk_psd_report over the natural positivity set") {
    const FkInstance inst = fk_build(q(0), q(1), q(2), q(1));
    const SemialgSet K = SemialgSet::from_pieces(
        {Piece::interval(q(0), q(1)), Piece::ray_above(q(2))});
    const FkPsdReport rep = fk_psd_report(inst, K);
    CHECK(rep.all_pass);
    CHECK(rep.top_left.pass);
    CHECK(rep.bottom_right.pass);
    CHECK(rep.determinant.pass);

    // Top-left samples: x + 1 at the finite endpoints.
    REQUIRE(rep.top_left.points.size() == 3);
    CHECK(rep.top_left.points[0] == std::make_pair(q(0), q(1)));
    CHECK(rep.top_left.points[1] == std::make_pair(q(1), q(2)));
    CHECK(rep.top_left.points[2] == std::make_pair(q(2), q(3)));

    // Bottom-right: vertex of x^2 - 4x + 6 at (2, 2).
    REQUIRE(rep.bottom_right.points.size() == 1);
    CHECK(rep.bottom_right.points[0] == std::make_pair(q(2), q(2)));

    // Determinant samples end with the gap midpoint x = 3/2,
    // det = 1.5 * 0.5 * (-0.5) = -3/8.
    REQUIRE(!rep.determinant.points.empty());
    CHECK(rep.determinant.points.back() == std::make_pair(q(3, 2), q(-3, 8)));
    // All in-set samples are nonnegative.
    for (size_t i = 0; i + 1 < rep.determinant.points.size(); ++i)
        CHECK(sgn(rep.determinant.points[i].second) >= 0);
}

TEST_CASE("fk_psd_report flags sets outside the guaranteed region") {
    const FkInstance inst = fk_build(q(0), q(1), q(2), q(1));

    // [0, 3] straddles the gap: the determinant fact fails.
    const SemialgSet box = SemialgSet::from_pieces({Piece::interval(q(0), q(3))});
    const FkPsdReport rep = fk_psd_report(inst, box);
    CHECK(rep.top_left.pass);
    CHECK(rep.bottom_right.pass);
    CHECK_FALSE(rep.determinant.pass);
    CHECK_FALSE(rep.all_pass);

    // Unbounded below: the top-left fact fails.
    const FkPsdReport line = fk_psd_report(inst, SemialgSet::real_line());
    CHECK_FALSE(line.top_left.pass);
    CHECK_FALSE(line.all_pass);

    // K reaching left of x1 - k = -1 fails top-left containment.
    const SemialgSet far_left =
        SemialgSet::from_pieces({Piece::interval(q(-2), q(1)), Piece::ray_above(q(2))});
    CHECK_FALSE(fk_psd_report(inst, far_left).top_left.pass);
}

TEST_CASE("claim 1 refutation on the reference instance") {
    const FkInstance inst = fk_build(q(0), q(1), q(2), q(1));
    const SemialgSet K1 = SemialgSet::from_pieces(
        {Piece::interval(q(0), q(1)), Piece::interval(q(2), q(3)), Piece::ray_above(q(5))});
    const Claim1Refutation r = fk_refute_claim1(inst, K1);
    CHECK(r.refuted);
    CHECK(r.zero_weight_refuted);
    CHECK(r.positive_weight_refuted);
    CHECK(r.midpoint == q(3, 2));
    CHECK(r.q_zero_at_midpoint == q(-3, 8));
    CHECK(r.corner_factor == q(2));
    REQUIRE(r.grid.size() == 8);
    CHECK(r.grid[1] == std::make_pair(q(1, 4), q(-1, 2)));
    CHECK(r.grid[3] == std::make_pair(q(1, 2), q(-1)));
    CHECK(r.grid[7] == std::make_pair(q(1), q(-2)));
    for (const auto& kv : r.grid) CHECK(sgn(kv.second) < 0);

    // Minimal shape [x1, x2] ∪ [x3, inf) is accepted too.
    const SemialgSet minimal =
        SemialgSet::from_pieces({Piece::interval(q(0), q(1)), Piece::ray_above(q(2))});
    CHECK(fk_refute_claim1(inst, minimal).refuted);
}

TEST_CASE("claim 1 rejects sets of the wrong shape") {
    const FkInstance inst = fk_build(q(0), q(1), q(2), q(1));
    // No unbounded ray at the end.
    CHECK_THROWS_AS(fk_refute_claim1(inst, SemialgSet::from_pieces({Piece::interval(q(0), q(1)),
                                                                    Piece::interval(q(2), q(3))})),
                    std::invalid_argument);
    // First piece is not [x1, x2].
    CHECK_THROWS_AS(fk_refute_claim1(inst, SemialgSet::from_pieces({Piece::interval(q(0), q(3, 2)),
                                                                    Piece::ray_above(q(2))})),
                    std::invalid_argument);
    // Second piece does not start at x3.
    CHECK_THROWS_AS(fk_refute_claim1(inst, SemialgSet::from_pieces({Piece::interval(q(0), q(1)),
                                                                    Piece::ray_above(q(3))})),
                    std::invalid_argument);
    // A single ray.
    CHECK_THROWS_AS(fk_refute_claim1(inst, SemialgSet::from_pieces({Piece::ray_above(q(0))})),
                    std::invalid_argument);
}

TEST_CASE("claim 1 determinant matches the numeric matrix") {
    // Independent route: evaluate det(F - diag(0, k0)(x - x2)(x - x3))
    // numerically from the float matrix and compare with the exact product.
    const FkInstance inst = fk_build(q(0), q(1), q(2), q(1));
    const double k0 = 0.5;
    for (double x : {0.0, 1.7, 3.0}) {
        Mat<CD> m = inst.F.evaluate(CD(x));
        m(1, 1) -= CD(k0 * (x - 1.0) * (x - 2.0));
        const CD det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        const double expected = (x - 1.0) * (x - 2.0) * (x * (1 - k0) - k0);
        CHECK(std::abs(det - CD(expected)) <= 1e-9);
    }
}

TEST_CASE("claim 1 sign facts hold for randomized instances") {
    for (int trial = 0; trial < 40; ++trial) {
        const FkInstance inst = random_instance();
        const SemialgSet K1 = SemialgSet::from_pieces(
            {Piece::interval(inst.x1, inst.x2), Piece::ray_above(inst.x3)});
        const Claim1Refutation r = fk_refute_claim1(inst, K1);
        CHECK(r.refuted);
        CHECK(sgn(r.q_zero_at_midpoint) < 0);
        CHECK(sgn(r.corner_factor) > 0);
    }
}

TEST_CASE("claim 2 SDP refutation over the point-augmented set") {
    const FkInstance inst = fk_build(q(0), q(1), q(2), q(1));
    const SemialgSet K2 = SemialgSet::from_pieces(
        {Piece::interval(q(0), q(1)), Piece::point(q(2)), Piece::point(q(3))});
    const Description S2 = natural_description(K2);
    REQUIRE(S2.generators.size() == 4);

    const Claim2Outcome out = fk_refute_claim2_sdp(inst, S2, 1e-8);
    CHECK(out.refuted);
    CHECK(out.report.status == MembershipStatus::NotMemberAtDegree);
    CHECK(!out.report.witness.empty());

    // The zero polynomial is trivially inside the same truncated cone.
    TruncatedPreordering t;
    t.S = S2;
    t.n = 2;
    t.d = 2;
    t.mode = TruncMode::Preordering;
    const MembershipReport zero = check_membership(MatrixPoly<Gaussian>(2, 2), t, 1e-8);
    CHECK(zero.status == MembershipStatus::Member);
}

TEST_CASE("claim 2 refutation for an exact instance") {
    const FkInstance inst = fk_build(q(0), q(1, 8), q(17, 8), q(1));
    REQUIRE(inst.exact);
    const SemialgSet K2 = SemialgSet::from_pieces(
        {Piece::interval(q(0), q(1, 8)), Piece::point(q(17, 8)), Piece::point(q(3))});
    const Description S2 = natural_description(K2);
    REQUIRE(S2.generators.size() == 4);
    const Claim2Outcome out = fk_refute_claim2_sdp(inst, S2, 1e-8);
    CHECK(out.refuted);
}

TEST_CASE("claim 2 negative control: enlarged interval") {
    // F is not even PSD on [0, 3], so membership must not be confirmed.
    const FkInstance inst = fk_build(q(0), q(1), q(2), q(1));
    const Description S2 =
        natural_description(SemialgSet::from_pieces({Piece::interval(q(0), q(3))}));
    const Claim2Outcome out = fk_refute_claim2_sdp(inst, S2, 1e-8);
    CHECK(out.report.status != MembershipStatus::Member);
    CHECK_FALSE(out.report.status == MembershipStatus::Member);
}

TEST_CASE("two_unbounded_factorize recovers the generator itself") {
    // F = (x - a)(x - b) as a 1 x 1 matrix: G = 0, H = 1 up to phase.
    const Rational a = q(0), b = q(3);
    const MatrixPoly<Gaussian> F = scalar_gaussian(gpoly({q(0), q(-3), q(1)}));
    const TwoUnboundedResult res = two_unbounded_factorize(F, a, b);
    CHECK(res.residual <= 1e-6);
    CHECK(res.membership_degree == 2);
    CHECK(matrix_poly_max_norm(res.G) <= 1e-2);
    CHECK(res.H.degree() <= 0);
    const MatrixPoly<CD> hh = res.H.adjoint() * res.H;
    CHECK(std::abs(hh.coeff(0)(0, 0) - CD(1.0)) <= 1e-4);
}

TEST_CASE("two_unbounded_factorize of a constant identity") {
    const MatrixPoly<Gaussian> F = MatrixPoly<Gaussian>::identity(2);
    const TwoUnboundedResult res = two_unbounded_factorize(F, q(-1), q(1));
    CHECK(res.residual <= 1e-6);
    CHECK(res.membership_degree == 0);
    CHECK(res.H.is_zero());
    const MatrixPoly<CD> gg = res.G.adjoint() * res.G;
    REQUIRE(gg.degree() <= 0);
    CHECK(std::abs(gg.coeff(0)(0, 0) - CD(1.0)) <= 1e-6);
    CHECK(std::abs(gg.coeff(0)(1, 1) - CD(1.0)) <= 1e-6);
    CHECK(std::abs(gg.coeff(0)(0, 1)) <= 1e-6);
}

TEST_CASE("two_unbounded_factorize of (x^2 - 1)(I + vv*)") {
    // v = (1, 2): I + vv* = [[2, 2], [2, 5]].
    Mat<Gaussian> m(2, 2);
    m(0, 0) = g(q(2));
    m(0, 1) = g(q(2));
    m(1, 0) = g(q(2));
    m(1, 1) = g(q(5));
    const MatrixPoly<Gaussian> F = gpoly({q(-1), q(0), q(1)}) * MatrixPoly<Gaussian>::constant(m);
    const TwoUnboundedResult res = two_unbounded_factorize(F, q(-1), q(1));
    CHECK(res.residual <= 1e-6);
    CHECK(res.G.degree() <= 1);
    CHECK(res.H.degree() <= 0);
    const MatrixPoly<CD> hh = res.H.adjoint() * res.H;
    REQUIRE(hh.degree() <= 0);
    CHECK(std::abs(hh.coeff(0)(0, 0) - CD(2.0)) <= 1e-4);
    CHECK(std::abs(hh.coeff(0)(0, 1) - CD(2.0)) <= 1e-4);
    CHECK(std::abs(hh.coeff(0)(1, 1) - CD(5.0)) <= 1e-4);
}

TEST_CASE("two_unbounded_factorize on random constructed positive inputs") {
    const Rational a = q(-2), b = q(1);
    const Poly<Gaussian> weight = gpoly({a * b, -(a + b), q(1)});
    for (int trial = 0; trial < 3; ++trial) {
        // G0 of degree exactly 2 (leading identity), H0 of degree <= 1.
        MatrixPoly<Gaussian> G0 = psdg_test::rand_matrix_poly(2, 1);
        MatrixPoly<Gaussian> x2id(2, 2);
        x2id.set_coeff(2, Mat<Gaussian>::identity(2));
        G0 = G0 + x2id;
        const MatrixPoly<Gaussian> H0 = psdg_test::rand_matrix_poly(2, 1);
        const MatrixPoly<Gaussian> F =
            G0.adjoint() * G0 + weight * (H0.adjoint() * H0);
        REQUIRE(F.is_hermitian());
        REQUIRE(F.degree() == 4);

        const TwoUnboundedResult res = two_unbounded_factorize(F, a, b);
        const double scale = 1.0 + matrix_poly_max_norm(to_float(F));
        CHECK(res.residual <= 1e-6 * scale);
        CHECK(res.membership_degree == 4);
        CHECK(res.G.degree() <= 2);
        CHECK(res.H.degree() <= 1);
    }
}

TEST_CASE("two_unbounded_factorize input validation") {
    const MatrixPoly<Gaussian> id = MatrixPoly<Gaussian>::identity(2);
    CHECK_THROWS_AS(two_unbounded_factorize(id, q(1), q(1)), std::invalid_argument);
    CHECK_THROWS_AS(two_unbounded_factorize(id, q(2), q(1)), std::invalid_argument);

    // Odd degree.
    const MatrixPoly<Gaussian> odd = scalar_gaussian(gpoly({q(0), q(1)}));
    CHECK_THROWS_AS(two_unbounded_factorize(odd, q(-1), q(1)), std::invalid_argument);

    // Non-Hermitian.
    Mat<Gaussian> nh(2, 2);
    nh(0, 1) = g(q(1));
    CHECK_THROWS_AS(two_unbounded_factorize(MatrixPoly<Gaussian>::constant(nh), q(-1), q(1)),
                    std::invalid_argument);

    // Not PSD on the two rays: the decomposition step must fail loudly.
    MatrixPoly<Gaussian> neg(2, 2);
    Mat<Gaussian> mneg(2, 2);
    mneg(0, 0) = g(q(-1));
    mneg(1, 1) = g(q(-1));
    neg.set_coeff(0, mneg);
    CHECK_THROWS_AS(two_unbounded_factorize(neg, q(-1), q(1)), std::runtime_error);

    // Zero input splits trivially.
    const TwoUnboundedResult z = two_unbounded_factorize(MatrixPoly<Gaussian>(2, 2), q(-1), q(1));
    CHECK(z.residual == 0.0);
    CHECK(z.G.is_zero());
    CHECK(z.H.is_zero());
}
