#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <vector>

#include "psdg/reduction.hpp"
#include "test_util.hpp"

using namespace psdg;
using psdg_test::rand_gaussian;
using psdg_test::rand_hermitian_matrix_poly;
using psdg_test::rand_rational;
using psdg_test::rng;

namespace {

Poly<Rational> rpoly(std::vector<long> coeffs) {
    std::vector<Rational> c;
    for (long v : coeffs) c.emplace_back(v);
    return Poly<Rational>(std::move(c));
}

Poly<Gaussian> gpoly(std::vector<long> coeffs) {
    std::vector<Gaussian> c;
    for (long v : coeffs) c.emplace_back(Rational(v), Rational(0));
    return Poly<Gaussian>(std::move(c));
}

Gaussian g(long re, long im = 0) { return Gaussian(Rational(re), Rational(im)); }

MatrixPoly<QuadGaussian> lift(const MatrixPoly<Gaussian>& f) {
    return map_matrix_poly<QuadGaussian>(f, [](const Gaussian& v) { return lift_to_quad(v); });
}

Poly<QuadGaussian> lift(const Poly<Gaussian>& p) {
    return map_poly<QuadGaussian>(p, [](const Gaussian& v) { return lift_to_quad(v); });
}

// diag(d, D) assembled entrywise.
MatrixPoly<Gaussian> diag2(const Poly<Gaussian>& d, const MatrixPoly<Gaussian>& D) {
    const int n = D.rows() + 1;
    MatrixPoly<Gaussian> out(n, n);
    int deg = d.is_zero() ? 0 : d.degree();
    if (!D.is_zero()) deg = std::max(deg, D.degree());
    for (int k = 0; k <= deg; ++k) {
        Mat<Gaussian> mk(n, n);
        mk(0, 0) = d.coeff(k);
        if (!D.is_zero() && k <= D.degree())
            for (int i = 0; i < n - 1; ++i)
                for (int j = 0; j < n - 1; ++j) mk(i + 1, j + 1) = D.coeff(k)(i, j);
        out.set_coeff(k, mk);
    }
    return out;
}

// the description {x >= 0, 1 - x >= 0} of [0, 1] and the set itself
Description unit_interval_desc() { return Description::from_polys({rpoly({0, 1}), rpoly({1, -1})}); }

const Gaussian kZero = Gaussian(Rational(0), Rational(0));

}  // namespace

/* ------------------------------------------------------------------ */
/* pivot_unitaries                                                      */
/* ------------------------------------------------------------------ */

TEST_CASE("pivot unitaries are exactly unitary for all index pairs") {
    for (int n = 1; n <= 6; ++n)
        for (int k = 1; k <= n; ++k)
            for (int l = k; l <= n; ++l) {
                PivotUnitaries uv = pivot_unitaries(n, k, l);
                Mat<QuadGaussian> id = Mat<QuadGaussian>::identity(n);
                CHECK(uv.U * uv.U.adjoint() == id);
                CHECK(uv.U.adjoint() * uv.U == id);
                CHECK(uv.V * uv.V.adjoint() == id);
                CHECK(uv.V.adjoint() * uv.V == id);
            }
}

TEST_CASE("pivot unitaries: diagonal case is a row swap") {
    PivotUnitaries uv = pivot_unitaries(2, 1, 1);
    CHECK(uv.U == Mat<QuadGaussian>::identity(2));
    CHECK(uv.V == Mat<QuadGaussian>::identity(2));

    PivotUnitaries uv3 = pivot_unitaries(3, 2, 2);
    Mat<QuadGaussian> p(3, 3);
    p(0, 1) = QuadGaussian(Quad(1), Quad(0));
    p(1, 0) = QuadGaussian(Quad(1), Quad(0));
    p(2, 2) = QuadGaussian(Quad(1), Quad(0));
    CHECK(uv3.U == p);
    CHECK(uv3.V == p);
}

TEST_CASE("pivot unitaries: explicit 2x2 pair form") {
    PivotUnitaries uv = pivot_unitaries(2, 1, 2);
    const Quad h = Quad(1) / Quad::sqrt2();
    CHECK(uv.U(0, 0) == QuadGaussian(h, Quad(0)));
    CHECK(uv.U(0, 1) == QuadGaussian(h, Quad(0)));
    CHECK(uv.U(1, 0) == QuadGaussian(h, Quad(0)));
    CHECK(uv.U(1, 1) == QuadGaussian(-h, Quad(0)));
    CHECK(uv.V(0, 0) == QuadGaussian(h, Quad(0)));
    CHECK(uv.V(0, 1) == QuadGaussian(Quad(0), h));
    CHECK(uv.V(1, 0) == QuadGaussian(h, Quad(0)));
    CHECK(uv.V(1, 1) == QuadGaussian(Quad(0), -h));
}

TEST_CASE("pivot unitaries reject bad indices") {
    CHECK_THROWS_AS(pivot_unitaries(2, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(pivot_unitaries(2, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(pivot_unitaries(2, 1, 3), std::invalid_argument);
}

TEST_CASE("conjugation moves the pair scalars into the top-left corner") {
    // holds for arbitrary square G; mostly Hermitian draws plus a few general ones
    for (int trial = 0; trial < 120; ++trial) {
        std::uniform_int_distribution<int> nd(2, 4);
        const int n = nd(rng());
        MatrixPoly<Gaussian> G = trial % 6 == 5 ? psdg_test::rand_matrix_poly(n, 2)
                                                : rand_hermitian_matrix_poly(n, 2);
        if (G.is_zero()) continue;
        std::uniform_int_distribution<int> kd(1, n);
        int k = kd(rng()), l = kd(rng());
        if (k > l) std::swap(k, l);

        PivotUnitaries uv = pivot_unitaries(n, k, l);
        MatrixPoly<QuadGaussian> gl = lift(G);
        MatrixPoly<QuadGaussian> cu = MatrixPoly<QuadGaussian>::constant(uv.U) * gl *
                                      MatrixPoly<QuadGaussian>::constant(uv.U.adjoint());
        MatrixPoly<QuadGaussian> cv = MatrixPoly<QuadGaussian>::constant(uv.V) * gl *
                                      MatrixPoly<QuadGaussian>::constant(uv.V.adjoint());
        if (k == l) {
            CHECK(cu.entry(0, 0) == lift(G.entry(k - 1, k - 1)));
            CHECK(cv.entry(0, 0) == lift(G.entry(k - 1, k - 1)));
        } else {
            CHECK(cu.entry(0, 0) == lift(pivot_p(G, k, l)));
            CHECK(cv.entry(0, 0) == lift(pivot_r(G, k, l)));
        }
    }
}

/* ------------------------------------------------------------------ */
/* select_pivot                                                         */
/* ------------------------------------------------------------------ */

TEST_CASE("select_pivot: diagonal case") {
    MatrixPoly<Gaussian> G(2, 2);
    Mat<Gaussian> c0(2, 2);
    c0(0, 0) = g(1);
    G.set_coeff(0, c0);
    Mat<Gaussian> c1(2, 2);
    c1(1, 1) = g(1);
    G.set_coeff(1, c1);  // G = diag(1, x)

    PivotData pd = select_pivot(G, kZero);
    CHECK(pd.kase == PivotCase::Diagonal);
    CHECK(pd.k0 == 1);
    CHECK(pd.l0 == 1);
    CHECK(pd.pivot == gpoly({1}));
}

TEST_CASE("select_pivot: symmetric pair case") {
    MatrixPoly<Gaussian> G(2, 2);
    Mat<Gaussian> c0(2, 2);
    c0(0, 1) = g(1);
    c0(1, 0) = g(1);
    G.set_coeff(0, c0);  // [[0, 1], [1, 0]]

    PivotData pd = select_pivot(G, kZero);
    CHECK(pd.kase == PivotCase::PairSym);
    CHECK(pd.k0 == 1);
    CHECK(pd.l0 == 2);
    CHECK(pd.pivot == gpoly({1}));
}

TEST_CASE("select_pivot: skew pair case") {
    MatrixPoly<Gaussian> G(2, 2);
    Mat<Gaussian> c0(2, 2);
    c0(0, 1) = g(0, 1);
    c0(1, 0) = g(0, -1);
    G.set_coeff(0, c0);  // [[0, i], [-i, 0]]

    PivotData pd = select_pivot(G, kZero);
    CHECK(pd.kase == PivotCase::PairSkew);
    CHECK(pd.k0 == 1);
    CHECK(pd.l0 == 2);
    CHECK(pd.pivot == gpoly({1}));
}

TEST_CASE("select_pivot rejects a vanishing evaluation") {
    MatrixPoly<Gaussian> G = Poly<Gaussian>::x() * MatrixPoly<Gaussian>::identity(2);
    CHECK_THROWS_AS(select_pivot(G, kZero), std::invalid_argument);
}

TEST_CASE("select_pivot always lands in one of the three cases") {
    int checked = 0;
    for (int trial = 0; trial < 250; ++trial) {
        std::uniform_int_distribution<int> nd(1, 4);
        const int n = nd(rng());
        MatrixPoly<Gaussian> G = rand_hermitian_matrix_poly(n, 2);
        if (trial % 2 == 0) {
            // adversarial: zero out the whole diagonal so only pair cases apply
            for (int k = 0; k <= (G.is_zero() ? -1 : G.degree()); ++k) {
                Mat<Gaussian> c = G.coeff(k);
                for (int i = 0; i < n; ++i) c(i, i) = Gaussian();
                G.set_coeff(k, c);
            }
        }
        Gaussian x0(rand_rational(), trial % 5 == 0 ? rand_rational() : Rational(0));
        if (G.is_zero() || G.evaluate(x0).is_zero()) continue;
        ++checked;
        PivotData pd;
        CHECK_NOTHROW(pd = select_pivot(G, x0));
        // the selected scalar is nonzero at x0
        Gaussian val;
        for (int k = (pd.pivot.is_zero() ? -1 : pd.pivot.degree()); k >= 0; --k)
            val = val * x0 + pd.pivot.coeff(k);
        CHECK(!val.is_zero());
    }
    CHECK(checked > 100);
}

/* ------------------------------------------------------------------ */
/* schur_split                                                          */
/* ------------------------------------------------------------------ */

TEST_CASE("schur_split on block examples") {
    // diag(1, x): a = 1, beta = 0, C = x
    MatrixPoly<Gaussian> F(2, 2);
    Mat<Gaussian> c0(2, 2);
    c0(0, 0) = g(1);
    F.set_coeff(0, c0);
    Mat<Gaussian> c1(2, 2);
    c1(1, 1) = g(1);
    F.set_coeff(1, c1);

    SchurSplit sp = schur_split(F);
    CHECK(sp.d == gpoly({1}));
    CHECK(sp.D.entry(0, 0) == gpoly({0, 1}));
    CHECK(sp.L_plus == MatrixPoly<Gaussian>::identity(2));

    // [[x, 1], [1, x]]: a = x, beta = 1, C = x -> d = x^3, D = x^3 - x
    MatrixPoly<Gaussian> F2(2, 2);
    Mat<Gaussian> d0(2, 2);
    d0(0, 1) = g(1);
    d0(1, 0) = g(1);
    F2.set_coeff(0, d0);
    Mat<Gaussian> d1(2, 2);
    d1(0, 0) = g(1);
    d1(1, 1) = g(1);
    F2.set_coeff(1, d1);

    SchurSplit sp2 = schur_split(F2);
    CHECK(sp2.d == gpoly({0, 0, 0, 1}));
    CHECK(sp2.D.entry(0, 0) == gpoly({0, -1, 0, 1}));
}

TEST_CASE("schur_split congruence identities hold exactly on random input") {
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> nd(2, 4);
        const int n = nd(rng());
        MatrixPoly<Gaussian> F = rand_hermitian_matrix_poly(n, 4);
        if (F.is_zero()) continue;
        SchurSplit sp = schur_split(F);  // internal exact checks would throw

        // re-verify identity (i) independently of the implementation
        Poly<Gaussian> a = F.entry(0, 0);
        Poly<Gaussian> a4 = (a * a) * (a * a);
        MatrixPoly<Gaussian> mid = diag2(sp.d, sp.D);
        CHECK((a4 * F - sp.L_plus.adjoint() * mid * sp.L_plus).is_zero());
        CHECK((mid - sp.L_minus.adjoint() * F * sp.L_minus).is_zero());
    }
}

TEST_CASE("schur_split rejects a complex top-left entry") {
    MatrixPoly<Gaussian> F(2, 2);
    Mat<Gaussian> c0(2, 2);
    c0(0, 0) = g(0, 1);
    c0(1, 1) = g(1);
    F.set_coeff(0, c0);
    // not Hermitian either; hermiticity is checked first
    CHECK_THROWS_AS(schur_split(F), std::invalid_argument);
}

/* ------------------------------------------------------------------ */
/* factor_out_root                                                      */
/* ------------------------------------------------------------------ */

TEST_CASE("factor_out_root extracts the full power at a real point") {
    MatrixPoly<Gaussian> F =
        (Poly<Gaussian>::x() * Poly<Gaussian>::x()) * MatrixPoly<Gaussian>::identity(2);
    RootFactor rf = factor_out_root(F, kZero);
    CHECK(rf.c == gpoly({0, 1}));
    CHECK(rf.m == 2);
    CHECK(rf.G == MatrixPoly<Gaussian>::identity(2));
}

TEST_CASE("factor_out_root at a complex point divides by the real quadratic") {
    MatrixPoly<Gaussian> F = gpoly({1, 0, 1}) * MatrixPoly<Gaussian>::identity(2);
    RootFactor rf = factor_out_root(F, g(0, 1));  // x0 = i
    CHECK(rf.c == gpoly({1, 0, 1}));              // (x - i)(x + i) = x^2 + 1
    CHECK(rf.m == 1);
    CHECK(rf.G == MatrixPoly<Gaussian>::identity(2));
}

TEST_CASE("factor_out_root with no root present returns m = 0") {
    MatrixPoly<Gaussian> F = MatrixPoly<Gaussian>::identity(3);
    RootFactor rf = factor_out_root(F, kZero);
    CHECK(rf.m == 0);
    CHECK(rf.G == F);
    CHECK_THROWS_AS(factor_out_root(MatrixPoly<Gaussian>(2, 2), kZero), std::invalid_argument);
}

TEST_CASE("factor_out_root recombines to the input") {
    for (int trial = 0; trial < 30; ++trial) {
        std::uniform_int_distribution<int> nd(1, 3);
        const int n = nd(rng());
        MatrixPoly<Gaussian> G0 = rand_hermitian_matrix_poly(n, 2);
        if (G0.is_zero()) continue;
        Gaussian x0(rand_rational(), trial % 4 == 0 ? Rational(1) : Rational(0));
        std::uniform_int_distribution<int> md(0, 2);
        const int m = md(rng());

        Poly<Gaussian> c = sgn(x0.im) == 0
                               ? Poly<Gaussian>(std::vector<Gaussian>{-x0, g(1)})
                               : Poly<Gaussian>(std::vector<Gaussian>{
                                     Gaussian(x0.re * x0.re + x0.im * x0.im, Rational(0)),
                                     Gaussian(Rational(-2) * x0.re, Rational(0)), g(1)});
        MatrixPoly<Gaussian> F = c.pow(m) * G0;
        RootFactor rf = factor_out_root(F, x0);
        CHECK(rf.c == c);
        CHECK(rf.c.pow(rf.m) * rf.G == F);
        CHECK(!rf.G.evaluate(x0).is_zero());
        CHECK(rf.m >= m);  // G0 itself may contribute extra factors
    }
}

/* ------------------------------------------------------------------ */
/* default_scalar_oracle                                                */
/* ------------------------------------------------------------------ */

TEST_CASE("default scalar oracle certifies membership after degree bumps") {
    Description S = unit_interval_desc();
    ScalarOracle oracle = default_scalar_oracle(S);

    // x(1-x) needs degree 3 (odd), reached at the first bump
    MembershipReport rep = oracle(gpoly({0, 1, -1}));
    CHECK(rep.status == MembershipStatus::Member);

    MembershipReport neg = oracle(gpoly({-1}));
    CHECK(neg.status != MembershipStatus::Member);
}

/* ------------------------------------------------------------------ */
/* h2f_reduce                                                           */
/* ------------------------------------------------------------------ */

TEST_CASE("h2f_reduce on diag(x, 1-x) over [0, 1] at x0 = 0") {
    MatrixPoly<Gaussian> F(2, 2);
    Mat<Gaussian> c0(2, 2);
    c0(1, 1) = g(1);
    F.set_coeff(0, c0);
    Mat<Gaussian> c1(2, 2);
    c1(0, 0) = g(1);
    c1(1, 1) = g(-1);
    F.set_coeff(1, c1);  // diag(x, 1 - x)

    Description S = unit_interval_desc();
    SemialgSet K = realize(S);
    CertificatePlan plan = h2f_reduce(F, K, S, kZero);

    CHECK(plan.h == gpoly({1, -2, 1}));  // (1 - x)^2
    REQUIRE(plan.levels.size() == 1);
    const ReductionLevel& lvl = plan.levels[0];
    CHECK(lvl.size == 2);
    CHECK(lvl.m == 0);
    CHECK(lvl.pivot.kase == PivotCase::Diagonal);
    CHECK(lvl.pivot.k0 == 2);
    CHECK(lvl.pivot_scalar == gpoly({1, -1}));
    CHECK(lvl.d == gpoly({1, -3, 3, -1}));           // (1 - x)^3
    CHECK(lvl.D.entry(0, 0) == gpoly({0, 1, -2, 1}));  // x (1 - x)^2

    CHECK(plan.target == Poly<Gaussian>(plan.h * plan.h) * F);
    const double scale = 16.0;  // max coefficient of h^2 F is below this
    CHECK(verify_certificate(plan.target, plan.cone, plan.certificate, 1e-6 * (1.0 + scale)));
    CHECK(plan.certificate.residual <= 1e-6 * (1.0 + scale));
}

TEST_CASE("h2f_reduce factors out the root power first") {
    MatrixPoly<Gaussian> F(2, 2);
    Mat<Gaussian> c0(2, 2);
    c0(1, 1) = g(1);
    F.set_coeff(0, c0);
    Mat<Gaussian> c1(2, 2);
    c1(0, 0) = g(1);
    c1(1, 1) = g(-1);
    F.set_coeff(1, c1);
    F = (Poly<Gaussian>::x() * Poly<Gaussian>::x()) * F;  // x^2 diag(x, 1 - x)

    Description S = unit_interval_desc();
    SemialgSet K = realize(S);
    CertificatePlan plan = h2f_reduce(F, K, S, kZero);

    REQUIRE(plan.levels.size() == 1);
    CHECK(plan.levels[0].m == 2);
    CHECK(plan.levels[0].c == gpoly({0, 1}));
    CHECK(plan.h == gpoly({1, -2, 1}));  // same multiplier as without the x^2
    CHECK(plan.levels[0].d == gpoly({1, -3, 3, -1}) * gpoly({0, 0, 1}));
}

TEST_CASE("h2f_reduce with a complex base point needs no multiplier") {
    MatrixPoly<Gaussian> F = gpoly({1, 0, 1}) * MatrixPoly<Gaussian>::identity(2);
    Description S = unit_interval_desc();
    SemialgSet K = realize(S);
    CertificatePlan plan = h2f_reduce(F, K, S, g(0, 1));  // x0 = i

    CHECK(plan.h == gpoly({1}));
    REQUIRE(plan.levels.size() == 1);
    CHECK(plan.levels[0].m == 1);
    CHECK(plan.levels[0].c == gpoly({1, 0, 1}));
    CHECK(plan.levels[0].pivot.kase == PivotCase::Diagonal);
    CHECK(plan.levels[0].pivot.k0 == 1);
}

TEST_CASE("h2f_reduce base cases: scalar input and the zero polynomial") {
    Description S = unit_interval_desc();
    SemialgSet K = realize(S);

    // 1x1 input: no multiplier is ever needed
    MatrixPoly<Gaussian> f = MatrixPoly<Gaussian>::scalar(gpoly({0, 1, -1}), 1);  // x(1-x)
    CertificatePlan plan = h2f_reduce(f, K, S, kZero);
    CHECK(plan.h == gpoly({1}));
    CHECK(plan.levels.empty());
    CHECK(plan.target == f);
    CHECK(!plan.certificate.blocks.empty());

    // zero input: trivial plan with an empty certificate
    CertificatePlan zplan = h2f_reduce(MatrixPoly<Gaussian>(2, 2), K, S, kZero);
    CHECK(zplan.h == gpoly({1}));
    CHECK(zplan.levels.empty());
    CHECK(zplan.target.is_zero());
    CHECK(zplan.certificate.blocks.empty());
    CHECK(verify_certificate(zplan.target, zplan.cone, zplan.certificate, 1e-9));
}

TEST_CASE("h2f_reduce on random PSD combinations over [0, 1]") {
    Description S = unit_interval_desc();
    SemialgSet K = realize(S);
    const Poly<Gaussian> x = Poly<Gaussian>::x();
    const Poly<Gaussian> omx = gpoly({1, -1});

    for (int trial = 0; trial < 3; ++trial) {
        MatrixPoly<Gaussian> A = psdg_test::rand_matrix_poly(2, 1);
        MatrixPoly<Gaussian> B = psdg_test::rand_matrix_poly(2, 1);
        MatrixPoly<Gaussian> C = psdg_test::rand_matrix_poly(2, 1);
        MatrixPoly<Gaussian> F =
            A.adjoint() * A + x * (B.adjoint() * B) + omx * (C.adjoint() * C);
        if (F.is_zero()) continue;

        CertificatePlan plan = h2f_reduce(F, K, S, kZero);
        const int degF = F.degree();
        const int degh = plan.h.is_zero() ? 0 : plan.h.degree();
        CHECK(degh <= 8 * degF);  // deg F (3^2 - 1)
        CHECK(!plan.h.is_zero());
        // the plan re-verified internally; confirm once more from the outside
        double scale = 0.0;
        MatrixPoly<std::complex<double>> tf = to_float(plan.target);
        for (int k = 0; k <= tf.degree(); ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) scale = std::max(scale, std::abs(tf.coeff(k)(i, j)));
        CHECK(verify_certificate(plan.target, plan.cone, plan.certificate,
                                 1e-6 * (1.0 + scale)));
    }
}

TEST_CASE("h2f_reduce validates its inputs") {
    Description S = unit_interval_desc();
    SemialgSet K = realize(S);

    // not Hermitian
    MatrixPoly<Gaussian> bad(2, 2);
    Mat<Gaussian> c0(2, 2);
    c0(0, 1) = g(1);
    bad.set_coeff(0, c0);
    CHECK_THROWS_AS(h2f_reduce(bad, K, S, kZero), std::invalid_argument);

    // unbounded set
    Description ray = Description::from_polys({rpoly({0, 1})});
    SemialgSet Kray = realize(ray);
    CHECK_THROWS_AS(h2f_reduce(MatrixPoly<Gaussian>::identity(2), Kray, ray, kZero),
                    std::invalid_argument);

    // visibly not PSD on K
    MatrixPoly<Gaussian> neg = gpoly({-1}) * MatrixPoly<Gaussian>::identity(2);
    CHECK_THROWS_AS(h2f_reduce(neg, K, S, kZero), std::invalid_argument);
}
