#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>

#include "psdg/certsearch.hpp"
#include "psdg/spectral.hpp"
#include "test_util.hpp"

using namespace psdg;
using psdg_test::rand_gaussian;
using psdg_test::rand_rational;
using psdg_test::rng;

namespace {

using CD = std::complex<double>;

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

MatrixPoly<Gaussian> scalar_mp(const Poly<Gaussian>& p) { return MatrixPoly<Gaussian>::scalar(p, 1); }

double max_abs_coeff(const MatrixPoly<CD>& f) {
    double s = 0.0;
    for (int k = 0; k <= (f.is_zero() ? -1 : f.degree()); ++k)
        for (int i = 0; i < f.rows(); ++i)
            for (int j = 0; j < f.cols(); ++j) s = std::max(s, std::abs(f.coeff(k)(i, j)));
    return s;
}

// random matrix polynomial of exact degree <= deg (entries small Gaussians)
MatrixPoly<Gaussian> rand_factor(int n, int deg) {
    std::vector<Mat<Gaussian>> c(static_cast<size_t>(deg) + 1, Mat<Gaussian>(n, n));
    for (auto& m : c)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rand_gaussian();
    return MatrixPoly<Gaussian>(std::move(c));
}

}  // namespace

TEST_CASE("membership SDP layout matches the degree accounting") {
    // F = x over S = {x}, quadratic module, d = 1: constant sigma_0 and
    // constant sigma_1, both scalar
    Description s = Description::from_polys({rpoly({0, 1})});
    TruncatedPreordering t{s, 1, 1, TruncMode::QuadraticModule};
    SdpProblem p = build_membership_sdp(scalar_mp(gpoly({0, 1})), t);
    REQUIRE(p.block_count() == 2);
    CHECK(p.block_size(0) == 1);
    CHECK(p.block_size(1) == 1);

    MembershipReport rep = check_membership(scalar_mp(gpoly({0, 1})), t);
    REQUIRE(rep.status == MembershipStatus::Member);
    REQUIRE(rep.certificate.blocks.size() == 2);
    CHECK(std::abs(rep.certificate.blocks[0].gram(0, 0)) < 1e-6);          // sigma_0 = 0
    CHECK(std::abs(rep.certificate.blocks[1].gram(0, 0) - 1.0) < 1e-6);    // sigma_1 = 1
}

TEST_CASE("sum of squares: x^2 over the empty description") {
    Description s = Description::from_polys({});
    TruncatedPreordering t{s, 1, 2, TruncMode::QuadraticModule};
    SdpProblem p = build_membership_sdp(scalar_mp(gpoly({0, 0, 1})), t);
    REQUIRE(p.block_count() == 1);
    CHECK(p.block_size(0) == 2);  // basis 1, x

    MembershipReport rep = check_membership(scalar_mp(gpoly({0, 0, 1})), t);
    REQUIRE(rep.status == MembershipStatus::Member);
    // Q must be (up to solver noise) diag(0, 1)
    CHECK(std::abs(rep.certificate.blocks[0].gram(1, 1) - 1.0) < 1e-5);
    CHECK(std::abs(rep.certificate.blocks[0].gram(0, 0)) < 1e-5);
}

TEST_CASE("negative constants are refuted") {
    Description s = Description::from_polys({});
    TruncatedPreordering t{s, 1, 0, TruncMode::QuadraticModule};
    MembershipReport rep = check_membership(scalar_mp(gpoly({-1})), t);
    REQUIRE(rep.status == MembershipStatus::NotMemberAtDegree);
    CHECK(rep.witness.size() == 1);
}

TEST_CASE("odd leading coefficient is structurally unreachable") {
    // x is not a sum of hermitian squares: at d = 1 the only block is the
    // constant sigma_0, which cannot produce a degree-1 coefficient
    Description s = Description::from_polys({});
    TruncatedPreordering t{s, 1, 1, TruncMode::QuadraticModule};
    MembershipReport rep = check_membership(scalar_mp(gpoly({0, 1})), t);
    REQUIRE(rep.status == MembershipStatus::NotMemberAtDegree);
    CHECK(rep.note.find("unreachable") != std::string::npos);
}

TEST_CASE("zero polynomial is a member with an all-zero certificate") {
    Description s = Description::from_polys({rpoly({0, 1})});
    TruncatedPreordering t{s, 2, 2, TruncMode::QuadraticModule};
    MembershipReport rep = check_membership(MatrixPoly<Gaussian>(2, 2), t);
    REQUIRE(rep.status == MembershipStatus::Member);
    CHECK(rep.certificate.residual <= 1e-10);
    for (const auto& b : rep.certificate.blocks)
        CHECK(b.gram.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("input validation") {
    Description s = Description::from_polys({rpoly({0, 1})});
    CHECK_THROWS_AS(check_membership(scalar_mp(gpoly({0, 0, 1})),
                                     TruncatedPreordering{s, 1, 1, TruncMode::QuadraticModule}),
                    std::invalid_argument);  // degree exceeds bound
    CHECK_THROWS_AS(check_membership(scalar_mp(gpoly({1})),
                                     TruncatedPreordering{s, 2, 2, TruncMode::QuadraticModule}),
                    std::invalid_argument);  // shape mismatch
    // non-Hermitian input
    MatrixPoly<Gaussian> bad(2, 2);
    Mat<Gaussian> m(2, 2);
    m(0, 1) = Gaussian(Rational(1), Rational(0));
    bad.set_coeff(0, m);
    CHECK_THROWS_AS(check_membership(bad, TruncatedPreordering{s, 2, 2, TruncMode::QuadraticModule}),
                    std::invalid_argument);
    CHECK_THROWS_AS(check_membership(scalar_mp(gpoly({1})),
                                     TruncatedPreordering{s, 1, -1, TruncMode::QuadraticModule}),
                    std::invalid_argument);
}

TEST_CASE("matrix polynomials PSD on [0,1] are members at their own degree") {
    // F = A*A + x B*B + (1-x) C*C with deg A <= 2, deg B = deg C <= 1 is PSD
    // on [0,1], has degree <= 4, and lies in the degree-4 truncation by
    // construction; the solver must find some certificate
    Description s = Description::from_polys({rpoly({0, 1}), rpoly({1, -1})});
    Poly<Gaussian> x = gpoly({0, 1});
    Poly<Gaussian> omx = gpoly({1, -1});
    for (int trial = 0; trial < 3; ++trial) {
        MatrixPoly<Gaussian> a = rand_factor(2, 2), b = rand_factor(2, 1), c = rand_factor(2, 1);
        MatrixPoly<Gaussian> f = a.adjoint() * a + x * (b.adjoint() * b) + omx * (c.adjoint() * c);
        TruncatedPreordering t{s, 2, 4, TruncMode::QuadraticModule};
        MembershipReport rep = check_membership(f, t);
        CAPTURE(trial);
        CAPTURE(rep.note);
        REQUIRE(rep.status == MembershipStatus::Member);
        CHECK(verify_certificate(f, t, rep.certificate, 1e-7));
    }
}

TEST_CASE("membership is monotone in the degree bound") {
    Description s = Description::from_polys({rpoly({0, 1}), rpoly({1, -1})});
    Poly<Gaussian> x = gpoly({0, 1});
    MatrixPoly<Gaussian> b = rand_factor(2, 1);
    MatrixPoly<Gaussian> f = x * (b.adjoint() * b);
    for (int d = 3; d <= 7; d += 2) {
        TruncatedPreordering t{s, 2, d, TruncMode::QuadraticModule};
        MembershipReport rep = check_membership(f, t);
        CAPTURE(d);
        CHECK(rep.status == MembershipStatus::Member);
    }
}

TEST_CASE("preordering mode enumerates all generator products") {
    Description s = Description::from_polys({rpoly({0, 1}), rpoly({1, -1})});
    TruncatedPreordering t{s, 1, 4, TruncMode::Preordering};
    std::vector<std::vector<int>> e = exponent_tuples(t);
    REQUIRE(e.size() == 4);
    CHECK(e[0] == std::vector<int>{0, 0});
    CHECK(e[3] == std::vector<int>{1, 1});
    // x(1-x) itself needs the mixed product at degree 2
    TruncatedPreordering t2{s, 1, 2, TruncMode::Preordering};
    Poly<Gaussian> xomx = gpoly({0, 1}) * gpoly({1, -1});
    MembershipReport rep = check_membership(scalar_mp(xomx), t2);
    CHECK(rep.status == MembershipStatus::Member);
}

TEST_CASE("certificate extraction applies the clipping rule") {
    Description s = Description::from_polys({});
    TruncatedPreordering t{s, 1, 2, TruncMode::QuadraticModule};
    MatrixPoly<Gaussian> f = scalar_mp(gpoly({0, 0, 1}));  // x^2

    SdpOutcome fake;
    fake.status = SdpStatus::Feasible;

    SUBCASE("clean Gram matrix: sigma = x^2") {
        Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(2, 2);
        q(1, 1) = 1.0;
        fake.primal = {q};
        Certificate c = extract_certificate(fake, f, t, 1e-8);
        CHECK(c.residual <= 1e-14);
        CHECK(c.blocks[0].clip == 0.0);
    }
    SUBCASE("rank-one Gram matrix: sigma = (1+x)^2") {
        Eigen::MatrixXcd q(2, 2);
        q << 1.0, 1.0, 1.0, 1.0;
        fake.primal = {q};
        MatrixPoly<Gaussian> g = scalar_mp(gpoly({1, 2, 1}));
        Certificate c = extract_certificate(fake, g, t, 1e-8);
        CHECK(c.residual <= 1e-14);
    }
    SUBCASE("tiny negative eigenvalue is clipped and reported") {
        Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(2, 2);
        q(0, 0) = -1e-12;
        q(1, 1) = 1.0;
        fake.primal = {q};
        Certificate c = extract_certificate(fake, f, t, 1e-8);
        CHECK(c.blocks[0].clip == doctest::Approx(1e-12));
        CHECK(c.residual <= 1e-10);
    }
    SUBCASE("eigenvalue below the threshold is rejected") {
        Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(2, 2);
        q(0, 0) = -1.0;
        q(1, 1) = 1.0;
        fake.primal = {q};
        CHECK_THROWS_AS(extract_certificate(fake, f, t, 1e-8), std::runtime_error);
    }
}

TEST_CASE("verification is independent and strict") {
    Description s = Description::from_polys({rpoly({0, 1})});
    TruncatedPreordering t{s, 1, 1, TruncMode::QuadraticModule};
    MatrixPoly<Gaussian> f = scalar_mp(gpoly({0, 1}));

    // hand-built certificate: x = 0 + 1 * x
    Certificate hand;
    hand.S = s;
    hand.n = 1;
    hand.d = 1;
    hand.mode = TruncMode::QuadraticModule;
    CertificateBlock b0;
    b0.e = {0};
    b0.gram = Eigen::MatrixXcd::Zero(1, 1);
    CertificateBlock b1;
    b1.e = {1};
    b1.gram = Eigen::MatrixXcd::Identity(1, 1);
    hand.blocks = {b0, b1};
    CHECK(verify_certificate(f, t, hand, 1e-10));

    // perturbing a Gram entry by 1 breaks it
    Certificate broken = hand;
    broken.blocks[1].gram(0, 0) += 1.0;
    CHECK_FALSE(verify_certificate(f, t, broken, 1e-8));

    // a Gram matrix with a negative eigenvalue is rejected no matter the fit
    Certificate neg = hand;
    neg.blocks[0].gram(0, 0) = -1.0;
    CHECK_FALSE(verify_certificate(f, t, neg, 1e-8));

    // exponent tuples outside the cone are rejected
    Certificate alien = hand;
    alien.blocks[1].e = {2};
    CHECK_FALSE(verify_certificate(f, t, alien, 1e-8));
}

TEST_CASE("round trip: solver certificates pass verification at 10x tolerance") {
    Description s = Description::from_polys({rpoly({0, 1})});
    Poly<Gaussian> x = gpoly({0, 1});
    MatrixPoly<Gaussian> b = rand_factor(2, 1);
    MatrixPoly<Gaussian> f = b.adjoint() * b + x * MatrixPoly<Gaussian>::identity(2);
    TruncatedPreordering t{s, 2, 2, TruncMode::QuadraticModule};
    MembershipReport rep = check_membership(f, t, 1e-8);
    CAPTURE(rep.note);
    REQUIRE(rep.status == MembershipStatus::Member);
    CHECK(verify_certificate(f, t, rep.certificate, 1e-7));
}

/* ------------------------------------------------------------------ */
/* Factorization over the line                                         */
/* ------------------------------------------------------------------ */

TEST_CASE("identity factors as itself") {
    FejerRieszResult r = fejer_riesz(MatrixPoly<Gaussian>::identity(2));
    CHECK(r.residual <= 1e-12);
    CHECK(r.factor.degree() == 0);
    MatrixPoly<CD> prod = r.factor.adjoint() * r.factor;
    CHECK(std::abs(prod.coeff(0)(0, 0) - CD(1.0, 0.0)) < 1e-10);
}

TEST_CASE("x^2 + 1 factors with degree 1") {
    FejerRieszResult r = fejer_riesz(scalar_mp(gpoly({1, 0, 1})));
    CHECK(r.residual <= 1e-10);
    REQUIRE(r.factor.degree() == 1);
    MatrixPoly<CD> prod = r.factor.adjoint() * r.factor;
    CHECK(std::abs(prod.coeff(0)(0, 0) - CD(1.0, 0.0)) < 1e-9);
    CHECK(std::abs(prod.coeff(1)(0, 0)) < 1e-9);
    CHECK(std::abs(prod.coeff(2)(0, 0) - CD(1.0, 0.0)) < 1e-9);
}

TEST_CASE("products of random factors are recovered up to the product") {
    for (int trial = 0; trial < 3; ++trial) {
        MatrixPoly<Gaussian> g0 = rand_factor(3, 2);
        MatrixPoly<Gaussian> f = g0.adjoint() * g0;
        if (f.is_zero() || f.degree() % 2 != 0) continue;
        CAPTURE(trial);
        FejerRieszResult r = fejer_riesz(f, 1e-6);
        CHECK(r.factor.degree() <= f.degree() / 2);
        MatrixPoly<CD> diff = to_float(f) - r.factor.adjoint() * r.factor;
        double scale = 1.0 + max_abs_coeff(to_float(f));
        CHECK(max_abs_coeff(diff) <= 1e-6 * scale);
    }
}

TEST_CASE("scalar polynomials with rational roots: factor residual and root oracle") {
    // p = c * prod (x - r_i)^2 is PSD on R with all zeros on the real line,
    // the hardest case for the circle iteration
    for (int trial = 0; trial < 4; ++trial) {
        Poly<Gaussian> p = gpoly({2});  // c = 2
        std::vector<Rational> roots;
        for (int j = 0; j < 3; ++j) roots.push_back(rand_rational(3, 2));
        for (const Rational& r0 : roots) {
            Gaussian mr(Rational(0) - r0, Rational(0));
            Poly<Gaussian> lin({mr, Gaussian(Rational(1), Rational(0))});
            p = p * lin * lin;
        }
        MatrixPoly<Gaussian> f = scalar_mp(p);
        CAPTURE(trial);
        FejerRieszResult r = fejer_riesz(f, 1e-6);
        CHECK(r.residual <= 1e-6 * (1.0 + max_abs_coeff(to_float(f))));
        CHECK(r.factor.degree() == p.degree() / 2);
        // sanity of the construction: p >= 0 on a point grid
        for (int k = 0; k <= 1000; ++k) {
            double xv = -5.0 + 0.01 * k;
            CD val = to_float(f).evaluate_complex(CD(xv, 0.0))(0, 0);
            CHECK(val.real() >= -1e-7);
        }
    }
}

TEST_CASE("factorization agrees with the Gram route on sums of squares") {
    // dual routes: the membership SDP with an empty description must say
    // MEMBER exactly when the constructive factorization succeeds
    Poly<Gaussian> p = gpoly({1, 0, 1}) * gpoly({1, 0, 1});  // (x^2+1)^2
    MatrixPoly<Gaussian> f = scalar_mp(p);
    Description empty = Description::from_polys({});
    MembershipReport rep =
        check_membership(f, TruncatedPreordering{empty, 1, 4, TruncMode::QuadraticModule});
    CHECK(rep.status == MembershipStatus::Member);
    FejerRieszResult r = fejer_riesz(f);
    CHECK(r.residual <= 1e-9);
}

TEST_CASE("factorization rejects bad inputs") {
    CHECK_THROWS_AS(fejer_riesz(scalar_mp(gpoly({0, 1}))), std::invalid_argument);  // odd degree
    MatrixPoly<Gaussian> bad(2, 2);
    Mat<Gaussian> m(2, 2);
    m(0, 1) = Gaussian(Rational(1), Rational(0));
    bad.set_coeff(0, m);
    CHECK_THROWS_AS(fejer_riesz(bad), std::invalid_argument);  // not Hermitian
    // x^2 - 1 is negative near 0: no factorization exists
    CHECK_THROWS_AS(fejer_riesz(scalar_mp(gpoly({-1, 0, 1}))), std::runtime_error);
}

TEST_CASE("zero polynomial factors as zero") {
    FejerRieszResult r = fejer_riesz(MatrixPoly<Gaussian>(2, 2));
    CHECK(r.residual == 0.0);
    CHECK(r.factor.is_zero());
}

/* ------------------------------------------------------------------ */
/* Denominator search                                                  */
/* ------------------------------------------------------------------ */

TEST_CASE("denominator search returns k = 0 for immediate members") {
    Description s = Description::from_polys({rpoly({0, 1})});
    Gaussian w(Rational(0), Rational(1));  // w = i
    DenominatorResult r = denominator_search(scalar_mp(gpoly({0, 1})), s, w);
    REQUIRE(r.found);
    CHECK(r.k == 0);
    CHECK(verify_certificate(
        scalar_mp(gpoly({0, 1})),
        TruncatedPreordering{s, 1, r.d_used, TruncMode::QuadraticModule}, r.certificate, 1e-7));
}

TEST_CASE("denominator search exhausts on negative input without claiming nonexistence") {
    Description s = Description::from_polys({rpoly({0, 1})});
    Gaussian w(Rational(0), Rational(1));
    DenominatorOptions opts;
    opts.k_max = 2;
    MatrixPoly<Gaussian> neg = Poly<Gaussian>::constant(Gaussian(Rational(-1), Rational(0))) *
                               MatrixPoly<Gaussian>::identity(2);
    DenominatorResult r = denominator_search(neg, s, w, opts);
    CHECK_FALSE(r.found);
    CHECK(r.attempts.size() >= 3);
    CHECK(r.note.find("no conclusion") != std::string::npos);
}

TEST_CASE("denominator search rejects real w") {
    Description s = Description::from_polys({rpoly({0, 1})});
    CHECK_THROWS_AS(
        denominator_search(scalar_mp(gpoly({1})), s, Gaussian(Rational(2), Rational(0))),
        std::invalid_argument);
}

TEST_CASE("a strict positive gains membership after one denominator power") {
    // F = x^2 + 1 over S = {x^3}: K = [0, inf).  F is strictly positive but
    // the quadratic module at low degree may miss it; the search must find
    // some k with a verified certificate.
    Description s = Description::from_polys({rpoly({0, 0, 0, 1})});
    Gaussian w(Rational(0), Rational(1));
    DenominatorOptions opts;
    opts.k_max = 4;
    DenominatorResult r = denominator_search(scalar_mp(gpoly({1, 0, 1})), s, w, opts);
    REQUIRE(r.found);
    TruncatedPreordering t{s, 1, r.d_used, opts.mode};
    Poly<Gaussian> qw = gpoly({1, 0, 1});
    MatrixPoly<Gaussian> fk = scalar_mp(gpoly({1, 0, 1}));
    for (int j = 0; j < r.k; ++j) fk = qw * fk;
    CHECK(verify_certificate(fk, t, r.certificate, 1e-7));
}
