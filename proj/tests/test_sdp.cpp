#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <random>

#include "psdg/sdp.hpp"

using namespace psdg;

namespace {

Eigen::MatrixXcd herm1(double v) {
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = v;
    return m;
}

std::mt19937_64& rng() {
    static std::mt19937_64 gen(0x5eedu);
    return gen;
}

Eigen::MatrixXcd random_hermitian(int n, bool complex_entries) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = std::complex<double>(d(rng()), complex_entries ? d(rng()) : 0.0);
    return 0.5 * (m + m.adjoint());
}

Eigen::MatrixXcd random_psd(int n, bool complex_entries) {
    Eigen::MatrixXcd g = random_hermitian(n, complex_entries);
    return g * g.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(n, n);
}

}  // namespace

TEST_CASE("one variable pinned to 1 is feasible with X = [1]") {
    SdpProblem p({1});
    p.add_constraint({{0, herm1(1.0)}}, 1.0);
    SdpOutcome out = sdp_solve(p);
    REQUIRE(out.status == SdpStatus::Feasible);
    CHECK(out.primal.size() == 1);
    CHECK(out.primal[0](0, 0).real() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(out.primal_residual <= 1e-8 * 2.0);
    CHECK(out.min_eigenvalue >= -1e-8);
    double viol = 0, me = 0;
    CHECK(sdp_verify_feasible(p, out.primal, 1e-8, &viol, &me));
}

TEST_CASE("x11 = -1 on a PSD variable is infeasible with witness y = -1") {
    SdpProblem p({1});
    p.add_constraint({{0, herm1(1.0)}}, -1.0);
    SdpOutcome out = sdp_solve(p);
    REQUIRE(out.status == SdpStatus::Infeasible);
    REQUIRE(out.witness.size() == 1);
    CHECK(out.witness[0] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(out.witness_eig_margin <= -1e-8);
    CHECK(out.witness_rhs_margin >= 1e-8);
    double em = 0, rm = 0;
    CHECK(sdp_verify_infeasible(p, out.witness, &em, &rm));
}

TEST_CASE("x + y = 1 and x - y = 3 on nonnegative scalars is infeasible") {
    // blocks are 1x1, so PSD means x, y >= 0; the system forces y = -1.
    SdpProblem p({1, 1});
    p.add_constraint({{0, herm1(1.0)}, {1, herm1(1.0)}}, 1.0);
    p.add_constraint({{0, herm1(1.0)}, {1, herm1(-1.0)}}, 3.0);
    SdpOutcome out = sdp_solve(p);
    REQUIRE(out.status == SdpStatus::Infeasible);
    double em = 0, rm = 0;
    CHECK(sdp_verify_infeasible(p, out.witness, &em, &rm));
    CHECK(em <= -1e-8);
    CHECK(rm >= 1e-8);
    // the hand witness y = (-2, 1)/2 certifies: block margins -1/2, -3/2
    std::vector<double> hand{-2.0, 1.0};
    CHECK(sdp_verify_infeasible(p, hand, &em, &rm));
    CHECK(em == doctest::Approx(-0.5));
    CHECK(rm == doctest::Approx(0.5));
}

TEST_CASE("verifiers reject wrong certificates") {
    SdpProblem p({1});
    p.add_constraint({{0, herm1(1.0)}}, 1.0);
    // wrong value
    std::vector<Eigen::MatrixXcd> bad{herm1(2.0)};
    CHECK_FALSE(sdp_verify_feasible(p, bad, 1e-8, nullptr, nullptr));
    // negative matrix
    std::vector<Eigen::MatrixXcd> neg{herm1(-1.0)};
    CHECK_FALSE(sdp_verify_feasible(p, neg, 1e-8, nullptr, nullptr));
    // zero witness is never a witness
    CHECK_FALSE(sdp_verify_infeasible(p, {0.0}, nullptr, nullptr));
    // y = 1 has <r, y> = 1 > 0 but sum y_c A_c = [1] is not negative definite
    CHECK_FALSE(sdp_verify_infeasible(p, {1.0}, nullptr, nullptr));
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(SdpProblem({}), std::invalid_argument);
    CHECK_THROWS_AS(SdpProblem({0}), std::invalid_argument);
    CHECK_THROWS_AS(SdpProblem({201}), std::invalid_argument);
    CHECK_THROWS_AS(SdpProblem({1}, {true, false}), std::invalid_argument);

    SdpProblem p({2});
    Eigen::MatrixXcd nonsym(2, 2);
    nonsym << 1.0, 2.0, 3.0, 4.0;
    CHECK_THROWS_AS(p.add_constraint({{0, nonsym}}, 0.0), std::invalid_argument);
    Eigen::MatrixXcd wrong_shape = Eigen::MatrixXcd::Identity(3, 3);
    CHECK_THROWS_AS(p.add_constraint({{0, wrong_shape}}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(p.add_constraint({{1, Eigen::MatrixXcd::Identity(2, 2)}}, 0.0),
                    std::invalid_argument);
    Eigen::MatrixXcd ok = Eigen::MatrixXcd::Identity(2, 2);
    CHECK_THROWS_AS(p.add_constraint({{0, ok}, {0, ok}}, 0.0), std::invalid_argument);

    // complex entries on a block declared real are rejected
    SdpProblem pr({2}, {false});
    Eigen::MatrixXcd cplx(2, 2);
    cplx << 1.0, std::complex<double>(0.0, 1.0), std::complex<double>(0.0, -1.0), 1.0;
    CHECK_THROWS_AS(pr.add_constraint({{0, cplx}}, 0.0), std::invalid_argument);

    // solving with no constraints is refused
    SdpProblem empty({1});
    CHECK_THROWS_AS(sdp_solve(empty), std::invalid_argument);

    // verifier argument shape checks
    SdpProblem q({1});
    q.add_constraint({{0, herm1(1.0)}}, 1.0);
    std::vector<Eigen::MatrixXcd> too_many{herm1(1.0), herm1(1.0)};
    CHECK_THROWS_AS(sdp_verify_feasible(q, too_many, 1e-8, nullptr, nullptr), std::invalid_argument);
    CHECK_THROWS_AS(sdp_verify_infeasible(q, {1.0, 2.0}, nullptr, nullptr), std::invalid_argument);
}

TEST_CASE("complex block round trip and Hermitian coefficient recovery") {
    SdpProblem p({2}, {true});
    Eigen::MatrixXcd a(2, 2);
    a << 2.0, std::complex<double>(1.0, -3.0), std::complex<double>(1.0, 3.0), 5.0;
    p.add_constraint({{0, a}}, 7.0);
    Eigen::MatrixXcd back = p.coefficient(0, 0);
    CHECK((back - a).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));
    // realified block doubles in size and preserves inner products
    CHECK(p.real_block_size(0) == 4);
    Eigen::MatrixXcd x = random_psd(2, true);
    double want = (a.adjoint() * x).trace().real();
    Eigen::MatrixXd xr(4, 4);
    xr.topLeftCorner(2, 2) = x.real();
    xr.bottomRightCorner(2, 2) = x.real();
    xr.topRightCorner(2, 2) = -x.imag();
    xr.bottomLeftCorner(2, 2) = x.imag();
    double got = (p.real_coefficient(0, 0).cwiseProduct(xr)).sum();
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("random planted-feasible problems are solved and verified") {
    for (int trial = 0; trial < 8; ++trial) {
        const bool cplx = trial % 2 == 1;
        const int n1 = 2 + trial % 3, n2 = 2;
        SdpProblem p({n1, n2}, {cplx, false});
        Eigen::MatrixXcd x1 = random_psd(n1, cplx);
        Eigen::MatrixXcd x2 = random_psd(n2, false);
        const int m = 4;
        for (int c = 0; c < m; ++c) {
            Eigen::MatrixXcd a1 = random_hermitian(n1, cplx);
            Eigen::MatrixXcd a2 = random_hermitian(n2, false);
            double rhs = (a1.adjoint() * x1).trace().real() + (a2.adjoint() * x2).trace().real();
            p.add_constraint({{0, a1}, {1, a2}}, rhs);
        }
        SdpOutcome out = sdp_solve(p);
        CAPTURE(trial);
        REQUIRE(out.status == SdpStatus::Feasible);
        CHECK(sdp_verify_feasible(p, out.primal, 1e-8, nullptr, nullptr));
    }
}

TEST_CASE("trace X = -1 style random problems are refuted with witnesses") {
    for (int trial = 0; trial < 6; ++trial) {
        const bool cplx = trial % 2 == 1;
        const int n = 2 + trial % 3;
        SdpProblem p({n}, {cplx});
        // a PSD combination pinned to a negative value, possibly after a few
        // camouflage constraints that remain satisfiable on their own
        Eigen::MatrixXcd psd = random_psd(n, cplx);
        for (int c = 0; c < 2; ++c)
            p.add_constraint({{0, random_hermitian(n, cplx)}}, 0.0);
        p.add_constraint({{0, psd}}, -1.0 - trial * 0.25);
        SdpOutcome out = sdp_solve(p);
        CAPTURE(trial);
        REQUIRE(out.status == SdpStatus::Infeasible);
        CHECK(sdp_verify_infeasible(p, out.witness, nullptr, nullptr));
    }
}

TEST_CASE("objective mode reaches the optimum of a known problem") {
    // min x11 subject to trace X = 1 on a 2x2 PSD variable: optimum 0
    SdpProblem p({2});
    p.add_constraint({{0, Eigen::MatrixXcd::Identity(2, 2)}}, 1.0);
    Eigen::MatrixXcd e11 = Eigen::MatrixXcd::Zero(2, 2);
    e11(0, 0) = 1.0;
    p.set_objective({{0, e11}});
    SdpOutcome out = sdp_solve(p);
    REQUIRE(out.status == SdpStatus::Feasible);
    CHECK(out.objective == doctest::Approx(0.0).epsilon(1e-4));
    CHECK(out.primal[0](1, 1).real() == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("solver is deterministic across repeated runs") {
    SdpProblem p({3}, {true});
    Eigen::MatrixXcd x0 = random_psd(3, true);
    std::vector<Eigen::MatrixXcd> as;
    for (int c = 0; c < 3; ++c) as.push_back(random_hermitian(3, true));
    for (const auto& a : as)
        p.add_constraint({{0, a}}, (a.adjoint() * x0).trace().real());
    SdpOutcome first = sdp_solve(p);
    REQUIRE(first.status == SdpStatus::Feasible);
    for (int rep = 0; rep < 3; ++rep) {
        SdpOutcome again = sdp_solve(p);
        REQUIRE(again.status == SdpStatus::Feasible);
        CHECK(again.iterations == first.iterations);
        CHECK((again.primal[0] - first.primal[0]).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("indeterminate is reported honestly when iterations run out") {
    SdpProblem p({2});
    Eigen::MatrixXcd a = random_hermitian(2, false);
    p.add_constraint({{0, a}}, 0.37);
    SdpOptions opts;
    opts.max_iter = 0;
    SdpOutcome out = sdp_solve(p, opts);
    // with zero iterations the identity start is almost surely no certificate
    if (out.status == SdpStatus::Indeterminate) {
        CHECK(out.iterations == 0);
        CHECK(out.note.size() > 0);
    }
}

TEST_CASE("strengthening finds a strict witness on a marginal refutation") {
    // x11 = 0 and x11 = 1 cannot both hold; the naive dual iterate may sit on
    // the boundary, the strengthening stage must produce strict margins.
    SdpProblem p({1});
    p.add_constraint({{0, herm1(1.0)}}, 0.0);
    p.add_constraint({{0, herm1(1.0)}}, 1.0);
    SdpOutcome out = sdp_solve(p);
    REQUIRE(out.status == SdpStatus::Infeasible);
    double em = 0, rm = 0;
    CHECK(sdp_verify_infeasible(p, out.witness, &em, &rm));
    CHECK(em <= -1e-8);
    CHECK(rm >= 1e-8);
}

TEST_CASE("json dump is parseable and complete") {
    SdpProblem p({1, 2}, {false, true});
    Eigen::MatrixXcd a(2, 2);
    a << 1.0, std::complex<double>(0.0, 2.0), std::complex<double>(0.0, -2.0), 3.0;
    p.add_constraint({{0, herm1(4.0)}, {1, a}}, 5.0);
    std::string s = p.dump_json();
    CHECK(s.find("\"blocks\"") != std::string::npos);
    CHECK(s.find("\"constraints\"") != std::string::npos);
    CHECK(s.find("\"rhs\":5.0") != std::string::npos);
    CHECK(s.find("\"complex\":true") != std::string::npos);
}
