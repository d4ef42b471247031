#pragma once

// A two-parameter-family obstruction and a constructive factorization for
// sets with unbounded complementary gaps.
//
// The family: for rational parameters x1 < x2 < x3 and k > 0 put
//
//   A = k - x1,  B = -k - x2 - x3,  C = k^2 + k(-x1 + x2 + x3) + x2 x3,
//   Dsq = A C + x1 x2 x3,           D = sqrt(Dsq),
//
//   F(x) = [ x + A      D              ]
//          [ D          x^2 + B x + C  ].
//
// Its determinant is exactly (x - x1)(x - x2)(x - x3), so F is positive
// semidefinite precisely where that cubic is nonnegative and the diagonal
// is nonnegative; under the three parameter conditions below F is PSD on
// K = [x1, x2] ∪ [x3, ∞) and on its subsets.  Yet, writing F as a weighted
// sum of Hermitian squares with weights drawn from the natural description
// of such a subset is impossible in two specific regimes:
//
//  * claim 1 — "F is a weighted sum of squares over the description
//    {x - x1, (x - x2)(x - x3), <gap generators>, ...} of a set
//    [x1, x2] ∪ ... ∪ [ray, ∞)" — refuted analytically: degree comparison
//    forces the weight attached to (x - x2)(x - x3) to be diag(0, k0) with
//    k0 in [0, 1], and the determinant of F minus that term is negative
//    somewhere it would have to be nonnegative (fk_refute_claim1);
//
//  * claim 2 — "F lies in the degree-2 truncated weighted-squares cone of
//    [x1, x2] ∪ {x3} ∪ ... ∪ {xm}" — refuted by solving the membership
//    SDP and demanding a verified infeasibility witness
//    (fk_refute_claim2_sdp).
//
// The factorization: a Hermitian F that is PSD on (-inf, a] ∪ [b, ∞) and
// has even degree splits as F = G*G + H*H (x - a)(x - b) with
// deg G <= deg F / 2 and deg H <= deg F / 2 - 1 (two_unbounded_factorize).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psdg/certsearch.hpp"
#include "psdg/matrixpoly.hpp"
#include "psdg/semialg.hpp"

namespace psdg {

/* ------------------------------------------------------------------ */
/* The family                                                          */
/* ------------------------------------------------------------------ */

// The three parameter conditions, evaluated exactly.
struct FkConditions {
    bool k_positive = false;       // k > 0
    bool dsq_positive = false;     // Dsq > 0
    bool vertex_positive = false;  // min over R of x^2 + B x + C is > 0
    Rational k;
    // Dsq via the expanded cubic k^3 + k^2(-2 x1 + x2 + x3)
    //                            + k(x2 x3 + x1^2 - x1 x2 - x1 x3).
    Rational dsq;
    // Minimum of the bottom-right entry: (3/4)k^2 + k(-x1 + (x2 + x3)/2)
    //                                    - ((x2 - x3)/2)^2; equals C - B^2/4.
    Rational vertex_value;

    bool all() const { return k_positive && dsq_positive && vertex_positive; }
};

// Throws std::invalid_argument unless x1 < x2 < x3.
FkConditions fk_conditions(const Rational& x1, const Rational& x2, const Rational& x3,
                           const Rational& k);

struct FkInstance {
    Rational x1, x2, x3, k;
    Rational A, B, C, Dsq;

    bool exact = false;     // Dsq is the square of a rational
    Rational D_exact;       // set when exact
    // Rational value of the high-precision (192-bit) approximation of D;
    // equals D_exact when exact.  |D_approx^2 - Dsq| <= det_residual.
    Rational D_approx;
    std::string D_decimal;  // D to >= 30 significant digits, scientific form

    MatrixPoly<Gaussian> F_exact;         // 2 x 2, set when exact
    MatrixPoly<std::complex<double>> F;   // 2 x 2 float view, always set
    // Coefficientwise max-norm of det(F built with D_approx) minus
    // (x - x1)(x - x2)(x - x3); only the constant coefficient differs, by
    // exactly Dsq - D_approx^2.  Zero when exact.
    double det_residual = 0.0;
};

// Throws std::invalid_argument if the ordering or any condition fails.
FkInstance fk_build(const Rational& x1, const Rational& x2, const Rational& x3,
                    const Rational& k);

// Scan k = p/q (denominator-major, then increasing numerator, canonical
// form only) with 1 <= p <= num_bound, 1 <= q <= den_bound for the first k
// satisfying all conditions with Dsq a rational square, so that fk_build
// yields an exact instance.
std::optional<Rational> fk_search_exact_k(const Rational& x1, const Rational& x2,
                                          const Rational& x3, int num_bound, int den_bound);

/* ------------------------------------------------------------------ */
/* Positivity report                                                   */
/* ------------------------------------------------------------------ */

struct FkPsdFact {
    std::string name;
    bool pass = false;
    // Exact (x, value) samples backing the fact.
    std::vector<std::pair<Rational, Rational>> points;
    std::string note;
};

// The three principal-minor facts behind "F is PSD on K":
//   top_left:     x + A vanishes at x1 - k and is nonnegative to the right;
//                 checks K ⊆ [x1 - k, ∞).
//   bottom_right: x^2 + B x + C has positive minimum (the vertex value).
//   determinant:  det F = (x - x1)(x - x2)(x - x3) exactly, nonnegative on
//                 K; checks K ⊆ [x1, x2] ∪ [x3, ∞).
struct FkPsdReport {
    FkPsdFact top_left;
    FkPsdFact bottom_right;
    FkPsdFact determinant;
    bool all_pass = false;
};

FkPsdReport fk_psd_report(const FkInstance& inst, const SemialgSet& K);

/* ------------------------------------------------------------------ */
/* Refutations                                                         */
/* ------------------------------------------------------------------ */

// Analytic refutation of claim 1 over a set K1 whose pieces are
// [x1, x2], then bounded pieces starting at x3, then a ray [.., ∞).
// Any weighted-squares decomposition over the natural description of K1
// would force the weight of (x - x2)(x - x3) to be diag(0, k0), k0 in
// [0, 1], leaving
//   q(x; k0) := det(F - diag(0, k0) (x - x2)(x - x3))
//             = (x - x2)(x - x3) (x(1 - k0) - (x1 - x1 k0 + k k0)),
// which must be nonnegative on K1 ∪ [x2, x3] but is not:
//   k0 = 0:  q = (x - x1)(x - x2)(x - x3) < 0 at the midpoint of (x2, x3);
//   k0 > 0:  q(x1) = (x1 - x2)(x1 - x3)(-k k0) < 0.
// The product identity for q is re-derived exactly for every grid value.
struct Claim1Refutation {
    Rational midpoint;            // (x2 + x3) / 2
    Rational q_zero_at_midpoint;  // q(midpoint; 0), negative
    bool zero_weight_refuted = false;

    Rational corner_factor;  // (x1 - x2)(x1 - x3), positive
    // (k0, q(x1; k0)) for k0 = 1/8, 2/8, ..., 1; every value negative.
    std::vector<std::pair<Rational, Rational>> grid;
    bool positive_weight_refuted = false;

    bool refuted = false;
    std::string note;
};

// Throws std::invalid_argument if K1 does not have the required shape.
Claim1Refutation fk_refute_claim1(const FkInstance& inst, const SemialgSet& K1);

// SDP refutation of claim 2: membership of F in the degree-2 truncated
// weighted-squares cone (full product set of weights) over the description
// S2, normally the natural description of [x1, x2] ∪ {x3} ∪ ... ∪ {xm}.
// refuted is true only for a verified infeasibility witness; an Unknown
// outcome reports failure to confirm, never refutation.  For instances
// with irrational D the SDP runs on D_approx; the witness margin exceeds
// the approximation error by many orders of magnitude (recorded in note).
struct Claim2Outcome {
    MembershipReport report;
    bool refuted = false;
    std::string note;
};

Claim2Outcome fk_refute_claim2_sdp(const FkInstance& inst, const Description& S2,
                                   double tol = 1e-8);

/* ------------------------------------------------------------------ */
/* Two unbounded intervals: F = G*G + H*H (x - a)(x - b)               */
/* ------------------------------------------------------------------ */

struct TwoUnboundedResult {
    MatrixPoly<std::complex<double>> G;  // deg G <= deg F / 2
    MatrixPoly<std::complex<double>> H;  // deg H <= deg F / 2 - 1
    // Coefficientwise max-norm of F - G*G - H*H (x - a)(x - b).
    double residual = 0.0;
    // Degree bound used for the decomposition step on [-1, 1].
    int membership_degree = 0;
};

// Factor a Hermitian F, PSD on (-inf, a] ∪ [b, ∞), of even degree, as
// F = G*G + H*H (x - a)(x - b).  Route: map the set to (-inf, -1] ∪ [1, ∞)
// by an affine change, reverse coefficients to land on [-1, 1], decompose
// there over {1 + y, 1 - y} at degree deg F, fold the linear weights into
// the quadratic one via 1 ± y = ((1 ± y)^2 + (1 + y)(1 - y)) / 2, take
// spectral factors of the two resulting PSD-on-R pieces, and reverse back.
// Throws std::invalid_argument for a >= b, non-Hermitian F, or odd degree;
// std::runtime_error if the decomposition step fails or the final residual
// exceeds 1e-6 * (1 + |F|).
TwoUnboundedResult two_unbounded_factorize(const MatrixPoly<Gaussian>& F, const Rational& a,
                                           const Rational& b, double tol = 1e-8);

}  // namespace psdg
