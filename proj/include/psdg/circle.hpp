#pragma once

// Transfer between the real line and the unit circle T.
//
// The Moebius map
//
//     lambda(x) = z0 (x - w0) / (x - conj(w0)),   |z0| = 1,  Im(w0) != 0,
//
// sends R u {infinity} bijectively onto T (infinity goes to z0), with
// inverse lambda^{-1}(z) = (z conj(w0) - z0 w0) / (z - z0).  A Hermitian
// matrix polynomial F of degree d on the line transfers to the Laurent
// matrix polynomial
//
//     Lambda(z) = ((z - z0)~ (z - z0))^N  F(lambda^{-1}(z)),  N = ceil(d/2),
//
// where ~ is the circle involution (sum A_k z^k)~ = sum A_k^* z^{-k}.
// Because |z0| = 1 the prefactor collapses to
//
//     (z - z0)~ (z - z0) = (-conj(z0)) (z - z0)^2 z^{-1},
//
// so Lambda is an honest Laurent polynomial with support in [-N, N], and it
// is circle-Hermitian whenever F is Hermitian.  The inverse substitution
// recovers
//
//     F(x) = ((x - conj(w0)) (x - w0) / (4 Im(w0)^2))^N  Lambda(lambda(x)),
//
// and pointwise Lambda(lambda(t)) is a positive multiple of F(t) for real
// t, so positivity on a set K transfers to positivity on the closure of
// lambda(K) and back.
//
// Everything is exact over Gaussian rationals when the map data is exact
// (the default map z0 = 1, w0 = i always is); float overloads cover
// numeric inputs.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "psdg/certsearch.hpp"
#include "psdg/matrixpoly.hpp"
#include "psdg/poly.hpp"
#include "psdg/scalars.hpp"
#include "psdg/semialg.hpp"

namespace psdg {

/* ------------------------------------------------------------------ */
/* Moebius maps                                                        */
/* ------------------------------------------------------------------ */

struct MoebiusMap {
    Gaussian z0;  // target of infinity; must have |z0| = 1 exactly
    Gaussian w0;  // pole data; must have Im(w0) != 0
};

// z0 = 1, w0 = i: lambda(x) = (x - i)/(x + i), the map whose recovery
// denominators are powers of (x^2 + 1).
MoebiusMap default_moebius();

// Validated construction; throws std::invalid_argument unless |z0| = 1
// exactly and Im(w0) != 0.
MoebiusMap make_moebius(const Gaussian& z0, const Gaussian& w0);

// lambda(x) for real x; the result lies on T exactly.
Gaussian moebius_apply(const MoebiusMap& m, const Rational& x);
std::complex<double> moebius_apply(const MoebiusMap& m, std::complex<double> x);

// lambda(infinity) = z0.
Gaussian moebius_apply_infinity(const MoebiusMap& m);

// lambda^{-1}(z) for z on T.  Throws std::domain_error at z = z0 (the
// preimage is the point at infinity) and std::invalid_argument when z is
// not on the unit circle (the exact quotient fails to be real).
Rational moebius_inverse(const MoebiusMap& m, const Gaussian& z);
double moebius_inverse(const MoebiusMap& m, std::complex<double> z);

/* ------------------------------------------------------------------ */
/* Laurent transfer and recovery                                       */
/* ------------------------------------------------------------------ */

// Lambda(z) = ((z - z0)~(z - z0))^N F(lambda^{-1}(z)) with N = ceil(deg F / 2).
// Support is contained in [-N, N]; Hermitian F gives circle-Hermitian output.
LaurentMatrixPoly<Gaussian> lambda_transform(const MoebiusMap& m, const MatrixPoly<Gaussian>& f);
LaurentMatrixPoly<std::complex<double>> lambda_transform(const MoebiusMap& m,
                                                         const MatrixPoly<std::complex<double>>& f);

// Inverse substitution at band N = ceil(deg_f / 2):
//
//     F(x) = (4 Im(w0)^2)^{-N} sum_k  L_k z0^k (x - w0)^{N+k} (x - conj(w0))^{N-k}.
//
// Throws std::invalid_argument when the support of L exceeds [-N, N], and
// std::runtime_error when the recovered polynomial has coefficients beyond
// degree deg_f (exactly nonzero in the exact overload; larger than
// tol * (1 + max coefficient norm of L) in the float overload) -- both mean
// L is not the transform of any degree-deg_f polynomial.
MatrixPoly<Gaussian> lambda_recover(const MoebiusMap& m, const LaurentMatrixPoly<Gaussian>& l,
                                    int deg_f);
MatrixPoly<std::complex<double>> lambda_recover(const MoebiusMap& m,
                                                const LaurentMatrixPoly<std::complex<double>>& l,
                                                int deg_f, double tol = 1e-9);

/* ------------------------------------------------------------------ */
/* Subsets of the unit circle                                          */
/* ------------------------------------------------------------------ */

// Angles are rational multiples of pi: angle r denotes the point
// e^{i pi r}.  An arc runs counterclockwise from from_angle to to_angle;
// its length to_angle - from_angle must lie in (0, 2], and length exactly 2
// denotes the full circle (no boundary points).
struct CircleArc {
    Rational from_angle;
    Rational to_angle;
};

// Finite union of closed arcs plus isolated points.
struct CircleSet {
    std::vector<CircleArc> arcs;
    std::vector<Rational> points;
};

// e^{i pi r} is a Gaussian rational exactly when r is an integer multiple
// of 1/2 (the points 1, i, -1, -i).
bool circle_point_is_exact(const Rational& angle);
Gaussian circle_point_exact(const Rational& angle);  // throws if not exact
std::complex<double> circle_point(const Rational& angle);

/* ------------------------------------------------------------------ */
/* Exact evaluation of Hermitian Laurent scalars on T                  */
/* ------------------------------------------------------------------ */

// Value b(z) of a 1x1 circle-Hermitian Laurent polynomial at a point z
// with |z| = 1 exactly (negative powers use z^{-1} = conj(z)).  Throws
// std::invalid_argument if b is not 1x1, if |z| != 1, or if the value
// fails to be real (i.e. b is not circle-Hermitian).
Rational laurent_value_on_circle(const LaurentMatrixPoly<Gaussian>& b, const Gaussian& z);

// Tangential slope (d/dtheta) b(e^{i theta}) = Re(i z b'(z)) at z = e^{i theta},
// computed exactly; same error conditions as laurent_value_on_circle.  For
// circle-Hermitian b the slope is zero iff the complex derivative b'(z)
// vanishes at z.
Rational laurent_slope_on_circle(const LaurentMatrixPoly<Gaussian>& b, const Gaussian& z);

/* ------------------------------------------------------------------ */
/* First-order boundary test for circle descriptions                   */
/* ------------------------------------------------------------------ */

// Checks the boundary conditions under which the circle quadratic module
// generated by gens contains every matrix polynomial positive
// semidefinite on domain:
//
//   (a) at every endpoint a of a proper arc, some generator b_k has
//       b_k(a) = 0 and b_k'(a) != 0;
//   (b) at every isolated point a, some pair b_k, b_l vanishes at a with
//       nonzero tangential slopes of opposite sign (so b_k b_l <= 0 near
//       a to first order), confirmed on 16 sampled points within angular
//       radius 1e-3 of a.
//
// Generators must be 1x1 and circle-Hermitian (std::invalid_argument
// otherwise); points with angle a multiple of 1/2 are evaluated exactly,
// all others in floating point with tolerance 1e-9 relative to the
// generator's coefficient scale.  When the result is false and reason is
// non-null, *reason names the first failing boundary or isolated point.
bool circle_description_check(const std::vector<LaurentMatrixPoly<Gaussian>>& gens,
                              const CircleSet& domain, std::string* reason = nullptr);

/* ------------------------------------------------------------------ */
/* Membership in the circle quadratic module via pullback              */
/* ------------------------------------------------------------------ */

// Outcome of delegating a circle membership question to the line solver.
//
// The pullback of a Laurent polynomial L with support in [-B, B] is the
// matrix polynomial
//
//     P(x) = omega(x)^B L(lambda(x)),
//     omega(x) = (x - conj(w0)) (x - w0) / (4 Im(w0)^2),
//
// of degree <= 2B; omega is a sum of two real squares, and
// omega(lambda^{-1}(z)) = sigma(z)^{-1} for the Laurent hermitian square
// sigma(z) = (z - z0)~(z - z0).  A line certificate
// P = s_0 + sum_j s_j p_j at truncation degree d (p_j the pullbacks of the
// circle generators b_j) therefore transfers to
//
//     sigma(z)^K L  =  tau_0 + sum_j tau_j b_j,
//
// with Laurent hermitian-square sums tau_j and
// K = max(0, ceil(d/2) - B); in particular when d <= 2B the pullback
// certificate witnesses L itself in the circle quadratic module.
struct CircleMembershipReport {
    MembershipStatus status = MembershipStatus::Unknown;
    std::optional<Certificate> line_certificate;  // present when status == Member
    std::vector<double> witness;                  // present when status == NotMemberAtDegree
    MatrixPoly<Gaussian> pullback;                // omega^band * L(lambda(x))
    std::vector<Poly<Rational>> line_generators;  // pullbacks of the circle generators
    int band = 0;                                 // B: Laurent band of L
    int sigma_power = 0;                          // K in the transfer statement above
    std::string note;                             // records the reduction performed
};

// Decide membership of the circle-Hermitian Laurent polynomial L in the
// truncated quadratic module generated by gens (1x1 circle-Hermitian
// Laurent polynomials) by pulling everything back to the line through
// x = lambda^{-1}(z) and running the Gram-matrix search at truncation
// degree `degree`.  Throws std::invalid_argument for shape or Hermitianity
// violations and when degree < deg(pullback).
CircleMembershipReport circle_membership(const MoebiusMap& m, const LaurentMatrixPoly<Gaussian>& l,
                                         const std::vector<LaurentMatrixPoly<Gaussian>>& gens,
                                         int degree, double tol = 1e-8);

}  // namespace psdg
