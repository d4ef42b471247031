#pragma once

// Constructive degree reduction for Hermitian matrix polynomials that are
// PSD on a compact set K: produces a real scalar multiplier h with
// h(x0) != 0 such that h^2 F lies in the truncated quadratic module over a
// description of K, together with a fully assembled Gram certificate.
//
// The machinery:
//   * pivot_unitaries: exact unitary congruences (entries in Q(i, sqrt 2))
//     that move prescribed combinations of entries into the top-left corner,
//   * select_pivot: the case analysis locating a scalar that is nonzero at
//     x0 (a diagonal entry, or a symmetrized / skew-symmetrized pair
//     combination; the fourth possibility provably cannot occur),
//   * schur_split: the exact triangular congruence identities
//       a^4 F = L_plus^* diag(a^3, a(aC - beta^* beta)) L_plus,
//       diag(a^3, a(aC - beta^* beta)) = L_minus^* F L_minus,
//   * factor_out_root: maximal exact division by (x - x0) or
//     (x - x0)(x - conj x0),
//   * h2f_reduce: the recursive procedure combining all of the above with a
//     scalar membership oracle, returning the multiplier and a certificate
//     plan whose flat Gram certificate verifies independently.
//
// Internally the recursion conjugates by rational invertible congruences
// whose top-left rows are e_k, e_k + e_l, or e_k + i e_l, rather than by the
// unitaries themselves: a cone is closed under X -> A^* X A for any fixed
// matrix A, and the rational route keeps every intermediate object (and the
// final h and h^2 F) inside Q(i)[x], where certificates can be verified
// exactly.  The unitaries are still exposed and recorded; their top-left
// rows are the same up to the scalar sqrt(2), so pivot nonvanishing at x0
// transfers verbatim.

#include <functional>
#include <string>
#include <vector>

#include "psdg/certsearch.hpp"
#include "psdg/matrixpoly.hpp"
#include "psdg/poly.hpp"
#include "psdg/scalars.hpp"
#include "psdg/semialg.hpp"

namespace psdg {

/* ------------------------------------------------------------------ */
/* Pivot unitaries                                                      */
/* ------------------------------------------------------------------ */

struct PivotUnitaries {
    Mat<QuadGaussian> U;  // real entries; top-left row (e_k + e_l)/sqrt(2)
    Mat<QuadGaussian> V;  // complex;     top-left row (e_k + i e_l)/sqrt(2)
};

// 1-based indices, 1 <= k <= l <= n.  For k == l both matrices are the
// permutation swapping rows 1 and k (the identity for k == 1).
PivotUnitaries pivot_unitaries(int n, int k, int l);

// The scalar polynomials the unitaries move into the top-left corner of
// U G U^* and V G V^*.  Defined for arbitrary square G (1-based indices):
//   k == l:  g_kk
//   k <  l:  p = (g_kl + g_lk + g_kk + g_ll)/2
//            r = (i/2)(-g_kl + g_lk) + (g_kk + g_ll)/2
Poly<Gaussian> pivot_p(const MatrixPoly<Gaussian>& G, int k, int l);
Poly<Gaussian> pivot_r(const MatrixPoly<Gaussian>& G, int k, int l);

/* ------------------------------------------------------------------ */
/* Pivot selection                                                      */
/* ------------------------------------------------------------------ */

enum class PivotCase {
    Diagonal,  // some g_kk(x0) != 0
    PairSym,   // all diagonals vanish at x0; p_{k0 l0}(x0) != 0
    PairSkew,  // all diagonals vanish at x0; r_{k0 l0}(x0) != 0
};

std::string pivot_case_name(PivotCase c);

struct PivotData {
    PivotCase kase = PivotCase::Diagonal;
    int k0 = 1, l0 = 1;   // 1-based; l0 == k0 for Diagonal
    Mat<QuadGaussian> T;  // the exact unitary attached to the case
    Poly<Gaussian> pivot; // g_{k0 k0}, p_{k0 l0}, or r_{k0 l0}; pivot(x0) != 0
};

// Requires G Hermitian with G(x0) != 0.  Scans diagonals first (smallest
// k0), then off-diagonal pairs in lexicographic order; by hermiticity one of
// the three cases always applies.
PivotData select_pivot(const MatrixPoly<Gaussian>& G, const Gaussian& x0);

/* ------------------------------------------------------------------ */
/* Triangular congruence splitting                                      */
/* ------------------------------------------------------------------ */

struct SchurSplit {
    Poly<Gaussian> d;             // a^3
    MatrixPoly<Gaussian> D;       // a (a C - beta^* beta), size n-1
    MatrixPoly<Gaussian> L_plus;  // [[a, beta], [0, a I]]
    MatrixPoly<Gaussian> L_minus; // [[a, -beta], [0, a I]]
};

// F Hermitian of size n >= 2, partitioned with scalar top-left a (which must
// have real coefficients), row beta, and block C.  Both congruence
// identities are re-multiplied and checked exactly before returning; a
// failure is an internal arithmetic bug and throws std::logic_error.
SchurSplit schur_split(const MatrixPoly<Gaussian>& F);

/* ------------------------------------------------------------------ */
/* Root factoring                                                       */
/* ------------------------------------------------------------------ */

struct RootFactor {
    Poly<Gaussian> c;        // x - x0 (real x0) or (x - x0)(x - conj x0)
    int m = 0;               // maximal power with c^m dividing F entrywise
    MatrixPoly<Gaussian> G;  // F / c^m; G(x0) != 0 for Hermitian F
};

// F must not be identically zero.  m = 0 is allowed.
RootFactor factor_out_root(const MatrixPoly<Gaussian>& F, const Gaussian& x0);

/* ------------------------------------------------------------------ */
/* The h^2 F procedure                                                  */
/* ------------------------------------------------------------------ */

using ScalarOracle = std::function<MembershipReport(const Poly<Gaussian>&)>;

// Membership of a real scalar polynomial in the truncated quadratic module
// over S, retrying with degree bounds deg p, deg p + 2, ..., deg p + 2*extra.
ScalarOracle default_scalar_oracle(const Description& S, int extra_rounds = 4,
                                   double tol = 1e-8);

struct ReductionLevel {
    int size = 1;                      // matrix size at this level
    Poly<Gaussian> c;                  // root factor at x0
    int m = 0;                         // its multiplicity
    PivotData pivot;                   // selected case and unitary
    Poly<Gaussian> pivot_scalar;       // t = top-left of the rational image
                                       //   (g_{k0 k0}, 2 p, or 2 r)
    MatrixPoly<Gaussian> congruence;   // A with t^4 F = A^* diag(d, D) A
    Poly<Gaussian> d;                  // scalar block c^m t^3
    MatrixPoly<Gaussian> D;            // next level's input, size n-1
    Poly<Gaussian> h_level;            // h accumulated from this level down
    Certificate scalar_certificate;    // membership of h_sub^2 d over S
};

struct CertificatePlan {
    Poly<Gaussian> h;                  // real coefficients, h(x0) != 0
    MatrixPoly<Gaussian> target;       // h^2 F, exact
    TruncatedPreordering cone;         // S, n, chosen degree bound
    Certificate certificate;           // flat Gram certificate for target
    std::vector<ReductionLevel> levels;  // outermost first
};

struct H2FOptions {
    ScalarOracle scalar_oracle;  // default: default_scalar_oracle(S)
    double tol = 1e-8;           // per-solve tolerance for the oracle
    double plan_tol = 1e-6;      // final gate: residual <= plan_tol*(1+scale)
    bool sample_check = true;    // sampled PSD-on-K guard before recursing
};

// Requires F Hermitian and PSD on the nonempty compact K described by S
// (guarded by sampling, not proved).  Returns the multiplier h (inside the
// plan) with h(x0) != 0, deg h <= deg(F) (3^n - 1), and a flat certificate
// for h^2 F that has been re-verified independently before returning.
// Throws std::runtime_error when the scalar oracle cannot certify a
// membership or the assembled certificate fails verification.
CertificatePlan h2f_reduce(const MatrixPoly<Gaussian>& F, const SemialgSet& K,
                           const Description& S, const Gaussian& x0,
                           const H2FOptions& opts = {});

}  // namespace psdg
