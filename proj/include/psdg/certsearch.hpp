#pragma once

// Degree-bounded membership in matrix quadratic modules and preorderings.
//
// Given a Hermitian matrix polynomial F and a described set K = {g_1 >= 0,
// ..., g_s >= 0}, search for a representation
//
//     F = sum_e sigma_e * g^e,     g^e = prod_j g_j^{e_j},
//
// where each sigma_e is a sum of Hermitian squares of matrix polynomials and
// the total degree of every summand is bounded by d.  The search is a
// semidefinite feasibility problem over one Gram matrix per exponent tuple;
// every positive answer ships a certificate that is re-verified
// independently, and every negative answer ships a Farkas witness.  A
// negative answer always refers to the specific degree bound d, never to
// membership at large.
//
// Also here: spectral factorization of matrix polynomials positive
// semidefinite on the whole line (F = G*G), and the search for a denominator
// power ((x - conj(w))(x - w))^k that brings F into the truncated cone.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "psdg/matrixpoly.hpp"
#include "psdg/sdp.hpp"
#include "psdg/semialg.hpp"

namespace psdg {

enum class TruncMode {
    QuadraticModule,  // exponent tuples: zero and the unit vectors
    Preordering,      // all tuples in {0,1}^s
};

std::string trunc_mode_name(TruncMode m);
TruncMode trunc_mode_from_name(const std::string& s);

struct TruncatedPreordering {
    Description S;
    int n = 1;  // matrix size
    int d = 0;  // total degree bound, >= 0
    TruncMode mode = TruncMode::QuadraticModule;
};

// The exponent tuples used by a truncated cone, in the fixed enumeration
// order (all-zero first); tuples whose weight g^e exceeds degree d are
// omitted since they cannot carry a nonzero summand.
std::vector<std::vector<int>> exponent_tuples(const TruncatedPreordering& t);

// g^e for one tuple.
Poly<Rational> exponent_weight(const Description& s, const std::vector<int>& e);

struct CertificateBlock {
    std::vector<int> e;     // exponent tuple over the generators of S
    Eigen::MatrixXcd gram;  // PSD Gram matrix over (1, x, ..., x^{d_e}) ⊗ C^n
    double clip = 0.0;      // magnitude of the most negative eigenvalue clipped
};

struct Certificate {
    Description S;
    int n = 1;
    int d = 0;
    TruncMode mode = TruncMode::QuadraticModule;
    std::vector<CertificateBlock> blocks;
    double residual = 0.0;  // coefficientwise max-norm of F - sum_e sigma_e g^e
};

enum class MembershipStatus { Member, NotMemberAtDegree, Unknown };
std::string membership_status_name(MembershipStatus s);

struct MembershipReport {
    MembershipStatus status = MembershipStatus::Unknown;
    Certificate certificate;      // filled for Member
    std::vector<double> witness;  // filled for NotMemberAtDegree
    std::string note;
};

// The Gram-matrix feasibility problem: one PSD block per admitted exponent
// tuple, one linear constraint per (degree, upper-triangle entry, re/im
// part).  Throws std::invalid_argument if F is not Hermitian, F's shape
// disagrees with t.n, or deg F > t.d.
SdpProblem build_membership_sdp(const MatrixPoly<Gaussian>& f, const TruncatedPreordering& t);

// Solve the membership problem and post-process:
//   Member            -- extracted certificate, re-verified at 10*tol;
//   NotMemberAtDegree -- Farkas witness (strict margins, or a structurally
//                        unreachable coefficient);
//   Unknown           -- anything that cannot be certified either way.
MembershipReport check_membership(const MatrixPoly<Gaussian>& f, const TruncatedPreordering& t,
                                  double tol = 1e-8);

// Turn a feasible SDP outcome into a certificate: eigenvalue-clip each Gram
// matrix at zero and record the residual of the clipped representation.
// Throws std::runtime_error if any clipped eigenvalue is more negative than
// 10*tol (the outcome is then indeterminate-grade, not a certificate).
Certificate extract_certificate(const SdpOutcome& sol, const MatrixPoly<Gaussian>& f,
                                const TruncatedPreordering& t, double tol);

// Independent check: every Gram matrix has lambda_min >= -tol and the
// recomputed representation matches F coefficientwise within tol.
bool verify_certificate(const MatrixPoly<Gaussian>& f, const TruncatedPreordering& t,
                        const Certificate& c, double tol);

/* ------------------------------------------------------------------ */
/* Shared numeric helpers                                              */
/* ------------------------------------------------------------------ */

// Coefficientwise max-norm: the largest |entry| over all coefficients.
double matrix_poly_max_norm(const MatrixPoly<std::complex<double>>& f);
// Same value; used as the size scale when forming relative tolerances.
double matrix_poly_scale(const MatrixPoly<std::complex<double>>& f);

// sigma(x) = (v ⊗ I)^* Q (v ⊗ I) for a Gram matrix Q over the monomial
// basis (1, x, ..., x^k) ⊗ C^n: the coefficient of x^t is the sum of the
// n x n blocks Q[(i, j)] with i + j = t.
MatrixPoly<std::complex<double>> gram_to_sigma(const Eigen::MatrixXcd& q, int n);

// Recompute sum_e sigma_e g^e from a certificate's Gram matrices (each one
// hermitized first); what the certificate claims F to be.
MatrixPoly<std::complex<double>> certificate_value(const Certificate& c);

/* ------------------------------------------------------------------ */
/* Factorization over the whole line                                   */
/* ------------------------------------------------------------------ */

struct FejerRieszResult {
    MatrixPoly<std::complex<double>> factor;  // G with F = G*G, deg G <= deg F / 2
    double residual = 0.0;                    // coefficientwise |F - G*G| max-norm
    int iterations = 0;
};

// Factor a Hermitian matrix polynomial that is PSD on all of R as F = G*G.
// Routed through the Cayley transform z = (x - i)/(x + i) and circle
// spectral factorization, so the factor is square of degree <= deg F / 2.
// Throws std::invalid_argument for odd degree or non-Hermitian input,
// std::runtime_error if the factorization does not converge (e.g. F is not
// PSD on R).
FejerRieszResult fejer_riesz(const MatrixPoly<Gaussian>& f, double tol = 1e-8);

/* ------------------------------------------------------------------ */
/* Denominator search                                                  */
/* ------------------------------------------------------------------ */

struct DenominatorOptions {
    int k_max = 12;
    // degree bound to use at power k; default: deg F + 2k + 2 * max_e deg g^e
    std::function<int(int)> degree_schedule;
    int doublings = 1;  // extra attempts per k, doubling d on Unknown
    TruncMode mode = TruncMode::QuadraticModule;
    double tol = 1e-8;
};

struct DenominatorAttempt {
    int k = 0;
    int d = 0;
    MembershipStatus status = MembershipStatus::Unknown;
};

struct DenominatorResult {
    bool found = false;
    int k = 0;       // smallest power found (when found)
    int d_used = 0;  // degree bound of the successful certificate
    Certificate certificate;
    std::vector<DenominatorAttempt> attempts;  // full trail, for reporting
    std::string note;
};

// Search for the smallest k <= k_max with ((x - conj(w))(x - w))^k * F in the
// truncated cone at degree d(k).  Exhaustion never claims nonexistence.
// Throws std::invalid_argument if w is real (Im w = 0).
DenominatorResult denominator_search(const MatrixPoly<Gaussian>& f, const Description& s,
                                     Gaussian w, const DenominatorOptions& opts = {});

}  // namespace psdg
