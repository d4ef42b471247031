#include "psdg/reduction.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace psdg {

using CD = std::complex<double>;

namespace {

Gaussian eval_poly(const Poly<Gaussian>& p, const Gaussian& x) {
    Gaussian acc;
    if (p.is_zero()) return acc;
    for (int k = p.degree(); k >= 0; --k) acc = acc * x + p.coeff(k);
    return acc;
}

bool poly_is_real(const Poly<Gaussian>& p) {
    if (p.is_zero()) return true;
    for (int k = 0; k <= p.degree(); ++k)
        if (sgn(p.coeff(k).im) != 0) return false;
    return true;
}

// Exact inverse by Gauss-Jordan elimination over an exact field.
template <class S>
Mat<S> mat_inverse_exact(Mat<S> a) {
    const int n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("mat_inverse_exact: non-square");
    Mat<S> inv = Mat<S>::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (!scalar_field<S>::is_zero(a(r, col))) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::invalid_argument("mat_inverse_exact: singular matrix");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        const S f = a(col, col);
        for (int j = 0; j < n; ++j) {
            a(col, j) = a(col, j) / f;
            inv(col, j) = inv(col, j) / f;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || scalar_field<S>::is_zero(a(r, col))) continue;
            const S g = a(r, col);
            for (int j = 0; j < n; ++j) {
                a(r, j) -= g * a(col, j);
                inv(r, j) -= g * inv(col, j);
            }
        }
    }
    return inv;
}

MatrixPoly<Gaussian> from_entries(int rows, int cols,
                                  const std::vector<std::vector<Poly<Gaussian>>>& e) {
    int deg = -1;
    for (const auto& row : e)
        for (const auto& p : row)
            if (!p.is_zero()) deg = std::max(deg, p.degree());
    MatrixPoly<Gaussian> out(rows, cols);
    for (int k = 0; k <= deg; ++k) {
        Mat<Gaussian> mk(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) mk(i, j) = e[i][j].coeff(k);
        out.set_coeff(k, mk);
    }
    return out;
}

// diag(d, D) as one matrix polynomial of size 1 + D.rows().
MatrixPoly<Gaussian> embed_diag(const Poly<Gaussian>& d, const MatrixPoly<Gaussian>& D) {
    const int n = D.rows() + 1;
    std::vector<std::vector<Poly<Gaussian>>> e(static_cast<size_t>(n),
                                               std::vector<Poly<Gaussian>>(static_cast<size_t>(n)));
    e[0][0] = d;
    for (int i = 0; i < D.rows(); ++i)
        for (int j = 0; j < D.cols(); ++j)
            e[static_cast<size_t>(i + 1)][static_cast<size_t>(j + 1)] = D.entry(i, j);
    return from_entries(n, n, e);
}

Eigen::MatrixXcd to_eigen(const Mat<CD>& m) {
    Eigen::MatrixXcd r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
    return r;
}

// Swap rows 1 and k (1-based) of the identity.
template <class S>
Mat<S> swap_rows_matrix(int n, int k) {
    Mat<S> p = Mat<S>::identity(n);
    if (k > 1) {
        p(0, 0) = scalar_field<S>::zero();
        p(k - 1, k - 1) = scalar_field<S>::zero();
        p(0, k - 1) = scalar_field<S>::one();
        p(k - 1, 0) = scalar_field<S>::one();
    }
    return p;
}

}  // namespace

/* ------------------------------------------------------------------ */
/* Pivot unitaries                                                      */
/* ------------------------------------------------------------------ */

PivotUnitaries pivot_unitaries(int n, int k, int l) {
    if (n < 1 || k < 1 || k > l || l > n)
        throw std::invalid_argument("pivot_unitaries: indices out of range");
    if (k == l) {
        Mat<QuadGaussian> p = swap_rows_matrix<QuadGaussian>(n, k);
        return {p, p};
    }
    const Quad inv_s2 = Quad(1) / Quad::sqrt2();
    const QuadGaussian h(inv_s2, Quad(0));
    const QuadGaussian ih(Quad(0), inv_s2);
    Mat<QuadGaussian> s = Mat<QuadGaussian>::identity(n);
    s(k - 1, k - 1) = h;
    s(k - 1, l - 1) = h;
    s(l - 1, k - 1) = h;
    s(l - 1, l - 1) = -h;
    Mat<QuadGaussian> st = Mat<QuadGaussian>::identity(n);
    st(k - 1, k - 1) = h;
    st(k - 1, l - 1) = ih;
    st(l - 1, k - 1) = h;
    st(l - 1, l - 1) = -ih;
    Mat<QuadGaussian> p = swap_rows_matrix<QuadGaussian>(n, k);
    return {p * s, p * st};
}

static void check_pair_indices(const MatrixPoly<Gaussian>& G, int k, int l, const char* who) {
    if (G.rows() != G.cols()) throw std::invalid_argument(std::string(who) + ": G must be square");
    if (k < 1 || k > l || l > G.rows())
        throw std::invalid_argument(std::string(who) + ": indices out of range");
}

Poly<Gaussian> pivot_p(const MatrixPoly<Gaussian>& G, int k, int l) {
    check_pair_indices(G, k, l, "pivot_p");
    if (k == l) return G.entry(k - 1, k - 1);
    const Poly<Gaussian> half =
        Poly<Gaussian>::constant(Gaussian(make_rational(1, 2), Rational(0)));
    return (G.entry(k - 1, l - 1) + G.entry(l - 1, k - 1) + G.entry(k - 1, k - 1) +
            G.entry(l - 1, l - 1)) *
           half;
}

Poly<Gaussian> pivot_r(const MatrixPoly<Gaussian>& G, int k, int l) {
    check_pair_indices(G, k, l, "pivot_r");
    if (k == l) return G.entry(k - 1, k - 1);
    const Poly<Gaussian> half =
        Poly<Gaussian>::constant(Gaussian(make_rational(1, 2), Rational(0)));
    const Poly<Gaussian> ihalf =
        Poly<Gaussian>::constant(Gaussian(Rational(0), make_rational(1, 2)));
    return (G.entry(l - 1, k - 1) - G.entry(k - 1, l - 1)) * ihalf +
           (G.entry(k - 1, k - 1) + G.entry(l - 1, l - 1)) * half;
}

/* ------------------------------------------------------------------ */
/* Pivot selection                                                      */
/* ------------------------------------------------------------------ */

std::string pivot_case_name(PivotCase c) {
    switch (c) {
        case PivotCase::Diagonal: return "DIAGONAL";
        case PivotCase::PairSym: return "PAIR_SYM";
        case PivotCase::PairSkew: return "PAIR_SKEW";
    }
    throw std::logic_error("pivot_case_name: bad enum");
}

PivotData select_pivot(const MatrixPoly<Gaussian>& G, const Gaussian& x0) {
    if (G.rows() != G.cols()) throw std::invalid_argument("select_pivot: G must be square");
    if (!G.is_hermitian()) throw std::invalid_argument("select_pivot: G must be Hermitian");
    const int n = G.rows();
    const Mat<Gaussian> g0 = G.evaluate(x0);
    if (g0.is_zero()) throw std::invalid_argument("select_pivot: G(x0) = 0");
    for (int k = 1; k <= n; ++k)
        if (!g0(k - 1, k - 1).is_zero()) {
            PivotData pd;
            pd.kase = PivotCase::Diagonal;
            pd.k0 = pd.l0 = k;
            pd.T = pivot_unitaries(n, k, k).U;
            pd.pivot = G.entry(k - 1, k - 1);
            return pd;
        }
    for (int k = 1; k <= n; ++k)
        for (int l = k + 1; l <= n; ++l) {
            if (g0(k - 1, l - 1).is_zero() && g0(l - 1, k - 1).is_zero()) continue;
            PivotUnitaries uv = pivot_unitaries(n, k, l);
            Poly<Gaussian> p = pivot_p(G, k, l);
            if (!eval_poly(p, x0).is_zero()) return {PivotCase::PairSym, k, l, uv.U, p};
            Poly<Gaussian> r = pivot_r(G, k, l);
            if (!eval_poly(r, x0).is_zero()) return {PivotCase::PairSkew, k, l, uv.V, r};
            // With every diagonal vanishing at x0, p(x0) and r(x0) are the
            // values at x0 of the coefficientwise real and imaginary parts
            // of g_{kl}; if both vanish, hermiticity makes g_{kl}(x0) and
            // g_{lk}(x0) vanish too, contradicting the entry test above.
            throw std::logic_error("select_pivot: pivot dichotomy violated");
        }
    throw std::logic_error("select_pivot: scan found no nonzero entry");
}

/* ------------------------------------------------------------------ */
/* Triangular congruence splitting                                      */
/* ------------------------------------------------------------------ */

SchurSplit schur_split(const MatrixPoly<Gaussian>& F) {
    if (F.rows() != F.cols() || F.rows() < 2)
        throw std::invalid_argument("schur_split: need a square input of size >= 2");
    if (!F.is_hermitian()) throw std::invalid_argument("schur_split: input must be Hermitian");
    const int n = F.rows();
    const Poly<Gaussian> a = F.entry(0, 0);
    if (!poly_is_real(a))
        throw std::invalid_argument("schur_split: top-left scalar must have real coefficients");

    std::vector<int> rest;
    for (int i = 1; i < n; ++i) rest.push_back(i);
    MatrixPoly<Gaussian> beta = F.submatrix({0}, rest);      // 1 x (n-1)
    MatrixPoly<Gaussian> C = F.submatrix(rest, rest);        // (n-1) x (n-1)

    SchurSplit out;
    out.d = a * a * a;
    out.D = Poly<Gaussian>(a) * (Poly<Gaussian>(a) * C - beta.adjoint() * beta);

    // L_plus = [[a, beta], [0, a I]],  L_minus = [[a, -beta], [0, a I]].
    std::vector<std::vector<Poly<Gaussian>>> lp(static_cast<size_t>(n),
                                                std::vector<Poly<Gaussian>>(static_cast<size_t>(n)));
    std::vector<std::vector<Poly<Gaussian>>> lm = lp;
    lp[0][0] = a;
    lm[0][0] = a;
    for (int j = 1; j < n; ++j) {
        lp[0][static_cast<size_t>(j)] = beta.entry(0, j - 1);
        lm[0][static_cast<size_t>(j)] = -beta.entry(0, j - 1);
        lp[static_cast<size_t>(j)][static_cast<size_t>(j)] = a;
        lm[static_cast<size_t>(j)][static_cast<size_t>(j)] = a;
    }
    out.L_plus = from_entries(n, n, lp);
    out.L_minus = from_entries(n, n, lm);

    // Re-multiply both identities exactly; failure is an arithmetic bug.
    MatrixPoly<Gaussian> mid = embed_diag(out.d, out.D);
    Poly<Gaussian> a4 = (a * a) * (a * a);
    if (!(a4 * F - out.L_plus.adjoint() * mid * out.L_plus).is_zero())
        throw std::logic_error("schur_split: first congruence identity failed");
    if (!(mid - out.L_minus.adjoint() * F * out.L_minus).is_zero())
        throw std::logic_error("schur_split: second congruence identity failed");
    return out;
}

/* ------------------------------------------------------------------ */
/* Root factoring                                                       */
/* ------------------------------------------------------------------ */

RootFactor factor_out_root(const MatrixPoly<Gaussian>& F, const Gaussian& x0) {
    if (F.is_zero()) throw std::invalid_argument("factor_out_root: F must not be zero");
    RootFactor out;
    if (sgn(x0.im) == 0) {
        out.c = Poly<Gaussian>({Gaussian(-x0.re, Rational(0)), Gaussian(Rational(1), Rational(0))});
    } else {
        // (x - x0)(x - conj x0) = x^2 - 2 Re(x0) x + |x0|^2, real coefficients
        Rational nrm = x0.re * x0.re + x0.im * x0.im;
        out.c = Poly<Gaussian>({Gaussian(nrm, Rational(0)),
                                Gaussian(Rational(-2) * x0.re, Rational(0)),
                                Gaussian(Rational(1), Rational(0))});
    }

    const int rows = F.rows(), cols = F.cols();
    std::vector<std::vector<Poly<Gaussian>>> e(static_cast<size_t>(rows),
                                               std::vector<Poly<Gaussian>>(static_cast<size_t>(cols)));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) e[static_cast<size_t>(i)][static_cast<size_t>(j)] = F.entry(i, j);

    for (;;) {
        std::vector<std::vector<Poly<Gaussian>>> q = e;
        bool divisible = true;
        for (int i = 0; i < rows && divisible; ++i)
            for (int j = 0; j < cols; ++j) {
                const Poly<Gaussian>& p = e[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (p.is_zero()) {
                    q[static_cast<size_t>(i)][static_cast<size_t>(j)] = p;
                    continue;
                }
                auto dm = p.divmod(out.c);
                if (!dm.second.is_zero()) {
                    divisible = false;
                    break;
                }
                q[static_cast<size_t>(i)][static_cast<size_t>(j)] = dm.first;
            }
        if (!divisible) break;
        e = std::move(q);
        ++out.m;
    }
    out.G = from_entries(rows, cols, e);
    if (out.G.evaluate(x0).is_zero())
        throw std::invalid_argument(
            "factor_out_root: quotient still vanishes at x0 (input is not Hermitian)");
    return out;
}

/* ------------------------------------------------------------------ */
/* Scalar membership oracle                                             */
/* ------------------------------------------------------------------ */

ScalarOracle default_scalar_oracle(const Description& S, int extra_rounds, double tol) {
    return [S, extra_rounds, tol](const Poly<Gaussian>& p) -> MembershipReport {
        MatrixPoly<Gaussian> f = MatrixPoly<Gaussian>::scalar(p, 1);
        const int base = p.is_zero() ? 0 : p.degree();
        MembershipReport last;
        for (int round = 0; round <= extra_rounds; ++round) {
            TruncatedPreordering t{S, 1, base + 2 * round, TruncMode::QuadraticModule};
            last = check_membership(f, t, tol);
            if (last.status == MembershipStatus::Member) return last;
        }
        return last;
    };
}

/* ------------------------------------------------------------------ */
/* The h^2 F procedure                                                  */
/* ------------------------------------------------------------------ */

namespace {

// Flat Gram data per exponent tuple.
using BlockMap = std::map<std::vector<int>, Eigen::MatrixXcd>;

struct ReduceResult {
    Poly<Gaussian> h;  // real, h(x0) != 0
    BlockMap blocks;   // flat certificate for h^2 * F_level
    std::vector<ReductionLevel> levels;
};

BlockMap blocks_of(const Certificate& c) {
    BlockMap m;
    for (const CertificateBlock& b : c.blocks) m[b.e] = b.gram;
    return m;
}

// Given sigma = A^* diag(s, tau) A with s, tau presented by Gram matrices
// over monomial bases, produce the flat Gram of sigma over the monomial
// basis of the ambient size n = A.cols().  Either side may be absent
// (zero rows).  Qs is over (1, x, ..., x^ds); Qt over
// (1, ..., x^dt) (x) C^{n-1} with degree-major indexing.
Eigen::MatrixXcd compose_gram(const MatrixPoly<CD>& A, const Eigen::MatrixXcd& Qs,
                              const Eigen::MatrixXcd& Qt) {
    const int n = A.cols();
    const int n1 = n - 1;
    const int ms = static_cast<int>(Qs.rows());
    const int mt = static_cast<int>(Qt.rows());
    const int ds = ms - 1;                       // -1 when absent
    const int dt = mt > 0 ? mt / n1 - 1 : -1;    // -1 when absent
    const int dega = std::max(A.degree(), 0);
    const int delta = std::max(ds, dt) + dega;   // degree bound of Z * A

    // C holds the coefficients of R(x) = Z(x) A(x): block column t of C is
    // the coefficient of x^t in R.  Top rows: x^i * (row 1 of A); bottom
    // rows, degree-major: x^j * (row 1+q of A).
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(ms + mt, static_cast<Eigen::Index>(n) * (delta + 1));
    for (int t = 0; t <= dega; ++t) {
        const Mat<CD> at = A.coeff(t);
        for (int i = 0; i <= ds; ++i) {
            const int col0 = (t + i) * n;
            for (int j = 0; j < n; ++j) C(i, col0 + j) += at(0, j);
        }
        for (int jdeg = 0; jdeg <= dt; ++jdeg)
            for (int q = 0; q < n1; ++q) {
                const int row = ms + jdeg * n1 + q;
                const int col0 = (t + jdeg) * n;
                for (int j = 0; j < n; ++j) C(row, col0 + j) += at(1 + q, j);
            }
    }
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(ms + mt, ms + mt);
    if (ms > 0) B.topLeftCorner(ms, ms) = Qs;
    if (mt > 0) B.bottomRightCorner(mt, mt) = Qt;
    Eigen::MatrixXcd Q = C.adjoint() * B * C;
    return 0.5 * (Q + Q.adjoint().eval());
}

// sigma_e from a flat Gram over (1, ..., x^k) (x) C^n.
MatrixPoly<CD> sigma_from_gram(const Eigen::MatrixXcd& Q, int n) {
    const int k = static_cast<int>(Q.rows()) / n - 1;
    MatrixPoly<CD> sigma(n, n);
    for (int t = 0; t <= 2 * k; ++t) {
        Mat<CD> mt(n, n);
        for (int i = std::max(0, t - k); i <= std::min(k, t); ++i) {
            const int j = t - i;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) mt(p, q) += Q(i * n + p, j * n + q);
        }
        sigma.set_coeff(t, mt);
    }
    return sigma;
}

double matrix_poly_scale_cd(const MatrixPoly<CD>& f) {
    double s = 0.0;
    if (f.is_zero()) return s;
    for (int k = 0; k <= f.degree(); ++k) {
        const Mat<CD> c = f.coeff(k);
        for (int i = 0; i < c.rows(); ++i)
            for (int j = 0; j < c.cols(); ++j) s = std::max(s, std::abs(c(i, j)));
    }
    return s;
}

}  // namespace

CertificatePlan h2f_reduce(const MatrixPoly<Gaussian>& F, const SemialgSet& K,
                           const Description& S, const Gaussian& x0, const H2FOptions& opts) {
    if (F.rows() != F.cols()) throw std::invalid_argument("h2f_reduce: F must be square");
    if (!F.is_hermitian()) throw std::invalid_argument("h2f_reduce: F must be Hermitian");
    if (K.is_empty()) throw std::invalid_argument("h2f_reduce: K must be nonempty");
    if (!K.is_compact()) throw std::invalid_argument("h2f_reduce: K must be compact");
    const int n = F.rows();

    // Sampled PSD guard: Chebyshev nodes on every interval piece plus all
    // endpoints/points.  A guard, not a proof.
    if (opts.sample_check && !F.is_zero()) {
        MatrixPoly<CD> ff = to_float(F);
        const double scale = matrix_poly_scale_cd(ff);
        auto eig_ok = [&](double x) -> bool {
            Eigen::MatrixXcd m = to_eigen(ff.evaluate_complex(CD(x, 0.0)));
            Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint().eval());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
            return es.eigenvalues().minCoeff() >= -1e-9 * (1.0 + scale);
        };
        for (const Piece& piece : K.pieces()) {
            if (piece.kind == Piece::Kind::Point) {
                if (!eig_ok(to_double(piece.lo)))
                    throw std::invalid_argument("h2f_reduce: F is not PSD on K (sampled point)");
                continue;
            }
            const double lo = to_double(piece.lo), hi = to_double(piece.hi);
            for (int k = 0; k < 64; ++k) {
                const double x =
                    0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(M_PI * k / 63.0);
                if (!eig_ok(x))
                    throw std::invalid_argument("h2f_reduce: F is not PSD on K (sampled point)");
            }
        }
    }

    ScalarOracle oracle = opts.scalar_oracle;
    if (!oracle) oracle = default_scalar_oracle(S, 4, opts.tol);

    auto scalar_member = [&oracle](const Poly<Gaussian>& p, const char* what) -> Certificate {
        MembershipReport rep = oracle(p);
        if (rep.status != MembershipStatus::Member)
            throw std::runtime_error(std::string("h2f_reduce: scalar oracle returned ") +
                                     membership_status_name(rep.status) + " for the " + what +
                                     " block (" + rep.note + ")");
        return rep.certificate;
    };

    // Recursive descent.  Returns h and a flat certificate for h^2 * F_level.
    std::function<ReduceResult(const MatrixPoly<Gaussian>&)> reduce =
        [&](const MatrixPoly<Gaussian>& f) -> ReduceResult {
        ReduceResult res;
        res.h = Poly<Gaussian>::constant(Gaussian(Rational(1), Rational(0)));
        if (f.is_zero()) return res;  // zero certificate: every sigma_e = 0
        if (f.rows() == 1) {
            Certificate cert = scalar_member(f.entry(0, 0), "base");
            res.blocks = blocks_of(cert);
            return res;
        }

        ReductionLevel lvl;
        lvl.size = f.rows();

        RootFactor rf = factor_out_root(f, x0);
        lvl.c = rf.c;
        lvl.m = rf.m;
        lvl.pivot = select_pivot(rf.G, x0);

        // Rational congruence with the same top-left data as the unitary:
        // first row e_k (Diagonal, as a row swap), e_k + e_l (PairSym), or
        // e_k + i e_l (PairSkew); remaining rows complete a basis.
        const int nl = f.rows();
        Mat<Gaussian> R(nl, nl);
        const int k0 = lvl.pivot.k0 - 1, l0 = lvl.pivot.l0 - 1;
        if (lvl.pivot.kase == PivotCase::Diagonal) {
            R = swap_rows_matrix<Gaussian>(nl, lvl.pivot.k0);
        } else {
            R(0, k0) = Gaussian(Rational(1), Rational(0));
            R(0, l0) = lvl.pivot.kase == PivotCase::PairSym
                           ? Gaussian(Rational(1), Rational(0))
                           : Gaussian(Rational(0), Rational(1));
            int row = 1;
            for (int j = 0; j < nl; ++j) {
                if (j == k0) continue;
                R(row, j) = Gaussian(Rational(1), Rational(0));
                ++row;
            }
        }
        const Mat<Gaussian> Rinv = mat_inverse_exact(R);

        MatrixPoly<Gaussian> gprime = MatrixPoly<Gaussian>::constant(R) * rf.G *
                                      MatrixPoly<Gaussian>::constant(R.adjoint());
        lvl.pivot_scalar = gprime.entry(0, 0);
        if (!poly_is_real(lvl.pivot_scalar))
            throw std::logic_error("h2f_reduce: pivot scalar is not real");
        if (eval_poly(lvl.pivot_scalar, x0).is_zero())
            throw std::logic_error("h2f_reduce: pivot scalar vanishes at x0");

        SchurSplit sp = schur_split(gprime);
        Poly<Gaussian> cm = lvl.c.pow(lvl.m);
        lvl.d = cm * sp.d;
        lvl.D = cm * sp.D;

        // t^4 F = A^* diag(d, D) A with A = L_plus * Rinv^*; checked exactly.
        lvl.congruence =
            sp.L_plus * MatrixPoly<Gaussian>::constant(Rinv.adjoint());
        {
            Poly<Gaussian> t2 = lvl.pivot_scalar * lvl.pivot_scalar;
            MatrixPoly<Gaussian> lhs = (t2 * t2) * f;
            MatrixPoly<Gaussian> rhs =
                lvl.congruence.adjoint() * embed_diag(lvl.d, lvl.D) * lvl.congruence;
            if (!(lhs - rhs).is_zero())
                throw std::logic_error("h2f_reduce: assembled congruence identity failed");
        }

        ReduceResult sub = reduce(lvl.D);
        Poly<Gaussian> scalar_target = sub.h * sub.h * lvl.d;
        lvl.scalar_certificate = scalar_member(scalar_target, "scalar");

        res.h = sub.h * lvl.pivot_scalar * lvl.pivot_scalar;
        lvl.h_level = res.h;

        // Combine: h^2 F = A^* diag(h1^2 d, h1^2 D) A, so every sigma_e of
        // the combined certificate is A^* diag(s_e, tau_e) A.
        BlockMap scal = blocks_of(lvl.scalar_certificate);
        MatrixPoly<CD> af = to_float(lvl.congruence);
        std::vector<std::vector<int>> tuples;
        for (const auto& kv : scal) tuples.push_back(kv.first);
        for (const auto& kv : sub.blocks)
            if (!scal.count(kv.first)) tuples.push_back(kv.first);
        for (const std::vector<int>& e : tuples) {
            Eigen::MatrixXcd qs, qt;
            auto its = scal.find(e);
            if (its != scal.end()) qs = its->second;
            auto itt = sub.blocks.find(e);
            if (itt != sub.blocks.end()) qt = itt->second;
            res.blocks[e] = compose_gram(af, qs, qt);
        }

        res.levels.push_back(std::move(lvl));
        for (ReductionLevel& deeper : sub.levels) res.levels.push_back(std::move(deeper));
        return res;
    };

    ReduceResult top = reduce(F);

    CertificatePlan plan;
    plan.h = top.h;
    plan.levels = std::move(top.levels);
    plan.target = Poly<Gaussian>(top.h * top.h) * F;

    if (!poly_is_real(plan.h)) throw std::logic_error("h2f_reduce: h is not real");
    if (eval_poly(plan.h, x0).is_zero()) throw std::logic_error("h2f_reduce: h vanishes at x0");
    {
        // Degree contract: deg h <= deg F * (3^n - 1).
        long bound = 1;
        for (int i = 0; i < n; ++i) bound *= 3;
        bound = (bound - 1) * std::max(F.is_zero() ? 0 : F.degree(), 0);
        const int degh = plan.h.is_zero() ? 0 : plan.h.degree();
        if (degh > bound) throw std::logic_error("h2f_reduce: multiplier degree bound violated");
    }

    // Flatten the block map into a certificate and choose the cone degree.
    int dplan = 0;
    MatrixPoly<CD> target_f = to_float(plan.target);
    if (!plan.target.is_zero()) dplan = plan.target.degree();
    for (const auto& [e, q] : top.blocks) {
        const int k = static_cast<int>(q.rows()) / n - 1;
        Poly<Rational> w = exponent_weight(S, e);
        dplan = std::max(dplan, 2 * k + std::max(w.degree(), 0));
    }
    plan.cone = TruncatedPreordering{S, n, dplan, TruncMode::QuadraticModule};
    plan.certificate.S = S;
    plan.certificate.n = n;
    plan.certificate.d = dplan;
    plan.certificate.mode = TruncMode::QuadraticModule;

    MatrixPoly<CD> value(n, n);
    for (const auto& [e, q] : top.blocks) {
        CertificateBlock b;
        b.e = e;
        b.gram = q;
        plan.certificate.blocks.push_back(std::move(b));
        Poly<Rational> w = exponent_weight(S, e);
        Poly<CD> wf = map_poly<CD>(w, [](const Rational& r) { return CD(r.get_d(), 0.0); });
        value = value + wf * sigma_from_gram(q, n);
    }
    {
        MatrixPoly<CD> diff = target_f - value;
        double resid = matrix_poly_scale_cd(diff);
        plan.certificate.residual = resid;
        const double gate = opts.plan_tol * (1.0 + matrix_poly_scale_cd(target_f));
        if (resid > gate)
            throw std::runtime_error("h2f_reduce: assembled certificate residual " +
                                     std::to_string(resid) + " exceeds tolerance " +
                                     std::to_string(gate));
        if (!verify_certificate(plan.target, plan.cone, plan.certificate, gate))
            throw std::runtime_error("h2f_reduce: assembled certificate failed verification");
    }
    return plan;
}

}  // namespace psdg
