#include "psdg/certsearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "psdg/spectral.hpp"

namespace psdg {

using CD = std::complex<double>;

namespace {

Poly<CD> to_float_poly(const Poly<Rational>& p) {
    return map_poly<CD>(p, [](const Rational& r) { return CD(r.get_d(), 0.0); });
}

}  // namespace

double matrix_poly_scale(const MatrixPoly<CD>& f) {
    double s = 0.0;
    for (int k = 0; k <= (f.is_zero() ? -1 : f.degree()); ++k) {
        const Mat<CD> c = f.coeff(k);
        for (int i = 0; i < c.rows(); ++i)
            for (int j = 0; j < c.cols(); ++j) s = std::max(s, std::abs(c(i, j)));
    }
    return s;
}

double matrix_poly_max_norm(const MatrixPoly<CD>& f) { return matrix_poly_scale(f); }

// sigma(x) = (v ⊗ I)^* Q (v ⊗ I) for a Gram matrix over (1..x^k) ⊗ C^n:
// the coefficient of x^t is the sum of the n x n blocks Q[(i, j)], i + j = t.
MatrixPoly<CD> gram_to_sigma(const Eigen::MatrixXcd& q, int n) {
    const int k = static_cast<int>(q.rows()) / n - 1;
    MatrixPoly<CD> sigma(n, n);
    for (int t = 0; t <= 2 * k; ++t) {
        Mat<CD> c(n, n);
        bool nonzero = false;
        for (int i = std::max(0, t - k); i <= std::min(k, t); ++i) {
            const int j = t - i;
            for (int p = 0; p < n; ++p)
                for (int qq = 0; qq < n; ++qq) {
                    CD v = q(i * n + p, j * n + qq);
                    if (v != CD(0.0, 0.0)) nonzero = true;
                    c(p, qq) += v;
                }
        }
        if (nonzero) sigma.set_coeff(t, c);
    }
    return sigma;
}

// Recompute sum_e sigma_e g^e from the certificate's Gram matrices.
MatrixPoly<CD> certificate_value(const Certificate& c) {
    MatrixPoly<CD> acc(c.n, c.n);
    for (const CertificateBlock& b : c.blocks) {
        Eigen::MatrixXcd q = 0.5 * (b.gram + b.gram.adjoint());
        MatrixPoly<CD> sigma = gram_to_sigma(q, c.n);
        Poly<CD> w = to_float_poly(exponent_weight(c.S, b.e));
        acc = acc + w * sigma;
    }
    return acc;
}

namespace {

// Shared enumeration of the linear coefficient-matching constraints, so the
// builder and the structural pre-scan can never disagree on ordering.
// yield(rhs, entries) is called once per constraint; entries may be empty
// when no Gram entry can reach that coefficient.
void for_each_constraint(const MatrixPoly<Gaussian>& f, const TruncatedPreordering& t,
                         const std::vector<std::vector<int>>& tuples,
                         const std::vector<Poly<Rational>>& weights,
                         const std::vector<int>& basis_degrees,
                         const std::function<void(double, std::vector<SdpProblem::Entry>&&)>& yield) {
    const int n = t.n;
    for (int deg = 0; deg <= t.d; ++deg) {
        const Mat<Gaussian> fc = f.coeff(deg);
        for (int p = 0; p < n; ++p)
            for (int q = p; q < n; ++q)
                for (int part = 0; part < (p == q ? 1 : 2); ++part) {
                    const bool im = part == 1;
                    std::vector<SdpProblem::Entry> entries;
                    for (size_t be = 0; be < tuples.size(); ++be) {
                        const int k = basis_degrees[be];
                        const int sz = n * (k + 1);
                        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(sz, sz);
                        bool nonzero = false;
                        for (int i = 0; i <= k; ++i)
                            for (int j = 0; j <= k; ++j) {
                                const int u = deg - i - j;
                                if (u < 0 || weights[be].is_zero() || u > weights[be].degree()) continue;
                                const double c = weights[be].coeff(u).get_d();
                                if (c == 0.0) continue;
                                nonzero = true;
                                const int row = i * n + p, col = j * n + q;
                                if (!im) {
                                    a(row, col) += 0.5 * c;
                                    a(col, row) += 0.5 * c;
                                } else {
                                    a(row, col) += CD(0.0, 0.5 * c);
                                    a(col, row) += CD(0.0, -0.5 * c);
                                }
                            }
                        if (nonzero) entries.push_back({static_cast<int>(be), a});
                    }
                    const CD fv = scalar_field<Gaussian>::to_complex(fc(p, q));
                    yield(im ? fv.imag() : fv.real(), std::move(entries));
                }
    }
}

struct ConeLayout {
    std::vector<std::vector<int>> tuples;
    std::vector<Poly<Rational>> weights;
    std::vector<int> basis_degrees;  // d_e per tuple
};

ConeLayout cone_layout(const TruncatedPreordering& t) {
    ConeLayout l;
    l.tuples = exponent_tuples(t);
    for (const auto& e : l.tuples) {
        Poly<Rational> w = exponent_weight(t.S, e);
        l.weights.push_back(w);
        l.basis_degrees.push_back((t.d - w.degree()) / 2);
    }
    return l;
}

void validate_inputs(const MatrixPoly<Gaussian>& f, const TruncatedPreordering& t) {
    if (t.n < 1) throw std::invalid_argument("membership: matrix size must be positive");
    if (t.d < 0) throw std::invalid_argument("membership: degree bound must be nonnegative");
    if (f.rows() != t.n || f.cols() != t.n)
        throw std::invalid_argument("membership: polynomial shape disagrees with the cone's matrix size");
    if (!f.is_hermitian()) throw std::invalid_argument("membership: polynomial is not Hermitian");
    if (!f.is_zero() && f.degree() > t.d)
        throw std::invalid_argument("membership: polynomial degree exceeds the degree bound");
}

}  // namespace

std::string trunc_mode_name(TruncMode m) {
    switch (m) {
        case TruncMode::QuadraticModule: return "QUADRATIC_MODULE";
        case TruncMode::Preordering: return "PREORDERING";
    }
    throw std::logic_error("trunc_mode_name: bad mode");
}

TruncMode trunc_mode_from_name(const std::string& s) {
    if (s == "QUADRATIC_MODULE") return TruncMode::QuadraticModule;
    if (s == "PREORDERING") return TruncMode::Preordering;
    throw std::invalid_argument("unknown truncation mode: " + s);
}

std::string membership_status_name(MembershipStatus s) {
    switch (s) {
        case MembershipStatus::Member: return "MEMBER";
        case MembershipStatus::NotMemberAtDegree: return "NOT_MEMBER_AT_DEGREE";
        case MembershipStatus::Unknown: return "UNKNOWN";
    }
    throw std::logic_error("membership_status_name: bad status");
}

std::vector<std::vector<int>> exponent_tuples(const TruncatedPreordering& t) {
    const int s = static_cast<int>(t.S.generators.size());
    std::vector<std::vector<int>> out;
    auto admit = [&](std::vector<int> e) {
        Poly<Rational> w = exponent_weight(t.S, e);
        if (w.is_zero() || w.degree() > t.d) return;
        out.push_back(std::move(e));
    };
    if (t.mode == TruncMode::QuadraticModule) {
        admit(std::vector<int>(static_cast<size_t>(s), 0));
        for (int j = 0; j < s; ++j) {
            std::vector<int> e(static_cast<size_t>(s), 0);
            e[static_cast<size_t>(j)] = 1;
            admit(std::move(e));
        }
    } else {
        if (s > 16) throw std::invalid_argument("preordering with more than 16 generators is not supported");
        for (long mask = 0; mask < (1L << s); ++mask) {
            std::vector<int> e(static_cast<size_t>(s), 0);
            for (int j = 0; j < s; ++j)
                if (mask & (1L << j)) e[static_cast<size_t>(j)] = 1;
            admit(std::move(e));
        }
    }
    if (out.size() > 200) throw std::invalid_argument("generator product count exceeds the block budget");
    return out;
}

Poly<Rational> exponent_weight(const Description& s, const std::vector<int>& e) {
    if (e.size() != s.generators.size())
        throw std::invalid_argument("exponent tuple length disagrees with the description");
    Poly<Rational> w = Poly<Rational>::constant(Rational(1));
    for (size_t j = 0; j < e.size(); ++j) {
        if (e[j] == 0) continue;
        if (e[j] != 1) throw std::invalid_argument("exponent tuples must be 0/1");
        w = w * s.generators[j].poly;
    }
    return w;
}

SdpProblem build_membership_sdp(const MatrixPoly<Gaussian>& f, const TruncatedPreordering& t) {
    validate_inputs(f, t);
    ConeLayout l = cone_layout(t);
    std::vector<int> sizes;
    for (int k : l.basis_degrees) sizes.push_back(t.n * (k + 1));
    SdpProblem p(sizes, std::vector<bool>(sizes.size(), true));
    for_each_constraint(f, t, l.tuples, l.weights, l.basis_degrees,
                        [&](double rhs, std::vector<SdpProblem::Entry>&& entries) {
                            p.add_constraint(entries, rhs);
                        });
    return p;
}

Certificate extract_certificate(const SdpOutcome& sol, const MatrixPoly<Gaussian>& f,
                                const TruncatedPreordering& t, double tol) {
    if (sol.status != SdpStatus::Feasible)
        throw std::invalid_argument("extract_certificate: outcome is not feasible");
    ConeLayout l = cone_layout(t);
    if (sol.primal.size() != l.tuples.size())
        throw std::invalid_argument("extract_certificate: block count disagrees with the cone");
    Certificate c;
    c.S = t.S;
    c.n = t.n;
    c.d = t.d;
    c.mode = t.mode;
    for (size_t be = 0; be < l.tuples.size(); ++be) {
        Eigen::MatrixXcd q = 0.5 * (sol.primal[be] + sol.primal[be].adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q);
        Eigen::VectorXd ev = es.eigenvalues();
        double worst = std::min(0.0, ev.minCoeff());
        if (worst < -10.0 * tol)
            throw std::runtime_error("extract_certificate: Gram matrix eigenvalue " +
                                     std::to_string(worst) + " is below the clipping threshold");
        Eigen::VectorXd clipped = ev.cwiseMax(0.0);
        CertificateBlock b;
        b.e = l.tuples[be];
        b.gram = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
        b.gram = 0.5 * (b.gram + b.gram.adjoint());
        b.clip = -worst;
        c.blocks.push_back(std::move(b));
    }
    MatrixPoly<CD> diff = to_float(f) - certificate_value(c);
    c.residual = matrix_poly_max_norm(diff);
    return c;
}

bool verify_certificate(const MatrixPoly<Gaussian>& f, const TruncatedPreordering& t,
                        const Certificate& c, double tol) {
    if (t.n < 1 || t.d < 0) return false;
    if (f.rows() != t.n || f.cols() != t.n || !f.is_hermitian()) return false;
    if (c.n != t.n || c.d != t.d || c.mode != t.mode) return false;
    std::vector<std::vector<int>> allowed = exponent_tuples(t);
    std::vector<std::vector<int>> seen;
    for (const CertificateBlock& b : c.blocks) {
        if (std::find(allowed.begin(), allowed.end(), b.e) == allowed.end()) return false;
        if (std::find(seen.begin(), seen.end(), b.e) != seen.end()) return false;
        seen.push_back(b.e);
        if (b.gram.rows() != b.gram.cols()) return false;
        if (b.gram.rows() == 0 || b.gram.rows() % t.n != 0) return false;
        const int k = static_cast<int>(b.gram.rows()) / t.n - 1;
        Poly<Rational> w = exponent_weight(t.S, b.e);
        if (2 * k + w.degree() > t.d) return false;
        double gs = std::max(1.0, b.gram.cwiseAbs().maxCoeff());
        if ((b.gram - b.gram.adjoint()).cwiseAbs().maxCoeff() > tol * gs) return false;
        Eigen::MatrixXcd q = 0.5 * (b.gram + b.gram.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol) return false;
    }
    Certificate local = c;
    local.S = t.S;  // recompute weights from the cone, not from the certificate
    MatrixPoly<CD> diff = to_float(f) - certificate_value(local);
    return matrix_poly_max_norm(diff) <= tol;
}

MembershipReport check_membership(const MatrixPoly<Gaussian>& f, const TruncatedPreordering& t,
                                  double tol) {
    validate_inputs(f, t);
    ConeLayout l = cone_layout(t);

    // The zero polynomial is a member of every truncated cone, exactly,
    // with every sigma_e = 0; no solve needed.
    if (f.is_zero()) {
        MembershipReport rep;
        rep.status = MembershipStatus::Member;
        rep.certificate.S = t.S;
        rep.certificate.n = t.n;
        rep.certificate.d = t.d;
        rep.certificate.mode = t.mode;
        for (size_t e = 0; e < l.tuples.size(); ++e) {
            CertificateBlock b;
            b.e = l.tuples[e];
            const int dim = t.n * (l.basis_degrees[e] + 1);
            b.gram = Eigen::MatrixXcd::Zero(dim, dim);
            rep.certificate.blocks.push_back(std::move(b));
        }
        rep.note = "zero polynomial: exact zero certificate";
        return rep;
    }

    // Structural refutation: a coefficient of F that no admitted Gram entry
    // can reach is an exact Farkas witness (0 = nonzero), with zero matrix
    // combination.  The interior-point solver cannot certify these strictly,
    // so they are handled before it runs.
    {
        int index = 0, hit = -1;
        double hit_rhs = 0.0;
        for_each_constraint(f, t, l.tuples, l.weights, l.basis_degrees,
                            [&](double rhs, std::vector<SdpProblem::Entry>&& entries) {
                                if (hit < 0 && entries.empty() && rhs != 0.0) {
                                    hit = index;
                                    hit_rhs = rhs;
                                }
                                ++index;
                            });
        if (hit >= 0) {
            MembershipReport structural;
            structural.status = MembershipStatus::NotMemberAtDegree;
            // sign chosen so <r, y> > 0; the matrix side of the witness is
            // identically zero, so the combination is trivially in -PSD
            structural.witness.assign(static_cast<size_t>(index), 0.0);
            structural.witness[static_cast<size_t>(hit)] = hit_rhs > 0.0 ? 1.0 : -1.0;
            structural.note = "coefficient unreachable at this degree bound (constraint " +
                              std::to_string(hit) + ", value " + std::to_string(hit_rhs) + ")";
            return structural;
        }
    }

    SdpProblem p = build_membership_sdp(f, t);
    SdpOptions opts;
    // The solver's feasibility contract is relative to the constraint scale
    // (here: F's coefficients); the certificate gate below is absolute, so
    // tighten the solve accordingly.
    opts.tol = tol / (1.0 + matrix_poly_scale(to_float(f)));
    SdpOutcome sol = sdp_solve(p, opts);

    MembershipReport rep;
    if (sol.status == SdpStatus::Feasible) {
        try {
            Certificate cert = extract_certificate(sol, f, t, tol);
            if (verify_certificate(f, t, cert, 10.0 * tol)) {
                rep.status = MembershipStatus::Member;
                rep.certificate = std::move(cert);
                rep.note = "certificate verified";
            } else {
                rep.status = MembershipStatus::Unknown;
                rep.note = "extracted certificate failed independent verification (residual " +
                           std::to_string(cert.residual) + ")";
            }
        } catch (const std::runtime_error& ex) {
            rep.status = MembershipStatus::Unknown;
            rep.note = ex.what();
        }
    } else if (sol.status == SdpStatus::Infeasible) {
        rep.status = MembershipStatus::NotMemberAtDegree;
        rep.witness = sol.witness;
        rep.note = "infeasibility witness verified (margins " +
                   std::to_string(sol.witness_eig_margin) + ", " +
                   std::to_string(sol.witness_rhs_margin) + ")";
    } else {
        rep.status = MembershipStatus::Unknown;
        rep.note = "solver indeterminate: " + sol.note;
    }
    return rep;
}

/* ------------------------------------------------------------------ */
/* Fejér–Riesz factorization via the Cayley transform                  */
/* ------------------------------------------------------------------ */

namespace {

// Exact square extraction over the rationals: p = v^2 * w with w having no
// repeated roots, via the squarefree decomposition p = lc * prod_j u_j^j
// (all gcd/division steps exact).  Returns false when v would be constant.
bool extract_square_part(const Poly<Rational>& p, Poly<Rational>& v, Poly<Rational>& w) {
    if (p.degree() < 2) return false;
    Poly<Rational> der = p.derivative();
    Poly<Rational> g0 = poly_gcd(p, der);
    if (g0.degree() < 1) return false;
    std::vector<Poly<Rational>> u;
    Poly<Rational> c = p.divmod(g0).first;
    Poly<Rational> d = der.divmod(g0).first - c.derivative();
    for (int guard = 0; guard <= p.degree() && c.degree() > 0; ++guard) {
        Poly<Rational> ui = poly_gcd(c, d);
        c = c.divmod(ui).first;
        d = d.divmod(ui).first - c.derivative();
        u.push_back(ui);
    }
    if (c.degree() > 0) return false;
    v = Poly<Rational>::constant(Rational(1));
    for (size_t j = 0; j < u.size(); ++j)
        for (size_t rep = 2; rep <= j + 1; rep += 2) v = v * u[j];
    if (v.degree() < 1) return false;
    auto dm = p.divmod(v * v);
    if (!dm.second.is_zero()) return false;
    w = dm.first;
    return true;
}

}  // namespace

FejerRieszResult fejer_riesz(const MatrixPoly<Gaussian>& f, double tol) {
    if (f.rows() != f.cols()) throw std::invalid_argument("fejer_riesz: input must be square");
    if (!f.is_hermitian()) throw std::invalid_argument("fejer_riesz: input is not Hermitian");
    const int n = f.rows();
    if (f.is_zero()) {
        FejerRieszResult r;
        r.factor = MatrixPoly<CD>(n, n);
        return r;
    }
    if (f.degree() % 2 != 0)
        throw std::invalid_argument("fejer_riesz: degree must be even");
    const int N = f.degree() / 2;

    // Scalar inputs: pull squared factors out exactly first.  A PSD scalar
    // polynomial has every real root at even multiplicity, so p = v^2 * w
    // with w > 0 on the whole line; the circle iteration converges fast on
    // strictly positive spectra but stalls on the circle zeros that real
    // roots transplant to.  Coefficients are real here: a Hermitian 1x1
    // coefficient equals its own conjugate.
    if (n == 1 && N >= 1) {
        const Poly<Gaussian> pg = f.entry(0, 0);
        std::vector<Rational> cs(static_cast<size_t>(pg.degree()) + 1);
        for (int k = 0; k <= pg.degree(); ++k) cs[static_cast<size_t>(k)] = pg.coeff(k).re;
        Poly<Rational> p(cs), v, w;
        if (extract_square_part(p, v, w)) {
            std::vector<Gaussian> wc(static_cast<size_t>(w.degree()) + 1);
            for (int k = 0; k <= w.degree(); ++k)
                wc[static_cast<size_t>(k)] = Gaussian(w.coeff(k), Rational(0));
            FejerRieszResult inner =
                fejer_riesz(MatrixPoly<Gaussian>::scalar(Poly<Gaussian>(wc), 1), tol);
            Poly<CD> vf = map_poly<CD>(v, [](const Rational& r) { return CD(r.get_d(), 0.0); });
            MatrixPoly<CD> g = vf * inner.factor;
            MatrixPoly<CD> ff = to_float(f);
            double res = matrix_poly_max_norm(ff - g.adjoint() * g);
            double scale = matrix_poly_scale(ff);
            if (res > tol * (1.0 + scale))
                throw std::runtime_error("fejer_riesz: factorization did not converge (residual " +
                                         std::to_string(res) +
                                         "); the input may not be PSD on the line");
            FejerRieszResult out;
            out.factor = std::move(g);
            out.residual = res;
            out.iterations = inner.iterations;
            return out;
        }
    }

    // Transplant to the circle with z = (x - i)/(x + i):
    //   Phi(z) := F(x) / (1 + x^2)^N
    //           = sum_m F_m i^m (1+z)^m (1-z)^(2N-m) / ((-4)^N z^N),
    // a Laurent band-N matrix polynomial, Hermitian and PSD on |z| = 1.
    const Gaussian one(Rational(1), Rational(0));
    const Gaussian iu = Gaussian(Rational(0), Rational(1));
    Poly<Gaussian> zp1({one, one});                           // 1 + z
    Poly<Gaussian> zm1({one, Gaussian(Rational(-1), Rational(0))});  // 1 - z
    MatrixPoly<Gaussian> num(n, n);
    Gaussian ipow = one;
    for (int m = 0; m <= f.degree(); ++m) {
        if (m > 0) ipow = ipow * iu;
        const Mat<Gaussian> fm = f.coeff(m);
        bool zero = true;
        for (int a = 0; a < n && zero; ++a)
            for (int b = 0; b < n; ++b)
                if (!scalar_field<Gaussian>::is_zero(fm(a, b))) { zero = false; break; }
        if (zero) continue;
        Poly<Gaussian> base = zp1.pow(m) * zm1.pow(2 * N - m);
        num = num + (base * Poly<Gaussian>::constant(ipow)) * MatrixPoly<Gaussian>::constant(fm);
    }
    Rational denom(1);
    for (int k = 0; k < N; ++k) denom *= Rational(-4);
    num = Poly<Gaussian>::constant(Gaussian(Rational(1) / denom, Rational(0))) * num;
    LaurentMatrixPoly<Gaussian> phi_exact = LaurentMatrixPoly<Gaussian>::from_matrix_poly(num).shifted(-N);
    if (!phi_exact.is_circle_hermitian())
        throw std::logic_error("fejer_riesz: transplanted spectrum lost Hermitian structure");

    LaurentMatrixPoly<CD> phi(n, n);
    for (int k = phi_exact.low_degree(); k <= phi_exact.high_degree(); ++k)
        phi.set_coeff(k, map_mat<CD>(phi_exact.coeff(k), [](const Gaussian& g) {
                          return scalar_field<Gaussian>::to_complex(g);
                      }));

    SpectralOptions sopts;
    sopts.tol = std::min(tol, 1e-9);
    SpectralResult sp = spectral_factor_circle(phi, sopts);

    // Pull the factor back to the line: G(x) = sum_k Ghat_k (x-i)^k (x+i)^(N-k).
    Poly<CD> xpi({CD(0.0, 1.0), CD(1.0, 0.0)});   // x + i
    Poly<CD> xmi({CD(0.0, -1.0), CD(1.0, 0.0)});  // x - i
    MatrixPoly<CD> g(n, n);
    for (int k = 0; k <= std::max(0, sp.factor.is_zero() ? 0 : sp.factor.degree()); ++k) {
        Mat<CD> gk = sp.factor.coeff(k);
        bool zero = true;
        for (int a = 0; a < n && zero; ++a)
            for (int b = 0; b < n; ++b)
                if (gk(a, b) != CD(0.0, 0.0)) { zero = false; break; }
        if (zero) continue;
        Poly<CD> base = xmi.pow(k) * xpi.pow(N - k);
        g = g + base * MatrixPoly<CD>::constant(gk);
    }

    MatrixPoly<CD> ff = to_float(f);
    double res = matrix_poly_max_norm(ff - g.adjoint() * g);
    double scale = matrix_poly_scale(ff);
    if (res > tol * (1.0 + scale))
        throw std::runtime_error("fejer_riesz: factorization did not converge (residual " +
                                 std::to_string(res) + "); the input may not be PSD on the line");
    FejerRieszResult out;
    out.factor = std::move(g);
    out.residual = res;
    out.iterations = sp.iterations;
    return out;
}

/* ------------------------------------------------------------------ */
/* Denominator search                                                  */
/* ------------------------------------------------------------------ */

DenominatorResult denominator_search(const MatrixPoly<Gaussian>& f, const Description& s,
                                     Gaussian w, const DenominatorOptions& opts) {
    if (scalar_field<Rational>::is_zero(w.im))
        throw std::invalid_argument("denominator_search: w must have nonzero imaginary part");
    if (f.rows() != f.cols()) throw std::invalid_argument("denominator_search: input must be square");
    if (!f.is_hermitian()) throw std::invalid_argument("denominator_search: input is not Hermitian");
    if (opts.k_max < 0) throw std::invalid_argument("denominator_search: k_max must be nonnegative");

    // (x - conj(w))(x - w) = x^2 - 2 Re(w) x + |w|^2, a real quadratic
    // positive on all of R.
    Poly<Gaussian> qw({Gaussian(w.re * w.re + w.im * w.im, Rational(0)),
                       Gaussian(Rational(-2) * w.re, Rational(0)),
                       Gaussian(Rational(1), Rational(0))});

    int s_max = 0;
    for (const auto& gen : s.generators)
        if (!gen.poly.is_zero()) s_max = std::max(s_max, gen.poly.degree());
    const int deg_f = f.is_zero() ? 0 : f.degree();

    DenominatorResult out;
    MatrixPoly<Gaussian> fk = f;
    for (int k = 0; k <= opts.k_max; ++k) {
        if (k > 0) fk = qw * fk;
        int d = opts.degree_schedule ? opts.degree_schedule(k) : deg_f + 2 * k + 2 * s_max;
        const int deg_fk = fk.is_zero() ? 0 : fk.degree();
        if (d < deg_fk) d = deg_fk;
        for (int attempt = 0; attempt <= opts.doublings; ++attempt) {
            TruncatedPreordering t{s, f.rows(), d, opts.mode};
            MembershipReport rep = check_membership(fk, t, opts.tol);
            out.attempts.push_back({k, d, rep.status});
            if (rep.status == MembershipStatus::Member) {
                out.found = true;
                out.k = k;
                out.d_used = d;
                out.certificate = std::move(rep.certificate);
                out.note = "certificate verified at power " + std::to_string(k) +
                           ", degree bound " + std::to_string(d);
                return out;
            }
            if (rep.status == MembershipStatus::NotMemberAtDegree) break;
            d *= 2;  // Unknown: retry with more degree headroom
        }
    }
    out.found = false;
    out.note = "power budget exhausted at k_max = " + std::to_string(opts.k_max) +
               "; no conclusion about membership at higher powers";
    return out;
}

}  // namespace psdg
