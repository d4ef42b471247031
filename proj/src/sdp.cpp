#include "psdg/sdp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace psdg {

/* ------------------------------------------------------------------ */
/* SdpProblem                                                          */
/* ------------------------------------------------------------------ */

SdpProblem::SdpProblem(std::vector<int> block_sizes, std::vector<bool> complex_flags)
    : sizes_(std::move(block_sizes)), complex_(std::move(complex_flags)) {
    if (sizes_.empty()) throw std::invalid_argument("SdpProblem: at least one block required");
    if (complex_.empty()) complex_.assign(sizes_.size(), false);
    if (complex_.size() != sizes_.size())
        throw std::invalid_argument("SdpProblem: complex_flags length mismatch");
    for (int s : sizes_) {
        if (s < 1 || s > 200) throw std::invalid_argument("SdpProblem: block sizes must be in [1, 200]");
    }
}

Eigen::MatrixXd SdpProblem::realify(int b, const Eigen::MatrixXcd& a, const char* who) const {
    const int k = sizes_[static_cast<size_t>(b)];
    if (a.rows() != k || a.cols() != k)
        throw std::invalid_argument(std::string(who) + ": coefficient shape mismatch on block " + std::to_string(b));
    double scale = a.cwiseAbs().maxCoeff();
    double htol = 1e-12 * std::max(1.0, scale);
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > htol)
        throw std::invalid_argument(std::string(who) + ": coefficient on block " + std::to_string(b) + " is not Hermitian");
    Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
    if (!complex_[static_cast<size_t>(b)]) {
        if (h.imag().cwiseAbs().maxCoeff() > htol)
            throw std::invalid_argument(std::string(who) + ": complex coefficient on real block " + std::to_string(b));
        return h.real();
    }
    // [[Re, -Im], [Im, Re]] halved, so inner products match the complex ones.
    Eigen::MatrixXd r(2 * k, 2 * k);
    r.topLeftCorner(k, k) = h.real();
    r.bottomRightCorner(k, k) = h.real();
    r.topRightCorner(k, k) = -h.imag();
    r.bottomLeftCorner(k, k) = h.imag();
    return 0.5 * r;
}

void SdpProblem::add_constraint(const std::vector<Entry>& entries, double rhs) {
    if (constraint_count() >= 5000) throw std::invalid_argument("SdpProblem: constraint budget exceeded");
    std::vector<Eigen::MatrixXd> row(sizes_.size());
    for (size_t b = 0; b < sizes_.size(); ++b)
        row[b] = Eigen::MatrixXd::Zero(real_block_size(static_cast<int>(b)), real_block_size(static_cast<int>(b)));
    std::vector<bool> seen(sizes_.size(), false);
    for (const Entry& e : entries) {
        if (e.block < 0 || e.block >= block_count())
            throw std::invalid_argument("SdpProblem::add_constraint: bad block index");
        if (seen[static_cast<size_t>(e.block)])
            throw std::invalid_argument("SdpProblem::add_constraint: duplicate block in one constraint");
        seen[static_cast<size_t>(e.block)] = true;
        row[static_cast<size_t>(e.block)] = realify(e.block, e.a, "SdpProblem::add_constraint");
    }
    constraints_.push_back(std::move(row));
    rhs_.push_back(rhs);
}

void SdpProblem::set_objective(const std::vector<Entry>& entries) {
    objective_.assign(sizes_.size(), Eigen::MatrixXd());
    for (size_t b = 0; b < sizes_.size(); ++b)
        objective_[b] = Eigen::MatrixXd::Zero(real_block_size(static_cast<int>(b)), real_block_size(static_cast<int>(b)));
    std::vector<bool> seen(sizes_.size(), false);
    for (const Entry& e : entries) {
        if (e.block < 0 || e.block >= block_count())
            throw std::invalid_argument("SdpProblem::set_objective: bad block index");
        if (seen[static_cast<size_t>(e.block)])
            throw std::invalid_argument("SdpProblem::set_objective: duplicate block");
        seen[static_cast<size_t>(e.block)] = true;
        objective_[static_cast<size_t>(e.block)] = realify(e.block, e.a, "SdpProblem::set_objective");
    }
    has_objective_ = true;
}

int SdpProblem::real_block_size(int b) const {
    return complex_.at(static_cast<size_t>(b)) ? 2 * sizes_[static_cast<size_t>(b)] : sizes_[static_cast<size_t>(b)];
}

const Eigen::MatrixXd& SdpProblem::real_coefficient(int c, int b) const {
    return constraints_.at(static_cast<size_t>(c)).at(static_cast<size_t>(b));
}

const Eigen::MatrixXd& SdpProblem::real_objective(int b) const {
    if (!has_objective_) throw std::logic_error("SdpProblem::real_objective: feasibility mode");
    return objective_.at(static_cast<size_t>(b));
}

namespace {

// Reconstruct the complex Hermitian coefficient from its realified form.
Eigen::MatrixXcd derealify(const Eigen::MatrixXd& m, int k, bool is_complex) {
    if (!is_complex) return m.cast<std::complex<double>>();
    Eigen::MatrixXd re = m.topLeftCorner(k, k) + m.bottomRightCorner(k, k);
    Eigen::MatrixXd im = m.bottomLeftCorner(k, k) - m.topRightCorner(k, k);
    // realify stored half the embedding, so the sums above restore 1x scale
    Eigen::MatrixXcd out(k, k);
    out.real() = re;
    out.imag() = im;
    return out;
}

}  // namespace

Eigen::MatrixXcd SdpProblem::coefficient(int c, int b) const {
    return derealify(real_coefficient(c, b), sizes_.at(static_cast<size_t>(b)), complex_.at(static_cast<size_t>(b)));
}

Eigen::MatrixXcd SdpProblem::objective_coefficient(int b) const {
    if (!has_objective_) {
        int k = sizes_.at(static_cast<size_t>(b));
        return Eigen::MatrixXcd::Zero(k, k);
    }
    return derealify(objective_.at(static_cast<size_t>(b)), sizes_.at(static_cast<size_t>(b)), complex_.at(static_cast<size_t>(b)));
}

std::string SdpProblem::dump_json() const {
    using nlohmann::ordered_json;
    ordered_json j;
    j["blocks"] = ordered_json::array();
    for (size_t b = 0; b < sizes_.size(); ++b)
        j["blocks"].push_back({{"size", sizes_[b]}, {"complex", static_cast<bool>(complex_[b])}});
    auto entries_of = [&](int c, bool objective) {
        ordered_json arr = ordered_json::array();
        for (int b = 0; b < block_count(); ++b) {
            Eigen::MatrixXcd a = objective ? objective_coefficient(b) : coefficient(c, b);
            for (int i = 0; i < a.rows(); ++i)
                for (int jj = i; jj < a.cols(); ++jj) {
                    std::complex<double> v = a(i, jj);
                    if (v == std::complex<double>(0.0, 0.0)) continue;
                    arr.push_back({{"block", b}, {"row", i}, {"col", jj}, {"re", v.real()}, {"im", v.imag()}});
                }
        }
        return arr;
    };
    j["constraints"] = ordered_json::array();
    for (int c = 0; c < constraint_count(); ++c)
        j["constraints"].push_back({{"rhs", rhs_[static_cast<size_t>(c)]}, {"entries", entries_of(c, false)}});
    if (has_objective_) j["objective"] = {{"entries", entries_of(0, true)}};
    return j.dump();
}

/* ------------------------------------------------------------------ */
/* Independent verifiers                                               */
/* ------------------------------------------------------------------ */

std::string sdp_status_name(SdpStatus s) {
    switch (s) {
        case SdpStatus::Feasible: return "FEASIBLE";
        case SdpStatus::Infeasible: return "INFEASIBLE";
        case SdpStatus::Indeterminate: return "INDETERMINATE";
    }
    throw std::logic_error("sdp_status_name: bad status");
}

bool sdp_verify_feasible(const SdpProblem& p, const std::vector<Eigen::MatrixXcd>& X,
                         double tol, double* max_violation, double* min_eig) {
    if (static_cast<int>(X.size()) != p.block_count())
        throw std::invalid_argument("sdp_verify_feasible: block count mismatch");
    double rmax = 0.0;
    for (int c = 0; c < p.constraint_count(); ++c) rmax = std::max(rmax, std::abs(p.rhs(c)));
    double viol = 0.0;
    for (int c = 0; c < p.constraint_count(); ++c) {
        double v = 0.0;
        for (int b = 0; b < p.block_count(); ++b)
            v += (p.coefficient(c, b).adjoint() * X[static_cast<size_t>(b)]).trace().real();
        viol = std::max(viol, std::abs(v - p.rhs(c)));
    }
    double me = std::numeric_limits<double>::infinity();
    for (int b = 0; b < p.block_count(); ++b) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(X[static_cast<size_t>(b)], Eigen::EigenvaluesOnly);
        me = std::min(me, es.eigenvalues().minCoeff());
    }
    if (max_violation) *max_violation = viol;
    if (min_eig) *min_eig = me;
    return viol <= tol * (1.0 + rmax) && me >= -tol;
}

bool sdp_verify_infeasible(const SdpProblem& p, const std::vector<double>& y,
                           double* eig_margin, double* rhs_margin) {
    if (static_cast<int>(y.size()) != p.constraint_count())
        throw std::invalid_argument("sdp_verify_infeasible: witness length mismatch");
    double ymax = 0.0;
    for (double v : y) ymax = std::max(ymax, std::abs(v));
    if (!(ymax > 0.0) || !std::isfinite(ymax)) return false;
    double emax = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < p.block_count(); ++b) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(p.block_size(b), p.block_size(b));
        for (int c = 0; c < p.constraint_count(); ++c)
            m += (y[static_cast<size_t>(c)] / ymax) * p.coefficient(c, b);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        emax = std::max(emax, es.eigenvalues().maxCoeff());
    }
    double rm = 0.0;
    for (int c = 0; c < p.constraint_count(); ++c) rm += (y[static_cast<size_t>(c)] / ymax) * p.rhs(c);
    if (eig_margin) *eig_margin = emax;
    if (rhs_margin) *rhs_margin = rm;
    return emax <= -1e-8 && rm >= 1e-8;
}

/* ------------------------------------------------------------------ */
/* Interior-point solver                                               */
/* ------------------------------------------------------------------ */

namespace {

using Blocks = std::vector<Eigen::MatrixXd>;

double binner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a.cwiseProduct(b)).sum();
}

// Project a realified iterate onto the [[P, -Q], [Q, P]] structure and
// return it as a complex Hermitian matrix (average of two PSD congruences,
// hence PSD; constraint values are unchanged).
Eigen::MatrixXcd project_block(const Eigen::MatrixXd& xb, int k, bool is_complex) {
    if (!is_complex) {
        Eigen::MatrixXd s = 0.5 * (xb + xb.transpose());
        return s.cast<std::complex<double>>();
    }
    Eigen::MatrixXd p = 0.5 * (xb.topLeftCorner(k, k) + xb.bottomRightCorner(k, k));
    Eigen::MatrixXd q = 0.5 * (xb.bottomLeftCorner(k, k) - xb.topRightCorner(k, k));
    p = 0.5 * (p + p.transpose());
    q = 0.5 * (q - q.transpose());
    Eigen::MatrixXcd out(k, k);
    out.real() = p;
    out.imag() = q;
    return out;
}

struct Scaling {
    Eigen::MatrixXd R, Rinv, W;
    Eigen::VectorXd lambda;
};

// Largest alpha with M + alpha*D still PSD, via the eigenvalues of
// L^{-1} D L^{-T} where M = L L^T; capped at `cap`.
double psd_step_bound(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& d, double cap) {
    Eigen::MatrixXd n = llt.matrixL().solve(d);
    n = llt.matrixL().solve(n.transpose()).transpose();
    n = 0.5 * (n + n.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(n, Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues().minCoeff();
    if (lmin >= 0.0) return cap;
    return std::min(cap, 1.0 / (-lmin));
}

struct SolveWork {
    // problem data views
    const SdpProblem* prob = nullptr;
    int nblocks = 0, m = 0;
    std::vector<int> nb;
    Blocks C;
    Eigen::VectorXd r;
    bool objective = false;

    Eigen::VectorXd applyA(const Blocks& X) const {
        Eigen::VectorXd out(m);
        for (int c = 0; c < m; ++c) {
            double v = 0.0;
            for (int b = 0; b < nblocks; ++b) v += binner(prob->real_coefficient(c, b), X[static_cast<size_t>(b)]);
            out(c) = v;
        }
        return out;
    }

    Blocks applyAT(const Eigen::VectorXd& y) const {
        Blocks out(static_cast<size_t>(nblocks));
        for (int b = 0; b < nblocks; ++b) {
            out[static_cast<size_t>(b)] = Eigen::MatrixXd::Zero(nb[static_cast<size_t>(b)], nb[static_cast<size_t>(b)]);
            for (int c = 0; c < m; ++c)
                out[static_cast<size_t>(b)] += y(c) * prob->real_coefficient(c, b);
        }
        return out;
    }

    double innerC(const Blocks& X) const {
        if (!objective) return 0.0;
        double v = 0.0;
        for (int b = 0; b < nblocks; ++b) v += binner(C[static_cast<size_t>(b)], X[static_cast<size_t>(b)]);
        return v;
    }
};

SdpOutcome solve_strengthened(const SdpProblem& p, const SdpOptions& opts, const SdpOutcome& base);

}  // namespace

SdpOutcome sdp_solve(const SdpProblem& p, const SdpOptions& opts) {
    if (p.constraint_count() < 1) throw std::invalid_argument("sdp_solve: at least one constraint required");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("sdp_solve: tol must be positive");

    SolveWork w;
    w.prob = &p;
    w.nblocks = p.block_count();
    w.m = p.constraint_count();
    w.nb.resize(static_cast<size_t>(w.nblocks));
    for (int b = 0; b < w.nblocks; ++b) w.nb[static_cast<size_t>(b)] = p.real_block_size(b);
    w.objective = p.has_objective();
    w.C.resize(static_cast<size_t>(w.nblocks));
    for (int b = 0; b < w.nblocks; ++b)
        w.C[static_cast<size_t>(b)] = w.objective ? p.real_objective(b)
                                                  : Eigen::MatrixXd::Zero(w.nb[static_cast<size_t>(b)], w.nb[static_cast<size_t>(b)]);
    w.r.resize(w.m);
    for (int c = 0; c < w.m; ++c) w.r(c) = p.rhs(c);

    // HSD state
    Blocks X(static_cast<size_t>(w.nblocks)), S(static_cast<size_t>(w.nblocks));
    double nu = 0.0;
    for (int b = 0; b < w.nblocks; ++b) {
        int n = w.nb[static_cast<size_t>(b)];
        X[static_cast<size_t>(b)] = Eigen::MatrixXd::Identity(n, n);
        S[static_cast<size_t>(b)] = Eigen::MatrixXd::Identity(n, n);
        nu += n;
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(w.m);
    double tau = 1.0, kappa = 1.0;

    SdpOutcome out;
    out.note = "max iterations reached";

    auto try_extract_feasible = [&]() -> bool {
        if (!(tau > 1e-10)) return false;
        std::vector<Eigen::MatrixXcd> cand(static_cast<size_t>(w.nblocks));
        for (int b = 0; b < w.nblocks; ++b)
            cand[static_cast<size_t>(b)] = project_block(X[static_cast<size_t>(b)] / tau, p.block_size(b), p.block_complex(b));
        double viol = 0.0, me = 0.0;
        if (!sdp_verify_feasible(p, cand, opts.tol, &viol, &me)) return false;
        if (w.objective) {
            // require a small duality gap and dual feasibility so the dual
            // vector is meaningful to callers
            double obj = 0.0;
            for (int b = 0; b < w.nblocks; ++b) obj += binner(w.C[static_cast<size_t>(b)], X[static_cast<size_t>(b)]) / tau;
            double dobj = w.r.dot(y) / tau;
            if (std::abs(obj - dobj) > std::sqrt(opts.tol) * (1.0 + std::abs(obj))) return false;
            Blocks aty = w.applyAT(y);
            double dres = 0.0;
            for (int b = 0; b < w.nblocks; ++b) {
                Eigen::MatrixXd dd = w.C[static_cast<size_t>(b)] - aty[static_cast<size_t>(b)] / tau - S[static_cast<size_t>(b)] / tau;
                dres = std::max(dres, dd.cwiseAbs().maxCoeff());
            }
            if (dres > std::sqrt(opts.tol) * (1.0 + 1.0)) return false;
            out.objective = obj;
        }
        out.status = SdpStatus::Feasible;
        out.primal = std::move(cand);
        out.dual.assign(y.data(), y.data() + w.m);
        if (tau > 0) for (double& v : out.dual) v /= tau;
        out.primal_residual = viol;
        out.min_eigenvalue = me;
        out.note = "primal certificate verified";
        return true;
    };

    auto try_extract_infeasible = [&]() -> bool {
        double ymax = y.cwiseAbs().maxCoeff();
        if (!(ymax > 0.0)) return false;
        std::vector<double> cand(y.data(), y.data() + w.m);
        double em = 0.0, rm = 0.0;
        if (!sdp_verify_infeasible(p, cand, &em, &rm)) return false;
        for (double& v : cand) v /= ymax;
        out.status = SdpStatus::Infeasible;
        out.witness = std::move(cand);
        out.witness_eig_margin = em;
        out.witness_rhs_margin = rm;
        out.note = "infeasibility witness verified";
        return true;
    };

    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        if (try_extract_feasible() || try_extract_infeasible()) {
            out.iterations = iter;
            return out;
        }

        double gap = tau * kappa;
        for (int b = 0; b < w.nblocks; ++b) gap += binner(X[static_cast<size_t>(b)], S[static_cast<size_t>(b)]);
        double mu = gap / (nu + 1.0);
        if (!(mu > 1e-18) || !std::isfinite(mu)) {
            out.note = "numerical stagnation (mu underflow)";
            break;
        }

        // residuals
        Eigen::VectorXd pres = w.applyA(X) - tau * w.r;
        Blocks aty = w.applyAT(y);
        Blocks D(static_cast<size_t>(w.nblocks));
        for (int b = 0; b < w.nblocks; ++b)
            D[static_cast<size_t>(b)] = -aty[static_cast<size_t>(b)] + tau * w.C[static_cast<size_t>(b)] - S[static_cast<size_t>(b)];
        double g = w.r.dot(y) - w.innerC(X) - kappa;

        // NT scalings
        std::vector<Scaling> sc(static_cast<size_t>(w.nblocks));
        std::vector<Eigen::LLT<Eigen::MatrixXd>> lltX(static_cast<size_t>(w.nblocks)), lltS(static_cast<size_t>(w.nblocks));
        bool fail = false;
        for (int b = 0; b < w.nblocks && !fail; ++b) {
            auto& xb = X[static_cast<size_t>(b)];
            auto& sb = S[static_cast<size_t>(b)];
            lltX[static_cast<size_t>(b)].compute(xb);
            lltS[static_cast<size_t>(b)].compute(sb);
            if (lltX[static_cast<size_t>(b)].info() != Eigen::Success || lltS[static_cast<size_t>(b)].info() != Eigen::Success) {
                fail = true;
                break;
            }
            Eigen::MatrixXd LX = lltX[static_cast<size_t>(b)].matrixL();
            Eigen::MatrixXd LS = lltS[static_cast<size_t>(b)].matrixL();
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(LS.transpose() * LX, Eigen::ComputeFullU | Eigen::ComputeFullV);
            Eigen::VectorXd sig = svd.singularValues();
            if (sig.minCoeff() <= 0.0) { fail = true; break; }
            Eigen::VectorXd isqrt = sig.cwiseSqrt().cwiseInverse();
            Scaling s;
            s.lambda = sig;
            s.R = LX * svd.matrixV() * isqrt.asDiagonal();
            Eigen::MatrixXd lxinv = LX.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(LX.rows(), LX.cols()));
            s.Rinv = sig.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * lxinv;
            s.W = s.R * s.R.transpose();
            sc[static_cast<size_t>(b)] = std::move(s);
        }
        if (fail) {
            out.note = "factorization breakdown";
            break;
        }

        // Schur matrix M_{cc'} = sum_b <A_c, W A_{c'} W>
        std::vector<Blocks> WAW(static_cast<size_t>(w.m));
        for (int c = 0; c < w.m; ++c) {
            WAW[static_cast<size_t>(c)].resize(static_cast<size_t>(w.nblocks));
            for (int b = 0; b < w.nblocks; ++b)
                WAW[static_cast<size_t>(c)][static_cast<size_t>(b)] =
                    sc[static_cast<size_t>(b)].W * p.real_coefficient(c, b) * sc[static_cast<size_t>(b)].W;
        }
        Eigen::MatrixXd M(w.m, w.m);
        for (int c = 0; c < w.m; ++c)
            for (int c2 = c; c2 < w.m; ++c2) {
                double v = 0.0;
                for (int b = 0; b < w.nblocks; ++b)
                    v += binner(p.real_coefficient(c, b), WAW[static_cast<size_t>(c2)][static_cast<size_t>(b)]);
                M(c, c2) = v;
                M(c2, c) = v;
            }
        Eigen::LDLT<Eigen::MatrixXd> mldlt(M);
        if (mldlt.info() != Eigen::Success) {
            M.diagonal().array() += 1e-12 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
            mldlt.compute(M);
            if (mldlt.info() != Eigen::Success) {
                out.note = "schur factorization breakdown";
                break;
            }
        }

        Blocks WCW(static_cast<size_t>(w.nblocks));
        Eigen::VectorXd u = Eigen::VectorXd::Zero(w.m);
        double cWc = 0.0;
        if (w.objective) {
            for (int b = 0; b < w.nblocks; ++b)
                WCW[static_cast<size_t>(b)] = sc[static_cast<size_t>(b)].W * w.C[static_cast<size_t>(b)] * sc[static_cast<size_t>(b)].W;
            for (int c = 0; c < w.m; ++c) {
                double v = 0.0;
                for (int b = 0; b < w.nblocks; ++b)
                    v += binner(p.real_coefficient(c, b), WCW[static_cast<size_t>(b)]);
                u(c) = v;
            }
            for (int b = 0; b < w.nblocks; ++b) cWc += binner(w.C[static_cast<size_t>(b)], WCW[static_cast<size_t>(b)]);
        }
        Eigen::VectorXd z1 = mldlt.solve(u + w.r);

        // One direction solve: given scaled-complementarity target G (so that
        // DX = G - W DS W), linear residual targets, and the tau-kappa target.
        struct Direction {
            Blocks dX, dS;
            Eigen::VectorXd dy;
            double dtau = 0.0, dkappa = 0.0;
        };
        auto solve_direction = [&](const Eigen::VectorXd& rp, const Blocks& RD, double rg,
                                   const Blocks& G, double vtau) -> Direction {
            Blocks WRDW(static_cast<size_t>(w.nblocks));
            for (int b = 0; b < w.nblocks; ++b)
                WRDW[static_cast<size_t>(b)] = sc[static_cast<size_t>(b)].W * RD[static_cast<size_t>(b)] * sc[static_cast<size_t>(b)].W;
            Eigen::VectorXd h(w.m);
            for (int c = 0; c < w.m; ++c) {
                double v = 0.0;
                for (int b = 0; b < w.nblocks; ++b)
                    v += binner(p.real_coefficient(c, b), G[static_cast<size_t>(b)] + WRDW[static_cast<size_t>(b)]);
                h(c) = rp(c) - v;
            }
            Eigen::VectorXd z2 = mldlt.solve(h);
            double cGW = 0.0;
            if (w.objective)
                for (int b = 0; b < w.nblocks; ++b)
                    cGW += binner(w.C[static_cast<size_t>(b)], G[static_cast<size_t>(b)] + WRDW[static_cast<size_t>(b)]);
            double denom = (w.r - u).dot(z1) + cWc + kappa / tau;
            double rhs2 = rg + cGW + vtau / tau;
            Direction d;
            if (std::abs(denom) < 1e-300) {
                d.dtau = 0.0;
            } else {
                d.dtau = (rhs2 - (w.r - u).dot(z2)) / denom;
            }
            d.dy = z2 + d.dtau * z1;
            Blocks atdy = w.applyAT(d.dy);
            d.dS.resize(static_cast<size_t>(w.nblocks));
            d.dX.resize(static_cast<size_t>(w.nblocks));
            for (int b = 0; b < w.nblocks; ++b) {
                d.dS[static_cast<size_t>(b)] = -atdy[static_cast<size_t>(b)] + d.dtau * w.C[static_cast<size_t>(b)] - RD[static_cast<size_t>(b)];
                d.dX[static_cast<size_t>(b)] = G[static_cast<size_t>(b)]
                    - sc[static_cast<size_t>(b)].W * d.dS[static_cast<size_t>(b)] * sc[static_cast<size_t>(b)].W;
                d.dX[static_cast<size_t>(b)] = 0.5 * (d.dX[static_cast<size_t>(b)] + d.dX[static_cast<size_t>(b)].transpose());
                d.dS[static_cast<size_t>(b)] = 0.5 * (d.dS[static_cast<size_t>(b)] + d.dS[static_cast<size_t>(b)].transpose());
            }
            d.dkappa = (vtau - kappa * d.dtau) / tau;
            return d;
        };

        auto step_bound = [&](const Direction& d) {
            double a = 1.0 / 0.99;  // so that 0.99*a can reach exactly 1
            for (int b = 0; b < w.nblocks; ++b) {
                a = psd_step_bound(lltX[static_cast<size_t>(b)], d.dX[static_cast<size_t>(b)], a);
                a = psd_step_bound(lltS[static_cast<size_t>(b)], d.dS[static_cast<size_t>(b)], a);
            }
            if (d.dtau < 0.0) a = std::min(a, tau / -d.dtau);
            if (d.dkappa < 0.0) a = std::min(a, kappa / -d.dkappa);
            return a;
        };

        // Affine (predictor) direction: full residual reduction, zero target.
        Blocks Gaff(static_cast<size_t>(w.nblocks));
        for (int b = 0; b < w.nblocks; ++b) Gaff[static_cast<size_t>(b)] = -X[static_cast<size_t>(b)];
        Blocks RDaff(static_cast<size_t>(w.nblocks));
        for (int b = 0; b < w.nblocks; ++b) RDaff[static_cast<size_t>(b)] = -D[static_cast<size_t>(b)];
        Direction aff = solve_direction(-pres, RDaff, -g, Gaff, -tau * kappa);
        double alpha_aff = std::min(1.0, 0.99 * step_bound(aff));

        double gap_aff = (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa);
        for (int b = 0; b < w.nblocks; ++b)
            gap_aff += binner(X[static_cast<size_t>(b)] + alpha_aff * aff.dX[static_cast<size_t>(b)],
                              S[static_cast<size_t>(b)] + alpha_aff * aff.dS[static_cast<size_t>(b)]);
        double mu_aff = std::max(gap_aff, 0.0) / (nu + 1.0);
        double sigma = std::pow(std::min(1.0, std::max(0.0, mu_aff / mu)), 3.0);

        // Combined (corrector) direction.
        double eta = 1.0 - sigma;
        Blocks Gcomb(static_cast<size_t>(w.nblocks)), RDcomb(static_cast<size_t>(w.nblocks));
        for (int b = 0; b < w.nblocks; ++b) {
            const Scaling& s = sc[static_cast<size_t>(b)];
            Eigen::MatrixXd dxt = s.Rinv * aff.dX[static_cast<size_t>(b)] * s.Rinv.transpose();
            Eigen::MatrixXd dst = s.R.transpose() * aff.dS[static_cast<size_t>(b)] * s.R;
            Eigen::MatrixXd prod = dxt * dst;
            Eigen::MatrixXd E = -s.lambda.cwiseProduct(s.lambda).asDiagonal().toDenseMatrix();
            E -= 0.5 * (prod + prod.transpose());
            E.diagonal().array() += sigma * mu;
            // elementwise Lyapunov solve against diag(lambda)
            Eigen::MatrixXd L = E;
            for (int i = 0; i < L.rows(); ++i)
                for (int j = 0; j < L.cols(); ++j)
                    L(i, j) = 2.0 * E(i, j) / (s.lambda(i) + s.lambda(j));
            Gcomb[static_cast<size_t>(b)] = s.R * L * s.R.transpose();
            RDcomb[static_cast<size_t>(b)] = -eta * D[static_cast<size_t>(b)];
        }
        double vtau = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
        Direction dir = solve_direction(-eta * pres, RDcomb, -eta * g, Gcomb, vtau);
        double alpha = std::min(1.0, 0.99 * step_bound(dir));
        if (!(alpha > 0.0) || !std::isfinite(alpha)) {
            out.note = "step length breakdown";
            break;
        }

        for (int b = 0; b < w.nblocks; ++b) {
            X[static_cast<size_t>(b)] += alpha * dir.dX[static_cast<size_t>(b)];
            S[static_cast<size_t>(b)] += alpha * dir.dS[static_cast<size_t>(b)];
            X[static_cast<size_t>(b)] = 0.5 * (X[static_cast<size_t>(b)] + X[static_cast<size_t>(b)].transpose());
            S[static_cast<size_t>(b)] = 0.5 * (S[static_cast<size_t>(b)] + S[static_cast<size_t>(b)].transpose());
        }
        y += alpha * dir.dy;
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
    }

    if (try_extract_feasible() || try_extract_infeasible()) {
        out.iterations = iter;
        return out;
    }

    out.iterations = iter;
    out.status = SdpStatus::Indeterminate;
    // record last diagnostics
    if (tau > 1e-10) {
        std::vector<Eigen::MatrixXcd> cand(static_cast<size_t>(w.nblocks));
        for (int b = 0; b < w.nblocks; ++b)
            cand[static_cast<size_t>(b)] = project_block(X[static_cast<size_t>(b)] / tau, p.block_size(b), p.block_complex(b));
        sdp_verify_feasible(p, cand, opts.tol, &out.primal_residual, &out.min_eigenvalue);
    }

    if (opts.allow_strengthening && !p.has_objective()) {
        SdpOutcome strengthened = solve_strengthened(p, opts, out);
        if (strengthened.status == SdpStatus::Infeasible) return strengthened;
    }
    return out;
}

namespace {

// Secondary search for a strict Farkas witness: maximize s subject to
//   -sum_c y_c A_{c,b} - s I >= 0 on every block,  <r, y> = 1,  s <= 1.
// Eliminating y_{c0} (largest |r_{c0}|) turns the dual form into a primal
// problem our own solver handles:
//   min <-(1/r_{c0}) A_{c0}, X> + x_cap
//   s.t. <A_c - (r_c/r_{c0}) A_{c0}, X> = 0 for c != c0,
//        <I, X> + x_cap = 1,  X >= 0,  x_cap >= 0;
// the optimal dual variables are (y_c)_{c != c0} and s.  The extra scalar
// block realizes the cap s <= 1, which keeps this problem feasible (X = 0,
// x_cap = 1) even when the uncapped supremum is +infinity, while any
// positive optimum still recovers a strict witness.
SdpOutcome solve_strengthened(const SdpProblem& p, const SdpOptions& opts, const SdpOutcome& base) {
    SdpOutcome fail = base;
    const int m = p.constraint_count();
    int c0 = 0;
    double best = 0.0;
    for (int c = 0; c < m; ++c)
        if (std::abs(p.rhs(c)) > best) { best = std::abs(p.rhs(c)); c0 = c; }
    if (!(best > 0.0)) return fail;  // <r, y> = 1 unreachable

    std::vector<int> sizes;
    std::vector<bool> cflags;
    for (int b = 0; b < p.block_count(); ++b) {
        sizes.push_back(p.block_size(b));
        cflags.push_back(p.block_complex(b));
    }
    const int cap_block = static_cast<int>(sizes.size());
    sizes.push_back(1);
    cflags.push_back(false);
    SdpProblem q(sizes, cflags);
    const double r0 = p.rhs(c0);
    std::vector<int> kept;
    for (int c = 0; c < m; ++c) {
        if (c == c0) continue;
        kept.push_back(c);
        std::vector<SdpProblem::Entry> row;
        for (int b = 0; b < p.block_count(); ++b) {
            Eigen::MatrixXcd a = p.coefficient(c, b) - (p.rhs(c) / r0) * p.coefficient(c0, b);
            if (a.cwiseAbs().maxCoeff() == 0.0) continue;
            row.push_back({b, a});
        }
        if (row.empty()) {
            // the combination is identically zero; keep the constraint as
            // 0 = 0 on block 0 to preserve indexing of dual variables
            row.push_back({0, Eigen::MatrixXcd::Zero(p.block_size(0), p.block_size(0))});
        }
        q.add_constraint(row, 0.0);
    }
    {
        std::vector<SdpProblem::Entry> trace_row;
        for (int b = 0; b < p.block_count(); ++b)
            trace_row.push_back({b, Eigen::MatrixXcd::Identity(p.block_size(b), p.block_size(b))});
        trace_row.push_back({cap_block, Eigen::MatrixXcd::Identity(1, 1)});
        q.add_constraint(trace_row, 1.0);
    }
    {
        std::vector<SdpProblem::Entry> obj;
        for (int b = 0; b < p.block_count(); ++b) {
            Eigen::MatrixXcd a = -(1.0 / r0) * p.coefficient(c0, b);
            if (a.cwiseAbs().maxCoeff() == 0.0) continue;
            obj.push_back({b, a});
        }
        obj.push_back({cap_block, Eigen::MatrixXcd::Identity(1, 1)});
        q.set_objective(obj);
    }

    SdpOptions sub = opts;
    sub.allow_strengthening = false;
    SdpOutcome sol = sdp_solve(q, sub);
    if (sol.status != SdpStatus::Feasible || sol.dual.size() != kept.size() + 1) return fail;

    std::vector<double> ycand(static_cast<size_t>(m), 0.0);
    for (size_t i = 0; i < kept.size(); ++i) ycand[static_cast<size_t>(kept[i])] = sol.dual[i];
    double acc = 1.0;
    for (int c = 0; c < m; ++c)
        if (c != c0) acc -= p.rhs(c) * ycand[static_cast<size_t>(c)];
    ycand[static_cast<size_t>(c0)] = acc / r0;

    double em = 0.0, rm = 0.0;
    if (!sdp_verify_infeasible(p, ycand, &em, &rm)) return fail;
    double ymax = 0.0;
    for (double v : ycand) ymax = std::max(ymax, std::abs(v));
    for (double& v : ycand) v /= ymax;
    SdpOutcome out;
    out.status = SdpStatus::Infeasible;
    out.witness = std::move(ycand);
    out.witness_eig_margin = em;
    out.witness_rhs_margin = rm;
    out.iterations = base.iterations + sol.iterations;
    out.note = "infeasibility witness found by strengthening search";
    return out;
}

}  // namespace

}  // namespace psdg
