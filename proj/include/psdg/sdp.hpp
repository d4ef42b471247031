#pragma once

// Small dense semidefinite feasibility/optimization solver: primal-dual
// interior-point iteration on the homogeneous self-dual embedding with
// Nesterov-Todd scaling and Mehrotra predictor-corrector steps.
//
// Problems are stated over PSD blocks X_b with linear trace constraints
//   sum_b <A_{c,b}, X_b> = r_c,
// optionally minimizing sum_b <C_b, X_b>.  Complex Hermitian blocks are
// realified at construction time to 2k x 2k symmetric blocks via the
// [[Re, -Im], [Im, Re]] embedding (inner products are preserved by using
// half the embedded coefficient); solutions are projected back, which keeps
// positive semidefiniteness and constraint values exactly.
//
// Outcomes are FEASIBLE (with a primal point), INFEASIBLE (with a Farkas
// witness y: sum_c y_c A_{c,b} strictly negative definite on every block and
// <r, y> > 0), or INDETERMINATE when neither certificate reaches tolerance —
// an explicit status that callers must not conflate with INFEASIBLE.
// Both certificates are re-verified by independent checkers that share no
// state with the solver.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace psdg {

class SdpProblem {
public:
    struct Entry {
        int block = 0;
        Eigen::MatrixXcd a;  // Hermitian; must be real for real blocks
    };

    // complex_flags[b] marks block b as a complex Hermitian block of size
    // block_sizes[b] (realified internally); defaults to all-real.
    explicit SdpProblem(std::vector<int> block_sizes, std::vector<bool> complex_flags = {});

    // Appends the constraint sum_b <entries[b].a, X_b> = rhs.  Blocks not
    // mentioned carry zero coefficients; a block may appear at most once.
    void add_constraint(const std::vector<Entry>& entries, double rhs);

    // Minimize sum_b <entries[b].a, X_b>; feasibility mode when unset.
    void set_objective(const std::vector<Entry>& entries);

    int block_count() const { return static_cast<int>(sizes_.size()); }
    int block_size(int b) const { return sizes_.at(static_cast<size_t>(b)); }
    bool block_complex(int b) const { return complex_.at(static_cast<size_t>(b)); }
    int constraint_count() const { return static_cast<int>(rhs_.size()); }
    double rhs(int c) const { return rhs_.at(static_cast<size_t>(c)); }
    bool has_objective() const { return has_objective_; }

    // Original-semantics coefficient of constraint c on block b (Hermitian,
    // zero matrix if absent) and the objective coefficient.
    Eigen::MatrixXcd coefficient(int c, int b) const;
    Eigen::MatrixXcd objective_coefficient(int b) const;

    // Documented sparse JSON dump (upper-triangle entries) for cross-checks.
    std::string dump_json() const;

    // Internal realified view, exposed for the solver and tests.
    int real_block_size(int b) const;
    const Eigen::MatrixXd& real_coefficient(int c, int b) const;
    const Eigen::MatrixXd& real_objective(int b) const;

private:
    Eigen::MatrixXd realify(int b, const Eigen::MatrixXcd& a, const char* who) const;

    std::vector<int> sizes_;
    std::vector<bool> complex_;
    std::vector<double> rhs_;
    // constraints_[c][b]: realified coefficient (possibly zero matrix)
    std::vector<std::vector<Eigen::MatrixXd>> constraints_;
    std::vector<Eigen::MatrixXd> objective_;
    bool has_objective_ = false;
};

enum class SdpStatus { Feasible, Infeasible, Indeterminate };

std::string sdp_status_name(SdpStatus s);

struct SdpOutcome {
    SdpStatus status = SdpStatus::Indeterminate;

    // Feasible: one Hermitian PSD matrix per original block, plus the dual
    // vector (useful in objective mode) and objective value.
    std::vector<Eigen::MatrixXcd> primal;
    std::vector<double> dual;
    double objective = 0.0;

    // Infeasible: Farkas witness, normalized to unit max-norm.
    std::vector<double> witness;

    // Diagnostics.
    int iterations = 0;
    double primal_residual = 0.0;   // max_c |<A_c, X> - r_c| at the returned point
    double min_eigenvalue = 0.0;    // min over blocks of lambda_min(X_b)
    double witness_eig_margin = 0.0;  // max over blocks of lambda_max(sum y A)
    double witness_rhs_margin = 0.0;  // <r, y>
    std::string note;
};

struct SdpOptions {
    double tol = 1e-8;
    int max_iter = 200;
    // Internal: suppresses the witness-strengthening fallback (used by the
    // fallback itself to avoid recursion).
    bool allow_strengthening = true;
};

SdpOutcome sdp_solve(const SdpProblem& p, const SdpOptions& opts = {});

// Independent post-hoc checkers (no solver state).
bool sdp_verify_feasible(const SdpProblem& p, const std::vector<Eigen::MatrixXcd>& X,
                         double tol, double* max_violation = nullptr, double* min_eig = nullptr);
bool sdp_verify_infeasible(const SdpProblem& p, const std::vector<double>& y,
                           double* eig_margin = nullptr, double* rhs_margin = nullptr);

}  // namespace psdg
