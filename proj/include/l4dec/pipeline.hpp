#pragma once

#include <cstdint>
#include <vector>

#include "l4dec/objective.hpp"
#include "l4dec/precond.hpp"
#include "l4dec/solver.hpp"

namespace l4dec {

// Columns recovered so far and an orthonormal basis spanning them; supplies
// the projector I - QQ^T used to deflate the data between columns.
class DeflationState {
  public:
    explicit DeflationState(Eigen::Index p) : basis_(p, 0) {}

    // Records v and extends the basis by its component orthogonal to the
    // current span (modified Gram-Schmidt, run twice). A v already inside the
    // span (residual below 1e-8) leaves the basis unchanged.
    void append(const Eigen::VectorXd& v);

    // M - Q (Q^T M).
    Eigen::MatrixXd project_out(const Eigen::MatrixXd& M) const;

    Eigen::Index count() const { return static_cast<Eigen::Index>(recovered_.size()); }
    const std::vector<Eigen::VectorXd>& recovered() const { return recovered_; }
    const Eigen::MatrixXd& basis() const { return basis_; }

  private:
    std::vector<Eigen::VectorXd> recovered_;
    Eigen::MatrixXd basis_;  // p x k, orthonormal columns
};

// Data matrix of the deflated criterion: (I - QQ^T) Ybar.
Eigen::MatrixXd deflated_data(const Eigen::MatrixXd& Ybar, const DeflationState& state);

// Scale-free quartic objective on the deflated data.
Objective deflation_objective(const Eigen::MatrixXd& Ybar, const DeflationState& state);

struct PipelineOptions {
    SolverOptions solver;
    // Initialize once from the undeflated data and reuse that start point for
    // every column (the sequential algorithm's literal ordering). Default
    // re-initializes from the deflated data each column.
    bool init_once = false;
    std::uint64_t seed = 0;  // derives fallback-init and retry draws
};

struct ColumnDiagnostic {
    int column = 0;  // recovery order, 0-based
    int iterations = 0;
    SolveStatus status = SolveStatus::MaxIters;
    double final_value = 0.0;
    // max_j |<q, basis_j>| over the prior basis, measured before
    // re-orthonormalization; small on healthy runs (<= 1e-6).
    double overlap = 0.0;
    bool init_used_fallback = false;
    bool retried = false;
    bool line_search_failed = false;
};

struct RecoveryResult {
    MixingMatrix A_est;              // operator norm 1
    Eigen::MatrixXd Abar_est;        // raw per-column solve outputs (p x r)
    std::vector<SolveTrace> traces;  // kept solve per column
    std::vector<ColumnDiagnostic> columns;
    Preconditioner precond;
    bool projection_warning = false;  // Abar_est left the column space of D
    bool init_q0_fallback = false;    // any column used the random init
};

// Full decomposition: precondition, then per column deflate / initialize /
// minimize / append, then invert the preconditioning and normalize to
// operator norm 1. Throws NumericalError if Y has numerical rank < r.
// A column whose solve stalls is retried once from a seeded random unit start
// inside the deflated column space; the better final value is kept.
RecoveryResult recover_all(const Eigen::MatrixXd& Y, int r, const PipelineOptions& opts);
RecoveryResult recover_all(const Eigen::MatrixXd& Y, int r, const SolverOptions& opts);

}  // namespace l4dec
