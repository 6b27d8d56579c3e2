#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "l4dec/model.hpp"

namespace l4dec {

struct AdmOptions {
    // l1 penalty; unset selects the data-driven default per column: the
    // root-mean-square of Y^T u0 at that column's starting point.
    std::optional<double> lambda;
    int max_iters = 500;
    double tol = 1e-8;

    void validate() const;
};

// sign(x_i) * max(|x_i| - t, 0): exact proximal map of t * |.|_1.
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& x, double t);

struct AdmResult {
    SphereVector u;
    Eigen::VectorXd v;
    int iterations = 0;
    bool converged = false;
    // The v-step zeroed every coordinate (Y v = 0): lambda is too large for
    // this data; u is left at its last value.
    bool lambda_too_large = false;
    double lambda_used = 0.0;
    // Composite objective ||Y - u v^T||_F^2 + lambda ||v||_1 after each full
    // sweep; non-increasing (each half-step is an exact minimizer).
    std::vector<double> objective_trace;
};

// Alternating minimization of ||Y - u v^T||_F^2 + lambda ||v||_1 over unit u
// and sparse v: v <- soft_threshold(Y^T u, lambda/2), u <- Yv / ||Yv||, until
// the u movement drops below tol or max_iters sweeps.
AdmResult adm_rank_one(const Eigen::MatrixXd& Y, const AdmOptions& opts,
                       const SphereVector& u0);

struct AdmColumnDiagnostic {
    int column = 0;
    int iterations = 0;
    bool converged = false;
    bool lambda_too_large = false;
    double lambda_used = 0.0;
    double final_objective = 0.0;
};

struct AdmRecoveryResult {
    MixingMatrix A_est;  // operator norm 1
    std::vector<AdmColumnDiagnostic> columns;
};

// Sequential deflation using adm_rank_one per column on (I - QQ^T) Y, with u0
// the leading left singular vector of the deflated data (power iteration);
// the collected unit columns are normalized to operator norm 1.
AdmRecoveryResult adm_recover_all(const Eigen::MatrixXd& Y, int r, const AdmOptions& opts,
                                  std::uint64_t seed = 0);

}  // namespace l4dec
