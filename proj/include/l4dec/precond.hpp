#pragma once

#include <Eigen/Core>

#include "l4dec/model.hpp"

namespace l4dec {

// D = ((Y Y^T)^+)^{1/2} restricted to rank r: D = U diag(1/sigma) U^T with
// (U, sigma) the top-r thin-SVD factors of Y.
struct Preconditioner {
    Eigen::MatrixXd D;               // p x p symmetric PSD
    Eigen::MatrixXd U;               // p x rank_used
    Eigen::VectorXd sigma;           // rank_used, descending
    int rank_used = 0;
    Eigen::VectorXd singular_values;  // all min(p, n) singular values of Y, descending

    // Pseudo-inverse of D on the column space: U diag(sigma) U^T applied to M.
    Eigen::MatrixXd apply_D_inverse(const Eigen::MatrixXd& M) const;
};

struct PreconditionedData {
    Eigen::MatrixXd Ybar;  // D * Y; Ybar Ybar^T is a rank-r projector
    Preconditioner D;
};

struct InvertResult {
    MixingMatrix A_est;
    // Set when Abar_est had to be projected onto the column space of D
    // (residual beyond 1e-6).
    bool projection_warning = false;
};

PreconditionedData precondition(const Eigen::MatrixXd& Y, int r);

InvertResult invert_precondition(const Eigen::MatrixXd& Abar_est, const Preconditioner& D);

// Reference rate (1/theta) * sqrt(r/n) for the preconditioning perturbation.
double prop1_delta_bound(double theta, int r, int n);

// Orthonormal polar factor U V^T from the thin SVD of A; the effective
// dictionary the preconditioned problem recovers.
Eigen::MatrixXd orthonormal_polar_factor(const Eigen::MatrixXd& A);

// Diagnostic only: index k (1-based count of retained values) maximizing the
// ratio sigma_k / sigma_{k+1}, and that ratio. Never used to choose r.
struct RankGap {
    int index = 0;
    double ratio = 0.0;
};
RankGap rank_gap_diagnostic(const Eigen::VectorXd& singular_values);

}  // namespace l4dec
