#pragma once

#include <utility>
#include <vector>

#include "l4dec/model.hpp"

namespace l4dec {

// min_i (1 - |<qbar, abar_i>|): distance of a single estimate to the closest
// signed ground-truth column. Lies in [0, 1] for unit inputs.
double err_single(const SphereVector& qbar, const MixingMatrix& Abar);
double err_single(const Eigen::VectorXd& qbar, const Eigen::MatrixXd& Abar);

// Best signed permutation P minimizing (1/sqrt(r)) ||A_est - A_true P||_F,
// found by optimal assignment on the pairwise costs
//   C_ij = ||a_est_i - sign(<a_est_i, a_j>) a_j||^2
// (the per-pair sign choice is optimal, so the unsigned assignment solves the
// signed problem exactly). Returns the permutation and the achieved error.
std::pair<SignedPermutation, double> match_signed_permutation(const Eigen::MatrixXd& A_est,
                                                              const Eigen::MatrixXd& A_true);

// Normalized Frobenius error (1/sqrt(r)) ||A_est - A_true P||_F for a given P.
double frobenius_err(const Eigen::MatrixXd& A_est, const Eigen::MatrixXd& A_true,
                     const SignedPermutation& perm);

struct RecoveryReport {
    std::vector<double> per_column_err;  // err_single of each estimated column
    double frobenius_err = 0.0;
    SignedPermutation matching;
    bool success = false;  // per the rho_e threshold used to build the report
};

RecoveryReport score_recovery(const Eigen::MatrixXd& A_est, const Eigen::MatrixXd& A_true,
                              double rho_e = 0.01);

enum class SuccessMode { AnyColumn, AllColumns };

// Fraction of reports whose error clears rho_e: the best column in AnyColumn
// mode, every column in AllColumns mode. Empty input is an error.
double success_rate(const std::vector<RecoveryReport>& reports, double rho_e = 0.01,
                    SuccessMode mode = SuccessMode::AnyColumn);

// Exact minimum-cost assignment on a square cost matrix (Hungarian method,
// O(r^3)). Returns assignment[i] = column assigned to row i.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

}  // namespace l4dec
