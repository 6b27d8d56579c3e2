#pragma once

#include <Eigen/Core>

namespace l4dec::kernels {

// Execution policy for the sample-sum kernels.
//   Serial       reference implementation, plain index-order loops
//   Parallel     OpenMP over fixed column blocks, partials combined by a
//                fixed pairwise tree; bitwise independent of thread count
//   ParallelFast OpenMP reduction, combination order unspecified
// Parallel is the default everywhere; ParallelFast exists for the benchmark
// and for callers that explicitly opt out of fixed-order reduction.
enum class Exec { Serial, Parallel, ParallelFast };

// All kernels read Y column-wise: y_k = Y.col(k), k = 0..n-1.

// sum_k (y_k . q)^4
double quartic_sum(const Eigen::MatrixXd& Y, const Eigen::VectorXd& q, Exec exec);

// One fused pass: c_k = y_k . q, s4 = sum c_k^4, g = sum c_k^3 y_k.
struct QuarticGrad {
    double s4 = 0.0;
    Eigen::VectorXd c;  // n
    Eigen::VectorXd g;  // p
};
QuarticGrad quartic_grad(const Eigen::MatrixXd& Y, const Eigen::VectorXd& q, Exec exec);

// sum_k 3 c_k^2 (y_k . v) y_k, with c precomputed (c = Y^T q at the base point).
Eigen::VectorXd quartic_hessvec(const Eigen::MatrixXd& Y, const Eigen::VectorXd& c,
                                const Eigen::VectorXd& v, Exec exec);

// Y diag(w) Y^T
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& Y, const Eigen::VectorXd& w, Exec exec);

// sum_k (scale * (c0_k + alpha * cd_k))^4; the line-search probe.
double shifted_quartic_sum(const Eigen::VectorXd& c0, const Eigen::VectorXd& cd,
                           double alpha, double scale, Exec exec);

}  // namespace l4dec::kernels
