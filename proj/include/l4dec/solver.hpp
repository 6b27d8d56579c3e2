#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "l4dec/objective.hpp"

namespace l4dec {

struct SolverOptions {
    double tol_grad = 1e-8;
    double tol_curv = 1e-6;
    int max_iters = 10000;
    double armijo_c = 1e-4;
    double backtrack_factor = 0.5;
    double init_step = 1.0;
    bool deterministic = true;  // fixed-order parallel reductions
    int max_halvings = 60;
    std::uint64_t seed = 0;  // eigensolver start vector; derived draws

    void validate() const;
};

enum class StepKind { Gradient, Curvature, None };
enum class SolveStatus { Converged, MaxIters };

struct TraceRow {
    int iter = 0;
    double value = 0.0;
    double grad_norm = 0.0;
    // Smallest tangent curvature; NaN on rows where the eigensolver did not
    // run (it only runs once the gradient test passes).
    double min_curvature = 0.0;
    StepKind step = StepKind::None;  // step taken FROM this iterate
};

struct SolveTrace {
    std::vector<TraceRow> iterates;
    SolveStatus status = SolveStatus::MaxIters;
    SphereVector final_q;
    bool line_search_failed = false;  // 60 halvings exhausted somewhere

    int iterations() const { return static_cast<int>(iterates.size()) - 1; }
    double final_value() const { return iterates.back().value; }
    // CSV columns: iter,value,grad_norm,min_curvature,step_kind
    void save_csv(const std::filesystem::path& path) const;
};

struct InitQ0 {
    SphereVector q0;
    bool used_fallback = false;  // Ybar * ones was numerically zero
};

// q0 = Ybar 1_n / ||Ybar 1_n||; falls back to a seeded random unit vector in
// the column space of Ybar when the sum collapses (||.|| <= 1e-14 ||Ybar||_F).
InitQ0 init_q0(const Eigen::MatrixXd& Ybar, std::uint64_t fallback_seed = 0);

// Smallest eigenpair of the tangent-restricted operator: matrix-free Lanczos
// with full reorthogonalization, dense fallback if it fails to settle.
// The returned eigenvector is unit and orthogonal to q within 1e-10.
std::pair<double, Eigen::VectorXd> min_tangent_eigenpair(const HessOperator& op,
                                                         const Eigen::VectorXd& q,
                                                         std::uint64_t seed = 0);

SolveTrace solve(const Objective& obj, const SphereVector& q0, const SolverOptions& opts);

}  // namespace l4dec
