#include "l4dec/pipeline.hpp"

#include <cmath>
#include <utility>

#include "l4dec/common.hpp"
#include "l4dec/rng.hpp"

namespace l4dec {

namespace {

// Random unit vector in the column space of `data` (Gaussian combination of
// its columns). Zero data throws: there is nothing left to recover in it.
SphereVector random_colspace_unit(const Eigen::MatrixXd& data, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x9E7));
    const double scale = data.norm();
    for (int attempt = 0; attempt < 64; ++attempt) {
        Eigen::VectorXd g(data.cols());
        for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
        Eigen::VectorXd v = data * g;
        if (v.norm() > 1e-14 * scale) return SphereVector{v.normalized()};
    }
    throw NumericalError("pipeline retry: deflated data is numerically zero");
}

}  // namespace

void DeflationState::append(const Eigen::VectorXd& v) {
    recovered_.push_back(v);
    Eigen::VectorXd w = v;
    for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index j = 0; j < basis_.cols(); ++j)
            w -= basis_.col(j) * basis_.col(j).dot(w);
    const double norm = w.norm();
    if (norm <= 1e-8 * std::max(1.0, v.norm())) return;  // already spanned
    basis_.conservativeResize(Eigen::NoChange, basis_.cols() + 1);
    basis_.col(basis_.cols() - 1) = w / norm;
}

Eigen::MatrixXd DeflationState::project_out(const Eigen::MatrixXd& M) const {
    if (basis_.cols() == 0) return M;
    return M - basis_ * (basis_.transpose() * M);
}

Eigen::MatrixXd deflated_data(const Eigen::MatrixXd& Ybar, const DeflationState& state) {
    return state.project_out(Ybar);
}

Objective deflation_objective(const Eigen::MatrixXd& Ybar, const DeflationState& state) {
    return Objective::raw_l4(deflated_data(Ybar, state));
}

RecoveryResult recover_all(const Eigen::MatrixXd& Y, int r, const PipelineOptions& opts) {
    opts.solver.validate();
    PreconditionedData pre = precondition(Y, r);
    const Eigen::Index p = Y.rows();

    RecoveryResult out;
    out.precond = pre.D;
    out.Abar_est.resize(p, r);
    out.traces.reserve(static_cast<std::size_t>(r));
    out.columns.reserve(static_cast<std::size_t>(r));

    SphereVector shared_q0;
    if (opts.init_once) {
        InitQ0 init = init_q0(pre.Ybar, mix_seed(opts.seed, 0x100));
        shared_q0 = init.q0;
        out.init_q0_fallback = init.used_fallback;
    }

    DeflationState state(p);
    for (int j = 0; j < r; ++j) {
        const Eigen::MatrixXd data = deflated_data(pre.Ybar, state);
        Objective obj = Objective::raw_l4(data);

        ColumnDiagnostic diag;
        diag.column = j;

        SphereVector q0;
        if (opts.init_once) {
            q0 = shared_q0;
        } else {
            InitQ0 init = init_q0(data, mix_seed(opts.seed, 0x100 + static_cast<std::uint64_t>(j)));
            q0 = init.q0;
            diag.init_used_fallback = init.used_fallback;
            out.init_q0_fallback = out.init_q0_fallback || init.used_fallback;
        }

        SolveTrace trace = solve(obj, q0, opts.solver);
        if (trace.status != SolveStatus::Converged) {
            diag.retried = true;
            SphereVector q_retry = random_colspace_unit(
                data, mix_seed(opts.seed, 0x200 + static_cast<std::uint64_t>(j)));
            SolveTrace second = solve(obj, q_retry, opts.solver);
            if (second.status == SolveStatus::Converged ||
                second.final_value() < trace.final_value())
                trace = std::move(second);
        }

        const Eigen::VectorXd& q = trace.final_q.coords;
        diag.iterations = trace.iterations();
        diag.status = trace.status;
        diag.final_value = trace.final_value();
        diag.line_search_failed = trace.line_search_failed;
        diag.overlap = state.basis().cols() > 0
                           ? (state.basis().transpose() * q).cwiseAbs().maxCoeff()
                           : 0.0;

        out.Abar_est.col(j) = q;
        state.append(q);
        out.traces.push_back(std::move(trace));
        out.columns.push_back(diag);
    }

    InvertResult inv = invert_precondition(out.Abar_est, pre.D);
    out.A_est = std::move(inv.A_est);
    out.projection_warning = inv.projection_warning;
    return out;
}

RecoveryResult recover_all(const Eigen::MatrixXd& Y, int r, const SolverOptions& opts) {
    PipelineOptions popts;
    popts.solver = opts;
    popts.seed = opts.seed;
    return recover_all(Y, r, popts);
}

}  // namespace l4dec
