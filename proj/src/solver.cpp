#include "l4dec/solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>

#include "l4dec/common.hpp"
#include "l4dec/rng.hpp"

namespace l4dec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* step_name(StepKind k) {
    switch (k) {
        case StepKind::Gradient: return "gradient";
        case StepKind::Curvature: return "curvature";
        case StepKind::None: break;
    }
    return "none";
}

Eigen::VectorXd random_tangent(Eigen::Index p, const Eigen::VectorXd& q, Rng& rng) {
    Eigen::VectorXd v(p);
    for (Eigen::Index i = 0; i < p; ++i) v(i) = rng.normal();
    v -= q * q.dot(v);
    const double norm = v.norm();
    if (norm < 1e-12) {
        // One deterministic retry is enough; a second collapse is measure-zero
        // twice over and indicates p = 1.
        for (Eigen::Index i = 0; i < p; ++i) v(i) = rng.normal();
        v -= q * q.dot(v);
    }
    return v.normalized();
}

}  // namespace

void SolverOptions::validate() const {
    if (!(tol_grad > 0) || !(tol_curv > 0) || max_iters <= 0 || !(init_step > 0) ||
        max_halvings <= 0)
        throw InvalidArgument("solver options must be positive");
    if (!(armijo_c > 0) || !(armijo_c < 1))
        throw InvalidArgument("armijo_c must lie in (0, 1)");
    if (!(backtrack_factor > 0) || !(backtrack_factor < 1))
        throw InvalidArgument("backtrack_factor must lie in (0, 1)");
}

void SolveTrace::save_csv(const std::filesystem::path& path) const {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) throw IoError(path.string() + ": cannot open for writing");
    std::fprintf(f, "iter,value,grad_norm,min_curvature,step_kind\n");
    for (const auto& row : iterates)
        std::fprintf(f, "%d,%.17g,%.17g,%.17g,%s\n", row.iter, row.value, row.grad_norm,
                     row.min_curvature, step_name(row.step));
    if (std::fclose(f) != 0) throw IoError(path.string() + ": close failed");
}

InitQ0 init_q0(const Eigen::MatrixXd& Ybar, std::uint64_t fallback_seed) {
    InitQ0 out;
    Eigen::VectorXd s = Ybar.rowwise().sum();
    const double norm = s.norm();
    if (norm > 1e-14 * Ybar.norm()) {
        out.q0 = SphereVector{s / norm};
        return out;
    }
    // Measure-zero collapse: a Gaussian combination of the columns is an
    // isotropic direction within the column space (Ybar Ybar^T is a projector
    // in the preconditioned pipeline).
    out.used_fallback = true;
    Rng rng(mix_seed(fallback_seed, 0x1217));
    for (int attempt = 0; attempt < 64; ++attempt) {
        Eigen::VectorXd g(Ybar.cols());
        for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
        Eigen::VectorXd v = Ybar * g;
        if (v.norm() > 1e-14 * Ybar.norm()) {
            out.q0 = SphereVector{v.normalized()};
            return out;
        }
    }
    throw NumericalError("init_q0: data matrix is numerically zero");
}

std::pair<double, Eigen::VectorXd> min_tangent_eigenpair(const HessOperator& op,
                                                         const Eigen::VectorXd& q,
                                                         std::uint64_t seed) {
    const Eigen::Index p = op.dim();
    if (q.size() != p) throw InvalidArgument("min_tangent_eigenpair: dimension mismatch");
    if (p < 2) throw InvalidArgument("min_tangent_eigenpair: sphere dimension must be >= 2");
    const Eigen::Index tangent_dim = p - 1;
    const Eigen::Index max_steps = std::min<Eigen::Index>(tangent_dim, 96);

    Rng rng(mix_seed(seed, 0xE16));
    Eigen::MatrixXd V(p, max_steps);
    Eigen::VectorXd alpha(max_steps), beta(max_steps);
    Eigen::VectorXd v = random_tangent(p, q, rng);

    auto solve_tridiagonal = [&](Eigen::Index m) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            T(i, i) = alpha(i);
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta(i);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        return es;
    };

    Eigen::Index m = 0;
    bool breakdown = false;
    for (; m < max_steps; ++m) {
        V.col(m) = v;
        Eigen::VectorXd w = op.apply(v);
        alpha(m) = v.dot(w);
        w -= alpha(m) * v;
        if (m > 0) w -= beta(m - 1) * V.col(m - 1);
        // Full reorthogonalization (against q too) keeps the basis clean at
        // the cost of O(p m) per step; m is small.
        w -= q * q.dot(w);
        for (Eigen::Index i = 0; i <= m; ++i) w -= V.col(i) * V.col(i).dot(w);
        beta(m) = w.norm();
        if (beta(m) < 1e-13) {
            breakdown = true;  // exact invariant subspace found
            ++m;
            break;
        }
        v = w / beta(m);
    }

    auto es = solve_tridiagonal(m);
    const double lam = es.eigenvalues()(0);
    Eigen::VectorXd y = es.eigenvectors().col(0);
    Eigen::VectorXd x = V.leftCols(m) * y;
    const double spread =
        std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(m - 1)));
    const double resid = breakdown || m == tangent_dim ? 0.0 : std::abs(beta(m - 1) * y(m - 1));

    if (resid <= std::max(1e-9 * spread, 1e-13)) {
        x -= q * q.dot(x);
        return {lam, x.normalized()};
    }

    // Dense fallback: shift the q direction out of the spectrum, then take the
    // smallest eigenpair of the full operator.
    Eigen::MatrixXd H = op.dense();
    const double shift = H.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    H += shift * (q * q.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense(H);
    Eigen::VectorXd x2 = dense.eigenvectors().col(0);
    x2 -= q * q.dot(x2);
    return {dense.eigenvalues()(0), x2.normalized()};
}

SolveTrace solve(const Objective& obj, const SphereVector& q0, const SolverOptions& opts) {
    opts.validate();
    if (std::abs(q0.coords.norm() - 1.0) > 1e-12)
        throw InvalidArgument("solve: q0 is not unit norm");

    const kernels::Exec exec =
        opts.deterministic ? kernels::Exec::Parallel : kernels::Exec::ParallelFast;
    Objective work = obj;
    work.exec = exec;

    SolveTrace trace;
    Eigen::VectorXd q = q0.coords;
    GradEval ge = grad_eval(work, q);
    double warm_step = opts.init_step;

    auto finish = [&](int iter, double gnorm, double curv, SolveStatus status) {
        trace.iterates.push_back({iter, ge.value, gnorm, curv, StepKind::None});
        trace.status = status;
        trace.final_q = SphereVector{q};
        return trace;
    };

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        const double gnorm = ge.rgrad.norm();

        if (gnorm > opts.tol_grad) {
            // Gradient phase: direction -g, Armijo on the retracted path. The
            // probe is O(n) per trial; acceptance is confirmed with the fused
            // full evaluation (needed for the next iterate anyway), so the
            // recorded value sequence is non-increasing in exact arithmetic
            // of this build, not merely up to probe/eval rounding skew.
            // Unit-norm direction: step lengths are arc lengths, and every
            // term of the acceptance test scales linearly with the objective,
            // so rescaling the data rescales the trace without changing the
            // iterates (exactly so for power-of-two factors).
            const Eigen::VectorXd d = -ge.rgrad / gnorm;
            const double slope = -gnorm;
            LineProbe probe(work, q, d, ge.c);
            double alpha = warm_step;
            bool accepted = false;
            for (int h = 0; h <= opts.max_halvings; ++h) {
                if (probe.value(alpha) <= ge.value + opts.armijo_c * alpha * slope) {
                    const Eigen::VectorXd q_try = (q + alpha * d).normalized();
                    GradEval ge_try = grad_eval(work, q_try);
                    // Strict decrease required on top of the Armijo test:
                    // once the sufficient-decrease margin falls below one ulp
                    // of the value, equal-value steps would otherwise be
                    // accepted and the iterate could cycle without progress.
                    if (ge_try.value <= ge.value + opts.armijo_c * alpha * slope &&
                        ge_try.value < ge.value) {
                        trace.iterates.push_back({iter, ge.value, gnorm, kNaN,
                                                  StepKind::Gradient});
                        q = q_try;
                        ge = std::move(ge_try);
                        warm_step = alpha * 2.0;
                        accepted = true;
                        break;
                    }
                }
                alpha *= opts.backtrack_factor;
            }
            if (!accepted) {
                trace.line_search_failed = true;
                return finish(iter, gnorm, kNaN, SolveStatus::MaxIters);
            }
            continue;
        }

        // Curvature phase: gradient is at tolerance; certify or escape.
        HessOperator H = hess_operator(work, q, ge.c);
        auto [lam, v] = min_tangent_eigenpair(H, q, opts.seed);
        if (lam >= -opts.tol_curv)
            return finish(iter, gnorm, lam, SolveStatus::Converged);

        // Escape along +-v; sign chosen by the lower accepted value. Second
        // order decrease model: f0 + c alpha^2 lam / 2 < f0.
        double best_value = std::numeric_limits<double>::infinity();
        double best_alpha = 0.0;
        int best_sign = 0;
        for (int sign : {+1, -1}) {
            const Eigen::VectorXd d = sign > 0 ? v : Eigen::VectorXd(-v);
            LineProbe probe(work, q, d, ge.c);
            double alpha = opts.init_step;
            for (int h = 0; h <= opts.max_halvings; ++h) {
                const double target =
                    ge.value + opts.armijo_c * 0.5 * alpha * alpha * lam;
                if (probe.value(alpha) <= target) {
                    const double val = probe.value(alpha);
                    if (val < best_value) {
                        best_value = val;
                        best_alpha = alpha;
                        best_sign = sign;
                    }
                    break;
                }
                alpha *= opts.backtrack_factor;
            }
        }
        if (best_sign == 0) {
            trace.line_search_failed = true;
            return finish(iter, gnorm, lam, SolveStatus::MaxIters);
        }
        const Eigen::VectorXd d = best_sign > 0 ? v : Eigen::VectorXd(-v);
        const Eigen::VectorXd q_try = (q + best_alpha * d).normalized();
        GradEval ge_try = grad_eval(work, q_try);
        if (ge_try.value >= ge.value) {
            // Retracted-point evaluation disagrees with the probe beyond the
            // model decrease (or made no representable progress); treat as a
            // failed search rather than break monotonicity or cycle.
            trace.line_search_failed = true;
            return finish(iter, gnorm, lam, SolveStatus::MaxIters);
        }
        trace.iterates.push_back({iter, ge.value, gnorm, lam, StepKind::Curvature});
        q = q_try;
        ge = std::move(ge_try);
    }

    return finish(opts.max_iters, ge.rgrad.norm(), kNaN, SolveStatus::MaxIters);
}

}  // namespace l4dec
