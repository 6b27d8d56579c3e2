#include "l4dec/baseline_adm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "l4dec/common.hpp"
#include "l4dec/pipeline.hpp"
#include "l4dec/rng.hpp"

namespace l4dec {

namespace {

// Root-mean-square of the correlation vector. Under the sparse Gaussian model
// this is sqrt(theta) * sigma for a generic unit u, which sits inside the
// penalty's recovery plateau across sparsity levels; a median would collapse
// toward zero on very sparse data and leave the v-step with no shrinkage.
double rms(const Eigen::VectorXd& x) {
    return x.norm() / std::sqrt(static_cast<double>(x.size()));
}

// Leading left singular vector of `data` by power iteration on the p x p
// Gram matrix; start vector is the row-sum direction with a seeded Gaussian
// column combination as fallback.
SphereVector leading_left_singular(const Eigen::MatrixXd& data, std::uint64_t seed) {
    const double scale = data.norm();
    if (scale == 0.0) throw NumericalError("adm: data matrix is zero");
    Eigen::VectorXd u = data.rowwise().sum();
    if (u.norm() <= 1e-14 * scale) {
        Rng rng(mix_seed(seed, 0xADA));
        bool ok = false;
        for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
            Eigen::VectorXd g(data.cols());
            for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
            u = data * g;
            ok = u.norm() > 1e-14 * scale;
        }
        if (!ok) throw NumericalError("adm: cannot seed power iteration");
    }
    u.normalize();
    const Eigen::MatrixXd G = data * data.transpose();
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd w = G * u;
        const double norm = w.norm();
        if (norm <= 1e-300) break;  // data numerically zero in this direction
        u = w / norm;
    }
    return SphereVector{u};
}

double composite_objective(const Eigen::MatrixXd& Y, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v, double lambda, double Y_sq) {
    // ||Y - u v^T||_F^2 with unit u expands to ||Y||^2 - 2 v.(Y^T u) + ||v||^2.
    return Y_sq - 2.0 * v.dot(Y.transpose() * u) + v.squaredNorm() +
           lambda * v.template lpNorm<1>();
}

}  // namespace

void AdmOptions::validate() const {
    if (lambda && !(*lambda > 0.0))
        throw InvalidArgument("adm: lambda must be positive when given");
    if (max_iters <= 0 || !(tol > 0.0))
        throw InvalidArgument("adm: max_iters and tol must be positive");
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& x, double t) {
    if (!(t >= 0.0)) throw InvalidArgument("soft_threshold: t must be >= 0");
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double mag = std::abs(x(i)) - t;
        out(i) = mag > 0.0 ? (x(i) < 0.0 ? -mag : mag) : 0.0;
    }
    return out;
}

AdmResult adm_rank_one(const Eigen::MatrixXd& Y, const AdmOptions& opts,
                       const SphereVector& u0) {
    opts.validate();
    if (Y.rows() != u0.coords.size())
        throw InvalidArgument("adm_rank_one: dimension mismatch");
    if (std::abs(u0.coords.norm() - 1.0) > 1e-12)
        throw InvalidArgument("adm_rank_one: u0 is not unit norm");

    AdmResult res;
    Eigen::VectorXd u = u0.coords;
    const double Y_sq = Y.squaredNorm();
    res.lambda_used = opts.lambda ? *opts.lambda : rms(Y.transpose() * u);
    const double half = res.lambda_used / 2.0;

    Eigen::VectorXd v = Eigen::VectorXd::Zero(Y.cols());
    for (int it = 0; it < opts.max_iters; ++it) {
        v = soft_threshold(Y.transpose() * u, half);
        Eigen::VectorXd w = Y * v;
        const double wn = w.norm();
        if (wn == 0.0) {
            res.lambda_too_large = true;
            res.iterations = it + 1;
            break;
        }
        Eigen::VectorXd u_new = w / wn;
        const double move = (u_new - u).norm();
        u = u_new;
        res.iterations = it + 1;
        res.objective_trace.push_back(composite_objective(Y, u, v, res.lambda_used, Y_sq));
        if (move <= opts.tol) {
            res.converged = true;
            break;
        }
    }
    res.u = SphereVector{u};
    res.v = v;
    return res;
}

AdmRecoveryResult adm_recover_all(const Eigen::MatrixXd& Y, int r, const AdmOptions& opts,
                                  std::uint64_t seed) {
    opts.validate();
    if (r < 1 || r > std::min(Y.rows(), Y.cols()))
        throw InvalidArgument("adm_recover_all: rank out of range");

    AdmRecoveryResult out;
    Eigen::MatrixXd cols(Y.rows(), r);
    DeflationState state(Y.rows());
    for (int j = 0; j < r; ++j) {
        const Eigen::MatrixXd data = state.project_out(Y);
        SphereVector u0 =
            leading_left_singular(data, mix_seed(seed, 0x500 + static_cast<std::uint64_t>(j)));
        AdmResult res = adm_rank_one(data, opts, u0);

        AdmColumnDiagnostic diag;
        diag.column = j;
        diag.iterations = res.iterations;
        diag.converged = res.converged;
        diag.lambda_too_large = res.lambda_too_large;
        diag.lambda_used = res.lambda_used;
        diag.final_objective =
            res.objective_trace.empty() ? 0.0 : res.objective_trace.back();
        out.columns.push_back(diag);

        cols.col(j) = res.u.coords;
        state.append(res.u.coords);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols);
    const double op = svd.singularValues()(0);
    if (op <= 0.0) throw NumericalError("adm_recover_all: estimate collapsed to zero");
    out.A_est.entries = cols / op;
    out.A_est.kind = MatrixKind::FullColumnRank;
    return out;
}

}  // namespace l4dec
