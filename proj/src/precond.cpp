#include "l4dec/precond.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "l4dec/common.hpp"

namespace l4dec {

Eigen::MatrixXd Preconditioner::apply_D_inverse(const Eigen::MatrixXd& M) const {
    return U * (sigma.asDiagonal() * (U.transpose() * M));
}

PreconditionedData precondition(const Eigen::MatrixXd& Y, int r) {
    const Eigen::Index p = Y.rows();
    const Eigen::Index n = Y.cols();
    if (r <= 0 || r > std::min(p, n))
        throw InvalidArgument("precondition: rank r=" + std::to_string(r) +
                              " outside 1..min(p,n)");

    // Left singular factors (U, sigma) of Y without forming the Gram, which
    // would square the condition number and push small singular values below
    // what the rank test can resolve. For the common wide case reduce via a
    // QR factorization of Y^T: Y = R^T Q^T, so Y and R^T share left singular
    // structure and a p x p SVD of R^T finishes the job at O(p^2 n) total.
    Eigen::MatrixXd B;  // same left singular vectors / values as Y
    if (n >= p) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y.transpose());
        B = Eigen::MatrixXd(qr.matrixQR()
                                .topRows(p)
                                .template triangularView<Eigen::Upper>())
                .transpose();
    } else {
        B = Y;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU);
    const Eigen::VectorXd sv = svd.singularValues();  // min(p, n), descending

    // Numerical-rank rule: relative tolerance 1e-10 * max(p, n) against sigma_1.
    const double rel_tol = 1e-10 * static_cast<double>(std::max(p, n));
    if (sv(r - 1) <= rel_tol * sv(0))
        throw NumericalError("precondition: rank deficient input, sigma_" +
                             std::to_string(r) + " = " + std::to_string(sv(r - 1)) +
                             " vs sigma_1 = " + std::to_string(sv(0)));

    Preconditioner pc;
    pc.rank_used = r;
    pc.singular_values = sv;
    pc.sigma = sv.head(r);
    pc.U = svd.matrixU().leftCols(r);
    pc.D.noalias() = pc.U * pc.sigma.cwiseInverse().asDiagonal() * pc.U.transpose();

    PreconditionedData out;
    out.Ybar.noalias() = pc.U * (pc.sigma.cwiseInverse().asDiagonal() * (pc.U.transpose() * Y));
    out.D = std::move(pc);
    return out;
}

InvertResult invert_precondition(const Eigen::MatrixXd& Abar_est, const Preconditioner& D) {
    if (Abar_est.rows() != D.U.rows())
        throw InvalidArgument("invert_precondition: row count mismatch");
    if (Abar_est.norm() == 0.0)
        throw InvalidArgument("invert_precondition: zero estimate");

    Eigen::MatrixXd coeff = D.U.transpose() * Abar_est;          // rank_used x r
    Eigen::MatrixXd projected = D.U * coeff;
    const double resid = (Abar_est - projected).norm();

    InvertResult out;
    out.projection_warning = resid > 1e-6;
    Eigen::MatrixXd raw = D.U * (D.sigma.asDiagonal() * coeff);  // D^-1 on column space
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(raw);
    const double op = svd.singularValues()(0);
    if (op <= 0.0)
        throw NumericalError("invert_precondition: estimate collapsed to zero");
    out.A_est.entries = raw / op;
    out.A_est.kind = MatrixKind::FullColumnRank;
    return out;
}

double prop1_delta_bound(double theta, int r, int n) {
    if (!(theta > 0.0) || r <= 0 || n <= 0)
        throw InvalidArgument("prop1_delta_bound: need theta > 0, r > 0, n > 0");
    return (1.0 / theta) * std::sqrt(static_cast<double>(r) / static_cast<double>(n));
}

Eigen::MatrixXd orthonormal_polar_factor(const Eigen::MatrixXd& A) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().transpose();
}

RankGap rank_gap_diagnostic(const Eigen::VectorXd& singular_values) {
    RankGap gap;
    for (Eigen::Index k = 0; k + 1 < singular_values.size(); ++k) {
        const double denom = singular_values(k + 1);
        const double ratio = denom > 0.0 ? singular_values(k) / denom
                                         : std::numeric_limits<double>::infinity();
        if (ratio > gap.ratio) {
            gap.ratio = ratio;
            gap.index = static_cast<int>(k + 1);
        }
    }
    return gap;
}

}  // namespace l4dec
