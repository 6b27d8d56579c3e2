#include "l4dec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "l4dec/common.hpp"

namespace l4dec {

double err_single(const Eigen::VectorXd& qbar, const Eigen::MatrixXd& Abar) {
    if (Abar.rows() != qbar.size() || Abar.cols() == 0)
        throw InvalidArgument("err_single: dimension mismatch");
    const double best = (Abar.transpose() * qbar).cwiseAbs().maxCoeff();
    return 1.0 - best;
}

double err_single(const SphereVector& qbar, const MixingMatrix& Abar) {
    return err_single(qbar.coords, Abar.entries);
}

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != n) throw InvalidArgument("min_cost_assignment: cost must be square");
    if (n == 0) return {};

    // Shortest-augmenting-path Hungarian method with dual potentials; O(n^3).
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0);  // match[j] = row matched to column j (1-based)
    std::vector<int> way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        while (j0 != 0) {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        }
    }

    std::vector<int> assignment(n, -1);
    for (int j = 1; j <= n; ++j)
        if (match[j] > 0) assignment[match[j] - 1] = j - 1;
    return assignment;
}

std::pair<SignedPermutation, double> match_signed_permutation(const Eigen::MatrixXd& A_est,
                                                              const Eigen::MatrixXd& A_true) {
    if (A_est.rows() != A_true.rows() || A_est.cols() != A_true.cols() || A_est.cols() == 0)
        throw InvalidArgument("match_signed_permutation: shapes must agree and be nonempty");
    const int r = static_cast<int>(A_est.cols());

    // Cost of pairing estimate column i with truth column j at the per-pair
    // optimal sign. sign(0) is taken as +1; the cost is the same either way.
    Eigen::MatrixXd cost(r, r);
    const Eigen::MatrixXd inner = A_est.transpose() * A_true;  // inner(i, j)
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            const double s = inner(i, j) < 0.0 ? -1.0 : 1.0;
            cost(i, j) = (A_est.col(i) - s * A_true.col(j)).squaredNorm();
        }

    const std::vector<int> assignment = min_cost_assignment(cost);
    SignedPermutation P;
    P.perm.resize(r);
    P.signs.resize(r);
    for (int i = 0; i < r; ++i) {
        P.perm[i] = assignment[i];
        P.signs[i] = inner(i, assignment[i]) < 0.0 ? -1 : 1;
    }
    P.validate();
    return {P, frobenius_err(A_est, A_true, P)};
}

double frobenius_err(const Eigen::MatrixXd& A_est, const Eigen::MatrixXd& A_true,
                     const SignedPermutation& perm) {
    if (A_est.rows() != A_true.rows() || A_est.cols() != A_true.cols())
        throw InvalidArgument("frobenius_err: shapes must agree");
    const int r = static_cast<int>(A_est.cols());
    if (static_cast<int>(perm.perm.size()) != r)
        throw InvalidArgument("frobenius_err: permutation size mismatch");
    double sq = 0.0;
    for (int j = 0; j < r; ++j)
        sq += (A_est.col(j) - perm.signs[j] * A_true.col(perm.perm[j])).squaredNorm();
    return std::sqrt(sq / r);
}

RecoveryReport score_recovery(const Eigen::MatrixXd& A_est, const Eigen::MatrixXd& A_true,
                              double rho_e) {
    RecoveryReport rep;
    auto [perm, ferr] = match_signed_permutation(A_est, A_true);
    rep.matching = std::move(perm);
    rep.frobenius_err = ferr;
    rep.per_column_err.resize(A_est.cols());
    // Per-column error is a direction measure on the sphere, so both sides
    // are normalized: estimated columns carry data-dependent scales, and a
    // full-column-rank truth has non-unit columns that would otherwise cap
    // the attainable correlation below 1. A collapsed (zero) column counts
    // as maximal error.
    Eigen::MatrixXd A_dir = A_true;
    for (Eigen::Index j = 0; j < A_dir.cols(); ++j) {
        const double nrm = A_dir.col(j).norm();
        if (nrm > 0.0) A_dir.col(j) /= nrm;
    }
    for (Eigen::Index j = 0; j < A_est.cols(); ++j) {
        const double nrm = A_est.col(j).norm();
        rep.per_column_err[static_cast<std::size_t>(j)] =
            nrm > 0.0 ? err_single((A_est.col(j) / nrm).eval(), A_dir) : 1.0;
    }
    rep.success = std::all_of(rep.per_column_err.begin(), rep.per_column_err.end(),
                              [&](double e) { return e <= rho_e; });
    return rep;
}

double success_rate(const std::vector<RecoveryReport>& reports, double rho_e,
                    SuccessMode mode) {
    if (reports.empty()) throw InvalidArgument("success_rate: empty report list");
    int hits = 0;
    for (const auto& rep : reports) {
        if (rep.per_column_err.empty())
            throw InvalidArgument("success_rate: report with no columns");
        bool ok;
        if (mode == SuccessMode::AnyColumn) {
            ok = *std::min_element(rep.per_column_err.begin(), rep.per_column_err.end()) <=
                 rho_e;
        } else {
            ok = *std::max_element(rep.per_column_err.begin(), rep.per_column_err.end()) <=
                 rho_e;
        }
        hits += ok ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(reports.size());
}

}  // namespace l4dec
