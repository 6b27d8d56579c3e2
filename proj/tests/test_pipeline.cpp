// Tests for the full decomposition pipeline: sphering, per-column descent
// with deflation, inversion of the preconditioner; plus the deflation-state
// bookkeeping and the statistical recovery target on a general instance.
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "l4dec/common.hpp"
#include "l4dec/metrics.hpp"
#include "l4dec/model.hpp"
#include "l4dec/pipeline.hpp"
#include "l4dec/precond.hpp"
#include "l4dec/rng.hpp"

using namespace l4dec;

namespace {

// Coefficients whose rows have disjoint column supports and exactly unit row
// norms: every data column is a multiple of one dictionary column and the
// sphered mixing matrix equals A itself, so recovery is exact up to solver
// tolerance.
Eigen::MatrixXd block_coefficients(int r, int per_block, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(r, r * per_block);
    for (int i = 0; i < r; ++i) {
        for (int k = 0; k < per_block; ++k) X(i, i * per_block + k) = rng.normal();
        X.row(i) /= X.row(i).norm();
    }
    return X;
}

Eigen::MatrixXd orthonormal_rows(int p, int n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd G(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) G(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    return Q.transpose();
}

}  // namespace

TEST_CASE("separable noiseless construction is recovered exactly") {
    const int p = 12, r = 4, per_block = 100;
    const MixingMatrix A = generate_A({p, r, r * per_block}, MatrixKind::SemiOrthogonal, 5);
    const Eigen::MatrixXd Y = A.entries * block_coefficients(r, per_block, 6);

    const RecoveryResult res = recover_all(Y, r, PipelineOptions{});
    CHECK(res.A_est.entries.cols() == r);
    CHECK_FALSE(res.projection_warning);
    CHECK_FALSE(res.init_q0_fallback);

    const RecoveryReport rep = score_recovery(res.A_est.entries, A.entries);
    for (double e : rep.per_column_err) CHECK(e <= 1e-6);
    CHECK(rep.frobenius_err <= 1e-6);
    CHECK(rep.success);

    // The matching covers every truth column exactly once.
    std::vector<bool> seen(r, false);
    for (int j : rep.matching.perm) {
        CHECK_FALSE(seen[j]);
        seen[j] = true;
    }

    // Output operator norm is one.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(res.A_est.entries);
    CHECK(svd.singularValues()(0) == doctest::Approx(1.0).epsilon(1e-10));

    // Healthy per-column diagnostics: converged, tiny overlap with the
    // previously recovered span, no retries.
    CHECK(res.columns.size() == static_cast<std::size_t>(r));
    for (const ColumnDiagnostic& cd : res.columns) {
        CHECK(cd.status == SolveStatus::Converged);
        CHECK(cd.overlap <= 1e-6);
        CHECK_FALSE(cd.retried);
        CHECK_FALSE(cd.init_used_fallback);
    }
    CHECK(res.traces.size() == static_cast<std::size_t>(r));
}

TEST_CASE("rank-one problem reduces to a single solve") {
    const int p = 20, n = 500;
    const MixingMatrix A = generate_A({p, 1, n}, MatrixKind::SemiOrthogonal, 15);
    const SparseCoefficients X = generate_X({p, 1, n}, {0.3, 1.0}, 16);
    const Eigen::MatrixXd Y = synthesize(A, X);

    const RecoveryResult res = recover_all(Y, 1, PipelineOptions{});
    CHECK(res.A_est.entries.cols() == 1);
    CHECK(err_single(res.A_est.entries.col(0).normalized().eval(), A.entries) <= 1e-6);
    CHECK(res.traces.size() == 1);
}

TEST_CASE("deflating an exact column leaves the complementary factorization") {
    const int p = 10, r = 3, n = 60;
    const MixingMatrix A = generate_A({p, r, n}, MatrixKind::SemiOrthogonal, 25);
    const Eigen::MatrixXd Q = orthonormal_rows(r, n, 26);
    const Eigen::MatrixXd Y = A.entries * (3.7 * Q);
    const PreconditionedData pre = precondition(Y, r);

    DeflationState state(p);
    state.append(A.entries.col(0));
    const Eigen::MatrixXd deflated = deflated_data(pre.Ybar, state);
    const Eigen::MatrixXd expected = A.entries.rightCols(r - 1) * Q.bottomRows(r - 1);
    CHECK((deflated - expected).norm() <= 1e-8);

    const Objective obj = deflation_objective(pre.Ybar, state);
    CHECK(obj.kind == ObjectiveKind::RawL4);
    CHECK((obj.data - deflated).norm() == 0.0);

    // Empty state: the objective data is the sphered matrix itself.
    DeflationState empty(p);
    CHECK((deflated_data(pre.Ybar, empty) - pre.Ybar).norm() == 0.0);

    // Full state: all columns recovered leaves a numerically zero matrix.
    DeflationState full(p);
    for (int j = 0; j < r; ++j) full.append(A.entries.col(j));
    CHECK(deflated_data(pre.Ybar, full).norm() <= 1e-8 * pre.Ybar.norm());
}

TEST_CASE("deflation state keeps an orthonormal basis and absorbs duplicates") {
    const int p = 8;
    DeflationState state(p);
    Rng rng(35);
    Eigen::VectorXd v1(p), v2(p);
    for (int i = 0; i < p; ++i) v1(i) = rng.normal();
    for (int i = 0; i < p; ++i) v2(i) = rng.normal();
    v1.normalize();
    v2.normalize();

    state.append(v1);
    CHECK(state.count() == 1);
    CHECK(state.basis().cols() == 1);

    state.append(v2);
    CHECK(state.basis().cols() == 2);
    const Eigen::MatrixXd B = state.basis();
    CHECK((B.transpose() * B - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-10);

    // A vector already inside the span extends the record but not the basis.
    const Eigen::VectorXd inside = (0.6 * v1 + 0.8 * v2).normalized();
    state.append(inside);
    CHECK(state.count() == 3);
    CHECK(state.basis().cols() == 2);

    // Projection annihilates the span.
    CHECK(state.project_out(state.basis()).norm() <= 1e-10);
    Eigen::MatrixXd M(p, 2);
    M.col(0) = v1;
    M.col(1) = (v1 + 0.3 * v2).eval();
    CHECK(state.project_out(M).norm() <= 1e-10);
}

TEST_CASE("literal single-initialization ordering also recovers the easy instance") {
    const int p = 12, r = 4, per_block = 80;
    const MixingMatrix A = generate_A({p, r, r * per_block}, MatrixKind::SemiOrthogonal, 45);
    const Eigen::MatrixXd Y = A.entries * block_coefficients(r, per_block, 46);

    PipelineOptions opts;
    opts.init_once = true;
    const RecoveryResult res = recover_all(Y, r, opts);
    const RecoveryReport rep = score_recovery(res.A_est.entries, A.entries);
    for (double e : rep.per_column_err) CHECK(e <= 1e-6);
}

TEST_CASE("solver-options overload behaves like the wrapped pipeline options") {
    const int p = 12, r = 3, per_block = 60;
    const MixingMatrix A = generate_A({p, r, r * per_block}, MatrixKind::SemiOrthogonal, 55);
    const Eigen::MatrixXd Y = A.entries * block_coefficients(r, per_block, 56);

    const RecoveryResult a = recover_all(Y, r, SolverOptions{});
    const RecoveryResult b = recover_all(Y, r, PipelineOptions{});
    CHECK((a.A_est.entries - b.A_est.entries).norm() == 0.0);
}

TEST_CASE("rank-deficient input aborts with the rank error") {
    Rng rng(65);
    Eigen::VectorXd u(9), w(40);
    for (int i = 0; i < 9; ++i) u(i) = rng.normal();
    for (int i = 0; i < 40; ++i) w(i) = rng.normal();
    const Eigen::MatrixXd Y = u * w.transpose();
    CHECK_THROWS_AS(recover_all(Y, 2, PipelineOptions{}), NumericalError);
}

TEST_CASE("general full-column-rank instance meets the statistical target") {
    // p=100, r=10, theta=0.1, n=12000: normalized Frobenius error at most 0.1
    // in at least 80% of 20 seeded trials.
    const ProblemDims dims{100, 10, 12000};
    const SparsityModel sm{0.1, 1.0};
    int hits = 0;
    std::vector<double> errs;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const MixingMatrix A = generate_A(dims, MatrixKind::FullColumnRank, mix_seed(seed, 1));
        const SparseCoefficients X = generate_X(dims, sm, mix_seed(seed, 2));
        const Eigen::MatrixXd Y = synthesize(A, X);
        PipelineOptions opts;
        opts.seed = seed;
        const RecoveryResult res = recover_all(Y, dims.r, opts);
        const RecoveryReport rep = score_recovery(res.A_est.entries, A.entries);
        errs.push_back(rep.frobenius_err);
        if (rep.frobenius_err <= 0.1) ++hits;
    }
    std::string shown;
    for (double e : errs) shown += std::to_string(e) + " ";
    INFO("frobenius errors: ", shown);
    CHECK(hits >= 16);
}
