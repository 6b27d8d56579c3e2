// Tests for the recovery metrics: single-vector error, optimal signed
// matching (checked against exhaustive enumeration), the Hungarian assignment
// core, report scoring, and success-rate aggregation.
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "l4dec/common.hpp"
#include "l4dec/metrics.hpp"
#include "l4dec/model.hpp"
#include "l4dec/rng.hpp"

using namespace l4dec;

namespace {

Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd M(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) M(i, j) = rng.normal();
    return M;
}

Eigen::MatrixXd unit_columns(int rows, int cols, std::uint64_t seed) {
    Eigen::MatrixXd M = gaussian_matrix(rows, cols, seed);
    for (int j = 0; j < cols; ++j) M.col(j).normalize();
    return M;
}

// Minimum of (1/sqrt(r)) ||A_est - A_true P||_F over every signed permutation,
// by direct enumeration of all r! * 2^r candidates.
double brute_force_match(const Eigen::MatrixXd& A_est, const Eigen::MatrixXd& A_true) {
    const int r = static_cast<int>(A_true.cols());
    std::vector<int> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        for (unsigned mask = 0; mask < (1u << r); ++mask) {
            double ss = 0.0;
            for (int j = 0; j < r; ++j) {
                const double s = (mask >> j) & 1u ? -1.0 : 1.0;
                ss += (A_est.col(j) - s * A_true.col(perm[j])).squaredNorm();
            }
            best = std::min(best, std::sqrt(ss / r));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Minimum assignment cost by enumeration.
double brute_force_assignment_cost(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += cost(i, perm[i]);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

TEST_CASE("single-vector error on hand-computed configurations") {
    const int p = 6, r = 3;
    // Use coordinate columns so every quantity is exact.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, r);
    A(0, 0) = A(1, 1) = A(2, 2) = 1.0;

    Eigen::VectorXd q = A.col(0);
    CHECK(err_single(q, A) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(err_single((-q).eval(), A) == doctest::Approx(0.0).epsilon(1e-15));

    q = Eigen::VectorXd::Zero(p);
    q(5) = 1.0;  // orthogonal to every column
    CHECK(err_single(q, A) == doctest::Approx(1.0).epsilon(1e-15));

    q = Eigen::VectorXd::Zero(p);
    q(0) = q(1) = 1.0 / std::sqrt(2.0);
    CHECK(err_single(q, A) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-14));

    // SphereVector overload agrees with the raw overload.
    MixingMatrix M{A, MatrixKind::SemiOrthogonal};
    CHECK(err_single(SphereVector::checked(q), M) == err_single(q, A));

    // Sign symmetry on random data.
    const Eigen::MatrixXd B = unit_columns(9, 4, 3);
    Eigen::VectorXd u = gaussian_matrix(9, 1, 4).col(0).normalized();
    CHECK(err_single(u, B) == err_single((-u).eval(), B));
    CHECK(err_single(u, B) >= 0.0);
    CHECK(err_single(u, B) <= 1.0);

    CHECK_THROWS_AS(err_single(Eigen::VectorXd::Ones(3).eval(), B), InvalidArgument);
    CHECK_THROWS_AS(err_single(u, Eigen::MatrixXd(9, 0)), InvalidArgument);
}

TEST_CASE("signed matching equals exhaustive enumeration") {
    for (int r : {2, 3, 4, 5}) {
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            const Eigen::MatrixXd A_true = unit_columns(r + 4, r, 10 * r + seed);
            const Eigen::MatrixXd A_est =
                unit_columns(r + 4, r, 1000 + 10 * r + seed);
            const auto [P, err] = match_signed_permutation(A_est, A_true);
            P.validate();
            CHECK(err == doctest::Approx(brute_force_match(A_est, A_true)).epsilon(1e-12));
            CHECK(frobenius_err(A_est, A_true, P) == doctest::Approx(err).epsilon(1e-12));
        }
    }
}

TEST_CASE("matching identifies a planted signed permutation exactly") {
    const int r = 5;
    const MixingMatrix A = generate_A({12, r, 100}, MatrixKind::SemiOrthogonal, 77);
    SignedPermutation planted;
    planted.perm = {3, 0, 4, 1, 2};
    planted.signs = {-1, 1, 1, -1, 1};
    planted.validate();
    const MixingMatrix A_est = apply_signed_permutation(A, planted);

    const auto [P, err] = match_signed_permutation(A_est.entries, A.entries);
    CHECK(err <= 1e-12);
    CHECK(P.perm == planted.perm);
    CHECK(P.signs == planted.signs);
}

TEST_CASE("matching error is invariant to signed permutation of either factor") {
    const Eigen::MatrixXd A_true = unit_columns(10, 4, 21);
    const Eigen::MatrixXd A_est = unit_columns(10, 4, 22);
    const double base = match_signed_permutation(A_est, A_true).second;

    SignedPermutation P;
    P.perm = {2, 3, 1, 0};
    P.signs = {1, -1, -1, 1};
    const Eigen::MatrixXd shuffled =
        apply_signed_permutation({A_est, MatrixKind::FullColumnRank}, P).entries;
    CHECK(match_signed_permutation(shuffled, A_true).second ==
          doctest::Approx(base).epsilon(1e-12));
    const Eigen::MatrixXd shuffled_truth =
        apply_signed_permutation({A_true, MatrixKind::FullColumnRank}, P).entries;
    CHECK(match_signed_permutation(A_est, shuffled_truth).second ==
          doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("assignment core solves hand and random instances optimally") {
    Eigen::MatrixXd C(3, 3);
    C << 4, 1, 3,
         2, 0, 5,
         3, 2, 2;
    std::vector<int> a = min_cost_assignment(C);
    double total = 0.0;
    std::vector<bool> used(3, false);
    for (int i = 0; i < 3; ++i) {
        CHECK_FALSE(used[a[i]]);
        used[a[i]] = true;
        total += C(i, a[i]);
    }
    CHECK(total == doctest::Approx(brute_force_assignment_cost(C)).epsilon(1e-14));
    CHECK(total == doctest::Approx(5.0).epsilon(1e-14));

    // Diagonal-dominant instance has the identity assignment.
    Eigen::MatrixXd D = Eigen::MatrixXd::Ones(4, 4) * 10.0;
    D.diagonal().setConstant(0.5);
    a = min_cost_assignment(D);
    for (int i = 0; i < 4; ++i) CHECK(a[i] == i);

    // Random instances up to 7x7 against enumeration.
    for (int n : {2, 4, 6, 7}) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const Eigen::MatrixXd R = gaussian_matrix(n, n, 500 + 10 * n + seed);
            const std::vector<int> asg = min_cost_assignment(R);
            double got = 0.0;
            std::vector<bool> hit(n, false);
            for (int i = 0; i < n; ++i) {
                REQUIRE_FALSE(hit[asg[i]]);
                hit[asg[i]] = true;
                got += R(i, asg[i]);
            }
            CHECK(got == doctest::Approx(brute_force_assignment_cost(R)).epsilon(1e-12));
        }
    }

    CHECK_THROWS_AS(min_cost_assignment(Eigen::MatrixXd::Zero(3, 4)), InvalidArgument);
    CHECK(min_cost_assignment(Eigen::MatrixXd::Zero(1, 1)) == std::vector<int>{0});
}

TEST_CASE("recovery report scores direction, scale, and collapse correctly") {
    const MixingMatrix A = generate_A({10, 4, 100}, MatrixKind::SemiOrthogonal, 91);

    SUBCASE("perfect estimate") {
        SignedPermutation P;
        P.perm = {1, 0, 3, 2};
        P.signs = {1, -1, 1, -1};
        const Eigen::MatrixXd est = apply_signed_permutation(A, P).entries;
        const RecoveryReport rep = score_recovery(est, A.entries);
        for (double e : rep.per_column_err) CHECK(e <= 1e-12);
        CHECK(rep.frobenius_err <= 1e-12);
        CHECK(rep.success);
        CHECK(rep.matching.perm == P.perm);
    }

    SUBCASE("column scale affects the Frobenius error but not the direction error") {
        Eigen::MatrixXd est = A.entries;
        est.col(2) *= 0.9;
        const RecoveryReport rep = score_recovery(est, A.entries);
        CHECK(rep.per_column_err[2] <= 1e-12);
        CHECK(rep.frobenius_err == doctest::Approx(0.1 / 2.0).epsilon(1e-12));
        CHECK(rep.success);
    }

    SUBCASE("non-unit truth columns still admit zero direction error") {
        // A full-column-rank truth scaled to operator norm one has column
        // norms below one; exact direction recovery must still score as
        // success rather than being capped at 1 - ||a_j||.
        Eigen::MatrixXd truth = A.entries;
        truth.col(0) *= 0.6;
        truth.col(3) *= 0.8;
        const RecoveryReport rep = score_recovery(A.entries, truth);
        for (double e : rep.per_column_err) CHECK(e <= 1e-12);
        CHECK(rep.success);
        CHECK(rep.frobenius_err > 0.0);  // scale mismatch still shows up here
    }

    SUBCASE("a collapsed column counts as maximal error and fails the report") {
        Eigen::MatrixXd est = A.entries;
        est.col(1).setZero();
        const RecoveryReport rep = score_recovery(est, A.entries);
        CHECK(rep.per_column_err[1] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK_FALSE(rep.success);
    }

    SUBCASE("the success threshold is the one passed in") {
        // Rotate one column by a small angle inside the span of two columns.
        const double t = 0.06;
        Eigen::MatrixXd est = A.entries;
        est.col(0) = std::cos(t) * A.entries.col(0) + std::sin(t) * A.entries.col(1);
        const double expected_err = 1.0 - std::cos(t);
        CHECK(score_recovery(est, A.entries).per_column_err[0] ==
              doctest::Approx(expected_err).epsilon(1e-10));
        CHECK_FALSE(score_recovery(est, A.entries, 1e-3).success);
        CHECK(score_recovery(est, A.entries, 1e-2).success);
    }
}

TEST_CASE("success rate counts best-column and all-column criteria") {
    auto make = [](std::vector<double> errs) {
        RecoveryReport r;
        r.per_column_err = std::move(errs);
        return r;
    };
    const std::vector<RecoveryReport> reports = {
        make({0.001, 0.5}),   // best passes, worst fails
        make({0.002, 0.003}), // all pass
        make({0.8, 0.9}),     // all fail
    };
    CHECK(success_rate(reports, 0.01, SuccessMode::AnyColumn) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(success_rate(reports, 0.01, SuccessMode::AllColumns) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(success_rate(reports, 0.95, SuccessMode::AllColumns) ==
          doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(success_rate({}, 0.01, SuccessMode::AnyColumn), InvalidArgument);
    CHECK_THROWS_AS(success_rate({RecoveryReport{}}, 0.01, SuccessMode::AnyColumn),
                    InvalidArgument);
}

TEST_CASE("matching rejects mismatched shapes") {
    const Eigen::MatrixXd A = unit_columns(8, 3, 1);
    CHECK_THROWS_AS(match_signed_permutation(A, unit_columns(8, 4, 2)), InvalidArgument);
    CHECK_THROWS_AS(match_signed_permutation(A, unit_columns(7, 3, 2)), InvalidArgument);
    CHECK_THROWS_AS(match_signed_permutation(Eigen::MatrixXd(8, 0), Eigen::MatrixXd(8, 0)),
                    InvalidArgument);
    SignedPermutation wrong;
    wrong.perm = {0, 1};
    wrong.signs = {1, 1};
    CHECK_THROWS_AS(frobenius_err(A, A, wrong), InvalidArgument);
}
