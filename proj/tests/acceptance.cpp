// Acceptance gate for the quartic-maximization decomposition library.
//
// Thirteen end-to-end checks covering derivative correctness, the
// sample/population expectation identity, the maximizer structure of the
// quartic on orthonormal columns, solver convergence to signed columns,
// statistical recovery rates, the n^{-1/2} perturbation rate of the sphering
// step, initializer quality, negative-curvature certificates in the middle
// band, critical-point constants, the rank trend of full recovery, the
// alternating-minimization baseline comparison, exactness of the matching
// oracle, and byte determinism of the sweep command.
//
// Each check prints exactly one PASS/FAIL line with its wall time and the
// pinned tolerance; the process exit code is the number of failures.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "l4dec/baseline_adm.hpp"
#include "l4dec/common.hpp"
#include "l4dec/landscape.hpp"
#include "l4dec/metrics.hpp"
#include "l4dec/model.hpp"
#include "l4dec/objective.hpp"
#include "l4dec/pipeline.hpp"
#include "l4dec/precond.hpp"
#include "l4dec/rng.hpp"
#include "l4dec/solver.hpp"

using namespace l4dec;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, ...) {
    va_list args;
    va_start(args, pattern);
    char buf[512];
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return std::string(buf);
}

Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd M(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) M(i, j) = rng.normal();
    return M;
}

Eigen::VectorXd random_unit(int p, Rng& rng) {
    Eigen::VectorXd v(p);
    for (int i = 0; i < p; ++i) v(i) = rng.normal();
    return v.normalized();
}

// Unit tangent direction at q.
Eigen::VectorXd random_tangent(const Eigen::VectorXd& q, Rng& rng) {
    Eigen::VectorXd g(q.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) g(i) = rng.normal();
    g -= g.dot(q) * q;
    return g.normalized();
}

Eigen::MatrixXd unit_columns(const Eigen::MatrixXd& M) {
    Eigen::MatrixXd out = M;
    for (Eigen::Index j = 0; j < out.cols(); ++j) out.col(j).normalize();
    return out;
}

// p x p orthogonal matrix: Q factor of a seeded Gaussian draw.
Eigen::MatrixXd square_orthogonal(int p, std::uint64_t seed) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(p, p, seed));
    return qr.householderQ() * Eigen::MatrixXd::Identity(p, p);
}

Eigen::MatrixXd bernoulli_gaussian(int r, int n, double theta, double sigma,
                                   std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd X(r, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < r; ++i)
            X(i, j) = rng.bernoulli(theta) ? sigma * rng.normal() : 0.0;
    return X;
}

double op_norm(const Eigen::MatrixXd& M) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
}

// Objective value after the normalized retraction q(t) = (q + t v)/||q + t v||.
double retracted_value(const Objective& obj, const Eigen::VectorXd& q,
                       const Eigen::VectorXd& v, double t) {
    return eval_value(obj, (q + t * v).normalized());
}

double quartic_norm4(const Eigen::MatrixXd& A, const Eigen::VectorXd& q) {
    return (A.transpose() * q).array().square().square().sum();
}

// Distance of q to the nearest signed column of A (columns assumed unit).
double signed_column_distance(const Eigen::VectorXd& q, const Eigen::MatrixXd& A) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        best = std::min(best, (q - A.col(j)).norm());
        best = std::min(best, (q + A.col(j)).norm());
    }
    return best;
}

// Operator norm of Abar^T Ybar Xbar^T (Xbar Xbar^T)^{-1} - I: the size of the
// perturbation the sphering step leaves relative to the polar factor of A.
double fitted_perturbation(const MixingMatrix& A, const SparseCoefficients& X,
                           double theta, double sigma) {
    const int r = static_cast<int>(A.r());
    const int n = static_cast<int>(X.entries.cols());
    const Eigen::MatrixXd Y = synthesize(A, X);
    const PreconditionedData pre = precondition(Y, r);
    const Eigen::MatrixXd Abar = orthonormal_polar_factor(A.entries);
    const Eigen::MatrixXd Xbar = X.entries / std::sqrt(theta * n * sigma * sigma);
    const Eigen::MatrixXd Gx = Xbar * Xbar.transpose();
    const Eigen::MatrixXd fit = Abar.transpose() * pre.Ybar * Xbar.transpose() *
                                Gx.ldlt().solve(Eigen::MatrixXd::Identity(r, r));
    return op_norm(fit - Eigen::MatrixXd::Identity(r, r));
}

// Exhaustive minimum of (1/sqrt(r)) ||E - T P||_F over signed permutations P.
double brute_force_match(const Eigen::MatrixXd& E, const Eigen::MatrixXd& T) {
    const int r = static_cast<int>(E.cols());
    Eigen::MatrixXd cplus(r, r), cminus(r, r);  // (truth column i, estimate column j)
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            cplus(i, j) = (E.col(j) - T.col(i)).squaredNorm();
            cminus(i, j) = (E.col(j) + T.col(i)).squaredNorm();
        }
    std::vector<int> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        for (int mask = 0; mask < (1 << r); ++mask) {
            double total = 0.0;
            for (int j = 0; j < r; ++j)
                total += (mask >> j & 1) ? cminus(perm[j], j) : cplus(perm[j], j);
            best = std::min(best, total);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::sqrt(best / r);
}

// ---------------------------------------------------------------------------
// Criterion 1: Riemannian gradients and Hessians of the population and sample
// objectives match central finite differences.
Outcome check_derivatives() {
    const std::array<std::pair<int, int>, 5> shapes{
        {{10, 3}, {20, 5}, {40, 8}, {60, 12}, {100, 20}}};
    double max_grad_rel = 0.0, max_hess_rel = 0.0;
    int instance = 0;
    for (const auto& [p, r] : shapes) {
        for (int rep = 0; rep < 4; ++rep, ++instance) {
            const ProblemDims dims{p, r, 256};
            const std::uint64_t seed = mix_seed(0xAC01, instance);
            const MatrixKind kind =
                (rep % 2 == 0) ? MatrixKind::SemiOrthogonal : MatrixKind::FullColumnRank;
            const double theta = (rep < 2) ? 0.1 : 0.3;
            const MixingMatrix A = generate_A(dims, kind, mix_seed(seed, 1));
            const SparseCoefficients X = generate_X(dims, {theta, 1.0}, mix_seed(seed, 2));
            const Objective pop = Objective::population_orth(A.entries, theta);
            const Objective smp = Objective::sample_orth(synthesize(A, X), theta, 1.0);
            Rng rng(mix_seed(seed, 3));
            const Eigen::VectorXd q = random_unit(p, rng);
            for (const Objective* obj : {&pop, &smp}) {
                const Eigen::VectorXd g = eval_grad(*obj, q);
                const double f0 = eval_value(*obj, q);
                for (int d = 0; d < 10; ++d) {
                    const Eigen::VectorXd v = random_tangent(q, rng);
                    const double hg = 1e-5;
                    const double fd_g = (retracted_value(*obj, q, v, hg) -
                                         retracted_value(*obj, q, v, -hg)) /
                                        (2.0 * hg);
                    const double an_g = g.dot(v);
                    max_grad_rel = std::max(
                        max_grad_rel, std::abs(fd_g - an_g) / std::max(1.0, std::abs(an_g)));
                    const double hh = 1e-4;
                    const double fd_h = (retracted_value(*obj, q, v, hh) - 2.0 * f0 +
                                         retracted_value(*obj, q, v, -hh)) /
                                        (hh * hh);
                    const double an_h = v.dot(eval_hess_vec(*obj, q, v));
                    max_hess_rel = std::max(
                        max_hess_rel, std::abs(fd_h - an_h) / std::max(1.0, std::abs(an_h)));
                }
            }
        }
    }
    Outcome out;
    out.pass = max_grad_rel <= 1e-5 && max_hess_rel <= 1e-4;
    out.detail = fmt("20 instances x 10 directions x {population, sample}: "
                     "max grad rel %.2e (tol 1e-5), max hess rel %.2e (tol 1e-4)",
                     max_grad_rel, max_hess_rel);
    return out;
}

// Criterion 2: Monte-Carlo mean of the sample objective over fresh coefficient
// draws matches the population objective within 3 standard errors.
Outcome check_expectation_identity() {
    const int p = 20, r = 5, n = 2000, draws = 200;
    double worst_z = 0.0;
    for (int c = 0; c < 10; ++c) {
        const double theta = (c < 5) ? 0.1 : 0.3;
        const ProblemDims dims{p, r, n};
        const MatrixKind kind =
            (c % 2 == 0) ? MatrixKind::SemiOrthogonal : MatrixKind::FullColumnRank;
        const MixingMatrix A = generate_A(dims, kind, mix_seed(0xAC02, 2 * c));
        Rng rng(mix_seed(0xAC02, 2 * c + 1));
        const Eigen::VectorXd q = random_unit(p, rng);
        const double f = eval_value(Objective::population_orth(A.entries, theta), q);
        double sum = 0.0, sumsq = 0.0;
        for (int t = 0; t < draws; ++t) {
            const SparseCoefficients X =
                generate_X(dims, {theta, 1.0}, mix_seed(0xAC20 + c, t));
            const double F =
                eval_value(Objective::sample_orth(synthesize(A, X), theta, 1.0), q);
            sum += F;
            sumsq += F * F;
        }
        const double mean = sum / draws;
        const double var = (sumsq - draws * mean * mean) / (draws - 1);
        const double se = std::sqrt(std::max(var, 0.0) / draws);
        worst_z = std::max(worst_z, std::abs(mean - f) / se);
    }
    Outcome out;
    out.pass = worst_z <= 3.0;
    out.detail =
        fmt("10 configurations x 200 draws: worst |mean - population|/SE = %.2f (tol 3)",
            worst_z);
    return out;
}

// Criterion 3: on orthonormal columns the quartic equals 1 exactly at signed
// columns and 1/s at every balanced s-term signed combination; random
// directions stay strictly below 1.
Outcome check_maximizer_structure() {
    const int p = 9, r = 6;
    const MixingMatrix A = generate_A({p, r, 100}, MatrixKind::SemiOrthogonal, 0xAC03);
    double worst_dev = 0.0;
    int points = 0;
    for (int mask = 1; mask < (1 << r); ++mask) {
        const int s = __builtin_popcount(mask);
        std::vector<int> idx;
        for (int i = 0; i < r; ++i)
            if (mask >> i & 1) idx.push_back(i);
        for (int signs = 0; signs < (1 << s); ++signs) {
            Eigen::VectorXd q = Eigen::VectorXd::Zero(p);
            for (int t = 0; t < s; ++t)
                q += ((signs >> t & 1) ? -1.0 : 1.0) * A.entries.col(idx[t]);
            q /= std::sqrt(static_cast<double>(s));
            worst_dev = std::max(worst_dev,
                                 std::abs(quartic_norm4(A.entries, q) - 1.0 / s));
            ++points;
        }
    }
    Rng rng(mix_seed(0xAC03, 7));
    double probe_max = 0.0;
    for (int t = 0; t < 2000; ++t)
        probe_max = std::max(probe_max, quartic_norm4(A.entries, random_unit(p, rng)));
    Outcome out;
    out.pass = worst_dev <= 1e-12 && probe_max < 1.0;
    out.detail = fmt("%d balanced signed combinations: max |value - 1/s| = %.2e "
                     "(tol 1e-12); max over 2000 random directions %.4f (< 1)",
                     points, worst_dev, probe_max);
    return out;
}

// Criterion 4: the population solver started from 100 points outside the flat
// region converges to a signed column every time.
Outcome check_population_convergence() {
    const int p = 30, r = 8;
    const double theta = 0.1;
    const MixingMatrix A = generate_A({p, r, 100}, MatrixKind::SemiOrthogonal, 0xAC04);
    const Objective obj = Objective::population_orth(A.entries, theta);
    const std::vector<SphereVector> inits =
        sample_in_band(A.entries, 1.0 / (2.0 * r) + 1e-9, 1.0, 100, 0xAC40);
    int good = 0, max_iters = 0;
    double worst_dist = 0.0;
    for (std::size_t i = 0; i < inits.size(); ++i) {
        SolverOptions so;
        so.seed = static_cast<std::uint64_t>(i);
        const SolveTrace tr = solve(obj, inits[i], so);
        const double dist = signed_column_distance(tr.final_q.coords, A.entries);
        worst_dist = std::max(worst_dist, dist);
        max_iters = std::max(max_iters, tr.iterations());
        if (dist <= 1e-6) ++good;
    }
    Outcome out;
    out.pass = good == 100;
    out.detail = fmt("%d/100 runs within 1e-6 of a signed column; worst distance %.2e; "
                     "max iterations %d",
                     good, worst_dist, max_iters);
    return out;
}

// Criterion 5: single-column recovery rate at the reference cell
// (p, r, theta, n) = (100, 10, 0.1, 5000), success threshold 0.01.
Outcome check_single_column_rate() {
    const ProblemDims dims{100, 10, 5000};
    const double theta = 0.1, rho_e = 0.01;
    int successes = 0;
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
        const MixingMatrix A =
            generate_A(dims, MatrixKind::FullColumnRank, mix_seed(0xAC05, 3 * s));
        const SparseCoefficients X =
            generate_X(dims, {theta, 1.0}, mix_seed(0xAC05, 3 * s + 1));
        const Eigen::MatrixXd Y = synthesize(A, X);
        const PreconditionedData pre = precondition(Y, dims.r);
        const InitQ0 init = init_q0(pre.Ybar, mix_seed(0xAC05, 3 * s + 2));
        SolverOptions so;
        so.seed = static_cast<std::uint64_t>(s);
        const SolveTrace tr = solve(Objective::raw_l4(pre.Ybar), init.q0, so);
        const InvertResult inv = invert_precondition(tr.final_q.coords, pre.D);
        const Eigen::VectorXd a_est = inv.A_est.entries.col(0).normalized();
        const double err = err_single(a_est, unit_columns(A.entries));
        worst = std::max(worst, err);
        if (err <= rho_e) ++successes;
    }
    Outcome out;
    out.pass = successes >= 18;
    out.detail = fmt("%d/20 seeds with column error <= 0.01 (need >= 18); worst error %.2e",
                     successes, worst);
    return out;
}

// Criterion 6: the sphering perturbation decays like n^{-1/2}: log-log slope
// across n in {2500, 5000, 10000, 20000} within [-0.65, -0.35].
Outcome check_perturbation_rate() {
    const int p = 50, r = 10;
    const double theta = 0.3, sigma = 1.0;
    const std::array<int, 4> ns{2500, 5000, 10000, 20000};
    std::array<double, 4> means{};
    for (std::size_t k = 0; k < ns.size(); ++k) {
        double total = 0.0;
        for (int s = 0; s < 10; ++s) {
            const ProblemDims dims{p, r, ns[k]};
            const MixingMatrix A = generate_A(dims, MatrixKind::SemiOrthogonal,
                                              mix_seed(0xAC06, 20 * k + 2 * s));
            const SparseCoefficients X =
                generate_X(dims, {theta, sigma}, mix_seed(0xAC06, 20 * k + 2 * s + 1));
            total += fitted_perturbation(A, X, theta, sigma);
        }
        means[k] = total / 10.0;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const double x = std::log(static_cast<double>(ns[k]));
        const double y = std::log(means[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = ns.size();
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    Outcome out;
    out.pass = slope >= -0.65 && slope <= -0.35;
    out.detail = fmt("fitted slope %.3f (target -0.5 +- 0.15); mean operator norms "
                     "%.3f / %.3f / %.3f / %.3f",
                     slope, means[0], means[1], means[2], means[3]);
    return out;
}

// Criterion 7: the row-sum initializer clears the spectral threshold
// ||Abar^T q0||_inf^2 >= 1/(2r) in at least 48 of 50 seeds at the reference cell.
Outcome check_initializer() {
    const ProblemDims dims{100, 10, 5000};
    const double theta = 0.1;
    const double threshold = 1.0 / (2.0 * dims.r);
    int hits = 0;
    double worst = 1.0;
    for (int s = 0; s < 50; ++s) {
        const MixingMatrix A =
            generate_A(dims, MatrixKind::FullColumnRank, mix_seed(0xAC07, 2 * s));
        const SparseCoefficients X =
            generate_X(dims, {theta, 1.0}, mix_seed(0xAC07, 2 * s + 1));
        const PreconditionedData pre = precondition(synthesize(A, X), dims.r);
        const Eigen::VectorXd q0 = init_q0(pre.Ybar, s).q0.coords;
        const Eigen::MatrixXd Abar = orthonormal_polar_factor(pre.D.D * A.entries);
        const double m = (Abar.transpose() * q0).cwiseAbs().maxCoeff();
        const double msq = m * m;
        worst = std::min(worst, msq);
        if (msq >= threshold) ++hits;
    }
    Outcome out;
    out.pass = hits >= 48;
    out.detail = fmt("%d/50 seeds with ||Abar^T q0||_inf^2 >= %.3f (need >= 48); "
                     "smallest value %.3f",
                     hits, threshold, worst);
    return out;
}

// Criterion 8: in the middle band of a square orthonormal dictionary the
// population witness curvature is negative at every sampled point, and the
// finite-sample witness sits below -0.21 ||zeta||_inf^2 at >= 95% of them.
Outcome check_band_curvature() {
    const int p = 10, r = 10, n = 100000;
    const double theta = 0.1;
    const Eigen::MatrixXd A = square_orthogonal(p, 0xAC08);
    const std::vector<SphereVector> pts =
        sample_in_band(A, 1.0 / (2.0 * r) + 1e-9, 0.25 - 1e-9, 1000, 0xAC80);
    const Eigen::MatrixXd Y = A * bernoulli_gaussian(r, n, theta, 1.0, 0xAC81);
    const Objective smp = Objective::sample_orth(Y, theta, 1.0);
    int pop_negative = 0, sample_below = 0;
    double pop_worst = -1.0, sample_worst_margin = -1.0;
    for (const SphereVector& q : pts) {
        const auto [v, value] = negative_curvature_witness(A, q.coords, theta);
        if (value < 0.0) ++pop_negative;
        pop_worst = std::max(pop_worst, value);
        const double m = (A.transpose() * q.coords).cwiseAbs().maxCoeff();
        const double msq = m * m;
        const double sval = v.dot(eval_hess_vec(smp, q.coords, v));
        if (sval <= -0.21 * msq) ++sample_below;
        sample_worst_margin = std::max(sample_worst_margin, sval + 0.21 * msq);
    }
    Outcome out;
    out.pass = pop_negative == 1000 && sample_below >= 950;
    out.detail = fmt("population witness negative at %d/1000 points (worst %.2e); "
                     "sample witness below -0.21 zeta_inf^2 at %d/1000 (need >= 950)",
                     pop_negative, pop_worst, sample_below);
    return out;
}

// Criterion 9: critical-point constants: alpha = 1 at single spikes, 1/k at
// balanced k-term points, and the k-spike witness curvature is at most
// -2(1-theta)/k.
Outcome check_taxonomy_constants() {
    const double theta = 0.1, tol = 1e-8;
    const MixingMatrix A = generate_A({12, 6, 100}, MatrixKind::SemiOrthogonal, 0xAC09);
    double worst_alpha = 0.0, worst_witness_slack = -1.0;
    bool kinds_ok = true;
    for (int k = 1; k <= 4; ++k) {
        const SphereVector q = balanced_combination(A.entries, k);
        const CriticalPointReport rep =
            critical_point_taxonomy(A.entries, q.coords, theta, tol);
        worst_alpha = std::max(worst_alpha, std::abs(rep.alpha - 1.0 / k));
        if (k == 1) {
            kinds_ok = kinds_ok && rep.kase == CriticalCase::SingleSpike;
        } else {
            kinds_ok = kinds_ok && rep.kase == CriticalCase::MultiSpike &&
                       rep.witness.has_value();
            if (rep.witness) {
                const double bound = -2.0 * (1.0 - theta) / k + 1e-6;
                worst_witness_slack =
                    std::max(worst_witness_slack, rep.witness->value - bound);
            }
        }
    }
    Outcome out;
    out.pass = kinds_ok && worst_alpha <= 1e-8 && worst_witness_slack <= 0.0;
    out.detail = fmt("k in {1,2,3,4}: max |alpha - 1/k| = %.2e (tol 1e-8); "
                     "witness slack above -2(1-theta)/k + 1e-6: %.2e (must be <= 0)",
                     worst_alpha, worst_witness_slack);
    return out;
}

// Criterion 10: at fixed n = 12000 the full-recovery error is smaller at
// r = 10 than at r = 30 on paired seeds (trend, not absolute values).
Outcome check_rank_trend() {
    const int p = 100, n = 12000;
    const double theta = 0.1;
    double mean10 = 0.0, mean30 = 0.0;
    for (int t = 0; t < 10; ++t) {
        for (const int r : {10, 30}) {
            const ProblemDims dims{p, r, n};
            const MixingMatrix A = generate_A(dims, MatrixKind::FullColumnRank,
                                              mix_seed(0xAC0A, 4 * t + (r == 10 ? 0 : 1)));
            const SparseCoefficients X = generate_X(
                dims, {theta, 1.0}, mix_seed(0xAC0A, 4 * t + (r == 10 ? 2 : 3)));
            PipelineOptions po;
            po.seed = static_cast<std::uint64_t>(t);
            const RecoveryResult res = recover_all(synthesize(A, X), r, po);
            const double err =
                score_recovery(res.A_est.entries, A.entries).frobenius_err;
            (r == 10 ? mean10 : mean30) += err / 10.0;
        }
    }
    Outcome out;
    out.pass = mean10 < mean30;
    out.detail = fmt("mean normalized Frobenius error over 10 paired trials: "
                     "r=10 -> %.4f, r=30 -> %.4f (require r=10 < r=30)",
                     mean10, mean30);
    return out;
}

// Criterion 11: against the alternating baseline on orthonormal dictionaries:
// at theta = 0.5 the quartic pipeline wins on at least 70% of paired seeds;
// at theta = 0.1 the two mean errors are within a factor of 2.
//
// Baseline protocol: the l1 penalty is calibrated once in the sparse regime
// (coarse scan at theta = 0.1 on this cell, taking the low-shrinkage edge of
// the recovery plateau) and held fixed across sparsity levels, which is how
// this baseline is normally run. Letting the penalty rescale per instance
// would measure a different, self-tuning baseline.
Outcome check_baseline_comparison() {
    const ProblemDims dims{100, 10, 12000};
    const double fixed_lambda = 0.07;
    auto run_pair = [&](double theta, int s, std::uint64_t salt) {
        const MixingMatrix A =
            generate_A(dims, MatrixKind::SemiOrthogonal, mix_seed(salt, 2 * s));
        const SparseCoefficients X =
            generate_X(dims, {theta, 1.0}, mix_seed(salt, 2 * s + 1));
        const Eigen::MatrixXd Y = synthesize(A, X);
        PipelineOptions po;
        po.seed = static_cast<std::uint64_t>(s);
        const double e_l4 =
            score_recovery(recover_all(Y, dims.r, po).A_est.entries, A.entries)
                .frobenius_err;
        AdmOptions ao;
        ao.lambda = fixed_lambda;
        const double e_adm =
            score_recovery(adm_recover_all(Y, dims.r, ao, s).A_est.entries, A.entries)
                .frobenius_err;
        return std::pair<double, double>{e_l4, e_adm};
    };
    int wins_dense = 0;
    double dense_l4 = 0.0, dense_adm = 0.0;
    for (int s = 0; s < 20; ++s) {
        const auto [e_l4, e_adm] = run_pair(0.5, s, 0xAC0B);
        dense_l4 += e_l4 / 20.0;
        dense_adm += e_adm / 20.0;
        if (e_l4 < e_adm) ++wins_dense;
    }
    double sparse_l4 = 0.0, sparse_adm = 0.0;
    for (int s = 0; s < 20; ++s) {
        const auto [e_l4, e_adm] = run_pair(0.1, s, 0xAC0C);
        sparse_l4 += e_l4 / 20.0;
        sparse_adm += e_adm / 20.0;
    }
    const double ratio = std::max(sparse_l4 / sparse_adm, sparse_adm / sparse_l4);
    Outcome out;
    out.pass = wins_dense >= 14 && ratio <= 2.0;
    out.detail = fmt("theta=0.5: quartic wins %d/20 (need >= 14; mean %.3f vs %.3f); "
                     "theta=0.1: mean ratio %.2f (tol 2.0; %.4f vs %.4f)",
                     wins_dense, dense_l4, dense_adm, ratio, sparse_l4, sparse_adm);
    return out;
}

// Criterion 12: assignment-based signed-permutation matching equals exhaustive
// search over all r! 2^r candidates.
Outcome check_matching_oracle() {
    double worst = 0.0;
    int pair_idx = 0;
    for (const int r : {2, 3, 4, 5, 6}) {
        for (int t = 0; t < 20; ++t, ++pair_idx) {
            const int p = r + 4;
            const Eigen::MatrixXd T =
                unit_columns(gaussian_matrix(p, r, mix_seed(0xAC0D, 2 * pair_idx)));
            Eigen::MatrixXd E;
            if (t % 2 == 0) {
                E = unit_columns(gaussian_matrix(p, r, mix_seed(0xAC0D, 2 * pair_idx + 1)));
            } else {
                // Perturbed signed shuffle of T: a realistic near-match pair.
                Rng rng(mix_seed(0xAC0E, pair_idx));
                std::vector<int> shuffle(r);
                std::iota(shuffle.begin(), shuffle.end(), 0);
                for (int i = r - 1; i > 0; --i)
                    std::swap(shuffle[i],
                              shuffle[static_cast<int>(rng.uniform() * (i + 1))]);
                E.resize(p, r);
                for (int j = 0; j < r; ++j)
                    E.col(j) = (rng.bernoulli(0.5) ? 1.0 : -1.0) * T.col(shuffle[j]);
                E += 0.05 * gaussian_matrix(p, r, mix_seed(0xAC0F, pair_idx));
                E = unit_columns(E);
            }
            const auto [perm, err] = match_signed_permutation(E, T);
            const double brute = brute_force_match(E, T);
            worst = std::max(worst, std::abs(err - brute));
            worst = std::max(worst, std::abs(frobenius_err(E, T, perm) - err));
        }
    }
    Outcome out;
    out.pass = worst <= 1e-12;
    out.detail =
        fmt("100 pairs, r in {2..6}: max |assignment - exhaustive| = %.2e (tol 1e-12)",
            worst);
    return out;
}

// Criterion 13: the sweep command with a fixed base seed writes byte-identical
// CSV output on repeated invocation.
Outcome check_sweep_determinism() {
    const fs::path base = fs::temp_directory_path() / "l4dec_acceptance";
    std::error_code ec;
    fs::remove_all(base, ec);
    fs::create_directories(base / "run1");
    fs::create_directories(base / "run2");
    const std::string cli = L4DEC_CLI_PATH;
    auto invoke = [&](const std::string& dir) {
        const std::string cmd = "\"" + cli +
                                "\" sweep --p 10 --r-values 2 --theta-values 0.2,0.3 "
                                "--n-values 300 --trials 3 --base-seed 7 --mode single "
                                "--out \"" +
                                dir + "\" >/dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    const int rc1 = invoke((base / "run1").string());
    const int rc2 = invoke((base / "run2").string());
    auto slurp = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string csv1 = slurp(base / "run1" / "sweep.csv");
    const std::string csv2 = slurp(base / "run2" / "sweep.csv");
    Outcome out;
    out.pass = rc1 == 0 && rc2 == 0 && !csv1.empty() && csv1 == csv2 &&
               csv1.rfind("p,r,theta,n,", 0) == 0;
    out.detail = fmt("exit codes %d/%d; %zu-byte CSV %s across runs", rc1, rc2,
                     csv1.size(), csv1 == csv2 && !csv1.empty() ? "identical" : "DIFFERS");
    fs::remove_all(base, ec);
    return out;
}

struct Criterion {
    const char* label;
    double budget_s;
    std::function<Outcome()> fn;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"derivatives match central finite differences", 30.0, check_derivatives},
        {"sample objective mean matches population objective", 60.0,
         check_expectation_identity},
        {"quartic maximizer structure on orthonormal columns", 60.0,
         check_maximizer_structure},
        {"population solver reaches signed columns from 100 generic starts", 60.0,
         check_population_convergence},
        {"single-column recovery rate at the reference cell", 300.0,
         check_single_column_rate},
        {"sphering perturbation decays like n^-1/2", 180.0, check_perturbation_rate},
        {"initializer clears the 1/(2r) correlation threshold", 120.0, check_initializer},
        {"middle-band curvature witnesses are negative", 120.0, check_band_curvature},
        {"critical-point constants alpha = 1/k and witness bound", 10.0,
         check_taxonomy_constants},
        {"full recovery error increases with rank at fixed n", 600.0, check_rank_trend},
        {"quartic pipeline vs alternating baseline", 600.0, check_baseline_comparison},
        {"signed-permutation matching equals exhaustive search", 10.0,
         check_matching_oracle},
        {"sweep command reproduces byte-identical CSV", 60.0, check_sweep_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        const bool in_budget = elapsed <= criteria[i].budget_s;
        const bool pass = out.pass && in_budget;
        if (!pass) ++failures;
        std::printf("[%2zu/13] %s  %6.1fs/%.0fs  %s -- %s%s\n", i + 1,
                    pass ? "PASS" : "FAIL", elapsed, criteria[i].budget_s,
                    criteria[i].label, out.detail.c_str(),
                    !in_budget ? " [over budget]" : "");
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/13 passed\n", 13 - failures);
    return failures;
}
