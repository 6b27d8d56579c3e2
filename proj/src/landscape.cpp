#include "l4dec/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "l4dec/common.hpp"
#include "l4dec/rng.hpp"
#include "l4dec/solver.hpp"

namespace l4dec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_inputs(const Eigen::MatrixXd& A, const Eigen::VectorXd& q) {
    if (A.rows() != q.size() || A.cols() == 0)
        throw InvalidArgument("landscape: dimension mismatch between A and q");
    if (std::abs(q.norm() - 1.0) > 1e-10)
        throw InvalidArgument("landscape: q must be unit norm");
}

double quantile_sorted(const std::vector<double>& sorted, double t) {
    if (sorted.empty()) return kNaN;
    const double pos = t * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

RegionLabel classify_region(const Eigen::MatrixXd& A, const Eigen::VectorXd& q,
                            double c_star, double C_star) {
    check_inputs(A, q);
    if (!(c_star >= 0.0) || !(c_star <= C_star) || !(C_star < 1.0))
        throw InvalidArgument("classify_region: need 0 <= c_star <= C_star < 1");
    RegionLabel label;
    label.c_star = c_star;
    label.C_star = C_star;
    const Eigen::VectorXd z = A.transpose() * q;
    label.zeta_inf_sq = z.cwiseAbs().maxCoeff();
    label.zeta_inf_sq *= label.zeta_inf_sq;
    if (label.zeta_inf_sq <= c_star)
        label.region = Region::R0;
    else if (label.zeta_inf_sq >= C_star)
        label.region = Region::R1;
    else
        label.region = Region::R2;
    return label;
}

RegionLabel classify_region(const Eigen::MatrixXd& A, const Eigen::VectorXd& q) {
    return classify_region(A, q, 1.0 / (2.0 * static_cast<double>(A.cols())), 0.25);
}

std::pair<Eigen::VectorXd, double> negative_curvature_witness(const Eigen::MatrixXd& A,
                                                              const Eigen::VectorXd& q,
                                                              double theta) {
    check_inputs(A, q);
    const Eigen::VectorXd z = A.transpose() * q;
    Eigen::Index imax = 0;
    z.cwiseAbs().maxCoeff(&imax);
    const Eigen::VectorXd v = A.col(imax);
    Objective obj = Objective::population_orth(A, theta);
    // v^T (P H P) v: the projector inside eval_hess_vec restricts a_i to its
    // tangent component, which is what the curvature statement is about.
    const double value = v.dot(eval_hess_vec(obj, q, v));
    return {v, value};
}

double alpha_of(const Eigen::MatrixXd& A, const Eigen::VectorXd& q, double theta) {
    check_inputs(A, q);
    if (!(theta > 0.0) || !(theta < 1.0))
        throw InvalidArgument("alpha_of: theta must lie in (0, 1)");
    const Eigen::VectorXd z = A.transpose() * q;
    const double n2 = z.squaredNorm();
    const double n4 = z.array().square().square().sum();
    return n4 + theta / (1.0 - theta) * (n2 * n2 - n2);
}

bool theta_condition_check(double theta) {
    if (!(theta > 0.0) || !(theta < 1.0))
        throw InvalidArgument("theta_condition_check: theta must lie in (0, 1)");
    return std::sqrt(theta / (1.0 - theta)) < 1.0 - 3.0 * theta;
}

CriticalPointReport critical_point_taxonomy(const Eigen::MatrixXd& A,
                                            const Eigen::VectorXd& q, double theta,
                                            double tol) {
    check_inputs(A, q);
    if (!(tol > 0.0)) throw InvalidArgument("critical_point_taxonomy: tol must be positive");
    Objective obj = Objective::population_orth(A, theta);
    GradEval ge = grad_eval(obj, q);

    CriticalPointReport rep;
    rep.q = SphereVector{q};
    rep.grad_norm = ge.rgrad.norm();
    if (rep.grad_norm > tol)
        throw InvalidArgument("critical_point_taxonomy: gradient norm " +
                              std::to_string(rep.grad_norm) + " exceeds tol " +
                              std::to_string(tol));
    rep.alpha = alpha_of(A, q, theta);

    const Eigen::VectorXd z = A.transpose() * q;
    if (rep.alpha <= 10.0 * tol) {
        rep.kase = CriticalCase::NearZero;
        return rep;
    }

    const double spike_floor = 0.5 * std::sqrt(rep.alpha);
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (std::abs(z(i)) >= spike_floor) rep.spikes.push_back(static_cast<int>(i));
    const int k = static_cast<int>(rep.spikes.size());

    if (k == 0) {
        rep.kase = CriticalCase::NearZero;
        return rep;
    }
    if (k == 1) {
        rep.kase = CriticalCase::SingleSpike;
        rep.alpha_consistent = std::abs(rep.alpha - 1.0) <= 10.0 * tol;
        return rep;
    }

    rep.kase = CriticalCase::MultiSpike;
    rep.alpha_consistent = std::abs(rep.alpha - 1.0 / k) <= 10.0 * tol;

    // Witness in the span of the two strongest spike columns: with
    // s_i = sign(zeta_i), the direction s_i a_i - s_j a_j is tangent at the
    // balanced saddle and attains curvature -2(1-theta)/k there.
    std::vector<int> order = rep.spikes;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::abs(z(a)) > std::abs(z(b)); });
    const int i = order[0];
    const int j = order[1];
    const double si = z(i) < 0.0 ? -1.0 : 1.0;
    const double sj = z(j) < 0.0 ? -1.0 : 1.0;
    Eigen::VectorXd v = si * A.col(i) - sj * A.col(j);
    v -= q * q.dot(v);  // exact tangency at approximate critical points
    const double nv = v.norm();
    if (nv > 1e-12) {
        v /= nv;
        rep.witness = CurvatureWitness{v, v.dot(eval_hess_vec(obj, q, v))};
    }
    return rep;
}

SphereVector balanced_combination(const Eigen::MatrixXd& A, int k) {
    if (k < 1 || k > A.cols())
        throw InvalidArgument("balanced_combination: k out of range");
    Eigen::VectorXd v = A.leftCols(k).rowwise().sum() / std::sqrt(static_cast<double>(k));
    return SphereVector::normalized(v);
}

std::vector<SphereVector> sample_in_band(const Eigen::MatrixXd& A, double lo, double hi,
                                         int count, std::uint64_t seed, long max_attempts) {
    if (count <= 0) throw InvalidArgument("sample_in_band: count must be positive");
    if (!(lo <= hi)) throw InvalidArgument("sample_in_band: need lo <= hi");
    Rng rng(mix_seed(seed, 0xBA2D));
    std::vector<SphereVector> out;
    out.reserve(static_cast<std::size_t>(count));
    const Eigen::Index p = A.rows();
    for (long attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count;
         ++attempt) {
        Eigen::VectorXd g(p);
        for (Eigen::Index i = 0; i < p; ++i) g(i) = rng.normal();
        const double norm = g.norm();
        if (norm < 1e-14) continue;
        g /= norm;
        const double m = (A.transpose() * g).cwiseAbs().maxCoeff();
        const double msq = m * m;
        if (msq >= lo && msq <= hi) out.push_back(SphereVector{g});
    }
    if (static_cast<int>(out.size()) < count)
        throw NumericalError("sample_in_band: band acceptance too low, got " +
                             std::to_string(out.size()) + " of " + std::to_string(count));
    return out;
}

double beta_diagnostic(const Eigen::MatrixXd& A, const Eigen::VectorXd& q, double theta,
                       const Objective& sample_obj) {
    check_inputs(A, q);
    Objective pop = Objective::population_orth(A, theta);
    const Eigen::VectorXd gp = grad_eval(pop, q).rgrad;
    const Eigen::VectorXd gs = grad_eval(sample_obj, q).rgrad;
    const Eigen::VectorXd z = A.transpose() * q;
    Eigen::Index imax = 0;
    z.cwiseAbs().maxCoeff(&imax);
    return (gs - gp).dot(A.col(imax));
}

LandscapeReport landscape_report(const Eigen::MatrixXd& A, double theta, int n_samples,
                                 std::uint64_t seed, double c_star, double C_star,
                                 const Eigen::MatrixXd* data, double sigma) {
    if (n_samples <= 0) throw InvalidArgument("landscape_report: n_samples must be positive");
    if (!(theta > 0.0) || !(theta < 1.0))
        throw InvalidArgument("landscape_report: theta must lie in (0, 1)");

    LandscapeReport rep;
    rep.theta = theta;
    rep.c_star = c_star;
    rep.C_star = C_star;
    rep.total = n_samples;
    rep.outside_theory = !theta_condition_check(theta) || C_star > 0.25 + 1e-12;

    Objective pop = Objective::population_orth(A, theta);
    Objective sample;
    if (data) sample = Objective::sample_orth(*data, theta, sigma);

    Rng rng(mix_seed(seed, 0x1A2D));
    const Eigen::Index p = A.rows();
    std::vector<double> r2_curvs;
    std::vector<double> r2_sample_witness;
    for (int s = 0; s < n_samples; ++s) {
        Eigen::VectorXd g(p);
        for (Eigen::Index i = 0; i < p; ++i) g(i) = rng.normal();
        const double norm = g.norm();
        if (norm < 1e-14) {
            --s;
            continue;
        }
        g /= norm;

        LandscapeSample row;
        RegionLabel label = classify_region(A, g, c_star, C_star);
        row.zeta_inf_sq = label.zeta_inf_sq;
        row.region = label.region;
        switch (label.region) {
            case Region::R0: ++rep.count_r0; break;
            case Region::R1: ++rep.count_r1; break;
            case Region::R2: ++rep.count_r2; break;
        }

        GradEval ge = grad_eval(pop, g);
        HessOperator H = hess_operator(pop, g, ge.c);
        row.min_curvature =
            min_tangent_eigenpair(H, g, mix_seed(seed, 0x300 + static_cast<std::uint64_t>(s)))
                .first;
        row.witness_value = negative_curvature_witness(A, g, theta).second;
        if (data) {
            const Eigen::VectorXd z = A.transpose() * g;
            Eigen::Index imax = 0;
            z.cwiseAbs().maxCoeff(&imax);
            const Eigen::VectorXd v = A.col(imax);
            row.witness_sample_value = v.dot(eval_hess_vec(sample, g, v));
        } else {
            row.witness_sample_value = kNaN;
        }
        if (label.region == Region::R2) {
            r2_curvs.push_back(row.min_curvature);
            if (data) r2_sample_witness.push_back(row.witness_sample_value);
        }
        rep.samples.push_back(row);
    }

    std::sort(r2_curvs.begin(), r2_curvs.end());
    rep.curv_q05 = quantile_sorted(r2_curvs, 0.05);
    rep.curv_q50 = quantile_sorted(r2_curvs, 0.50);
    rep.curv_q95 = quantile_sorted(r2_curvs, 0.95);
    if (!r2_sample_witness.empty()) {
        std::sort(r2_sample_witness.begin(), r2_sample_witness.end());
        rep.sample_witness_q05 = quantile_sorted(r2_sample_witness, 0.05);
        rep.sample_witness_q50 = quantile_sorted(r2_sample_witness, 0.50);
        rep.sample_witness_q95 = quantile_sorted(r2_sample_witness, 0.95);
        const auto negatives = std::count_if(r2_sample_witness.begin(), r2_sample_witness.end(),
                                             [](double w) { return w < 0.0; });
        rep.sample_witness_negative_fraction =
            static_cast<double>(negatives) / static_cast<double>(r2_sample_witness.size());
    }

    const int kmax = static_cast<int>(std::min<Eigen::Index>(A.cols(), 6));
    for (int k = 1; k <= kmax; ++k) {
        SphereVector qk = balanced_combination(A, k);
        CriticalPointReport cp = critical_point_taxonomy(A, qk.coords, theta, 1e-8);
        TaxonomyEntry row;
        row.k = k;
        row.alpha = cp.alpha;
        row.kase = cp.kase;
        row.alpha_consistent = cp.alpha_consistent;
        row.witness_value = cp.witness ? cp.witness->value : kNaN;
        rep.taxonomy.push_back(row);
    }
    return rep;
}

}  // namespace l4dec
