#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "l4dec/objective.hpp"

namespace l4dec {

// Sphere partition by the peak squared correlation ||A^T q||_inf^2:
//   R0  <= c_star   (flat region: all correlations small)
//   R1  >= C_star   (one column dominates)
//   R2  in between  (negative-curvature band)
enum class Region { R0, R1, R2 };

struct RegionLabel {
    Region region = Region::R2;
    double c_star = 0.0;
    double C_star = 0.0;
    double zeta_inf_sq = 0.0;
};

RegionLabel classify_region(const Eigen::MatrixXd& A, const Eigen::VectorXd& q,
                            double c_star, double C_star);
// Default thresholds c_star = 1/(2r), C_star = 1/4.
RegionLabel classify_region(const Eigen::MatrixXd& A, const Eigen::VectorXd& q);

// Witness direction v = a_i at i = argmax |zeta_i| and its curvature
// v^T Hess f(q) v under the population objective. In the curvature band the
// value is certified negative; elsewhere it is reported uninterpreted.
std::pair<Eigen::VectorXd, double> negative_curvature_witness(const Eigen::MatrixXd& A,
                                                              const Eigen::VectorXd& q,
                                                              double theta);

// alpha = ||zeta||_4^4 + (theta/(1-theta)) (||zeta||_2^4 - ||zeta||_2^2),
// the Lagrange-multiplier value solved for at critical points.
double alpha_of(const Eigen::MatrixXd& A, const Eigen::VectorXd& q, double theta);

// Sparsity condition sqrt(theta/(1-theta)) < 1 - 3 theta; holds for all
// theta <= 1/6.
bool theta_condition_check(double theta);

enum class CriticalCase { NearZero, SingleSpike, MultiSpike };

struct CurvatureWitness {
    Eigen::VectorXd v;  // unit, tangent at q
    double value = 0.0;  // v^T Hess f(q) v
};

struct CriticalPointReport {
    SphereVector q;
    double alpha = 0.0;
    double grad_norm = 0.0;
    CriticalCase kase = CriticalCase::NearZero;
    std::vector<int> spikes;  // indices with |zeta_i| >= sqrt(alpha)/2
    // alpha within 10*tol of 1 (single spike) or 1/k (k spikes).
    bool alpha_consistent = true;
    // MultiSpike only: tangent direction in the span of the spike columns
    // with v^T H v <= -2(1-theta)/k + 10*tol at exact saddles.
    std::optional<CurvatureWitness> witness;
};

// Classifies an approximate critical point (gradient norm <= tol required) of
// the population objective into near-zero / single-spike / k-spike cases.
CriticalPointReport critical_point_taxonomy(const Eigen::MatrixXd& A,
                                            const Eigen::VectorXd& q, double theta,
                                            double tol = 1e-8);

// (a_1 + ... + a_k)/sqrt(k): the canonical balanced k-spike critical point of
// a semi-orthogonal A.
SphereVector balanced_combination(const Eigen::MatrixXd& A, int k);

// Uniform-on-the-sphere rejection sampler keeping points with
// lo <= ||A^T q||_inf^2 <= hi. Throws NumericalError if max_attempts draws
// cannot fill the request.
std::vector<SphereVector> sample_in_band(const Eigen::MatrixXd& A, double lo, double hi,
                                         int count, std::uint64_t seed,
                                         long max_attempts = 20000000L);

// Sample-vs-population gradient gap along the dominant column:
// <rgrad(sample) - rgrad(population), a_imax>. Diagnostic only.
double beta_diagnostic(const Eigen::MatrixXd& A, const Eigen::VectorXd& q, double theta,
                       const Objective& sample_obj);

struct LandscapeSample {
    double zeta_inf_sq = 0.0;
    Region region = Region::R2;
    double min_curvature = 0.0;   // smallest tangent eigenvalue, population
    double witness_value = 0.0;   // population witness curvature
    double witness_sample_value = 0.0;  // NaN unless data supplied
};

struct TaxonomyEntry {
    int k = 0;
    double alpha = 0.0;
    CriticalCase kase = CriticalCase::NearZero;
    double witness_value = 0.0;  // NaN for the single-spike row
    bool alpha_consistent = true;
};

struct LandscapeReport {
    double theta = 0.0;
    double c_star = 0.0;
    double C_star = 0.0;
    int total = 0;
    int count_r0 = 0;
    int count_r1 = 0;
    int count_r2 = 0;
    // Parameters outside the regime the theory certifies (theta condition
    // fails or C_star > 1/4); the report is still produced.
    bool outside_theory = false;
    std::vector<LandscapeSample> samples;
    // Quantiles of min_curvature over the R2-classified samples (NaN if none).
    double curv_q05 = 0.0;
    double curv_q50 = 0.0;
    double curv_q95 = 0.0;
    // Data-driven witness aggregated over the R2-classified samples; NaN
    // unless a data matrix was supplied (and at least one sample fell in R2).
    double sample_witness_q05 = std::numeric_limits<double>::quiet_NaN();
    double sample_witness_q50 = std::numeric_limits<double>::quiet_NaN();
    double sample_witness_q95 = std::numeric_limits<double>::quiet_NaN();
    double sample_witness_negative_fraction = std::numeric_limits<double>::quiet_NaN();
    std::vector<TaxonomyEntry> taxonomy;  // balanced combinations k = 1..min(r, 6)
};

// Uniformly samples the sphere, classifies each point, records curvature
// diagnostics, and evaluates the balanced-combination taxonomy. When `data`
// is supplied, the witness is additionally evaluated on the finite-sample
// objective built from it (theta, sigma).
LandscapeReport landscape_report(const Eigen::MatrixXd& A, double theta, int n_samples,
                                 std::uint64_t seed, double c_star, double C_star,
                                 const Eigen::MatrixXd* data = nullptr,
                                 double sigma = 1.0);

}  // namespace l4dec
