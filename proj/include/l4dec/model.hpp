#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "l4dec/common.hpp"

namespace l4dec {

struct ProblemDims {
    int p = 0;  // ambient rows
    int r = 0;  // rank
    int n = 0;  // samples

    // Standing assumption: r < min(p, n).
    void validate() const;
};

struct SparsityModel {
    double theta = 0.1;  // Bernoulli rate, in (0, 1]
    double sigma = 1.0;  // Gaussian std, > 0

    void validate() const;
};

enum class MatrixKind { SemiOrthogonal, FullColumnRank };

// Ground-truth mixing matrix A, operator norm 1; SemiOrthogonal additionally
// has A^T A = I_r. Invariants hold to 1e-10 for every generated instance.
struct MixingMatrix {
    Eigen::MatrixXd entries;  // p x r
    MatrixKind kind = MatrixKind::SemiOrthogonal;

    Eigen::Index p() const { return entries.rows(); }
    Eigen::Index r() const { return entries.cols(); }

    // Throws NumericalError if an invariant is violated beyond tolerance.
    void validate() const;
};

// Sparse coefficients X = B .* Z with B ~ Ber(theta), Z ~ N(0, sigma^2);
// entries are zero exactly off support.
struct SparseCoefficients {
    Eigen::MatrixXd entries;                                  // r x n
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> support;  // r x n

    void validate() const;
};

// Unit vector on the sphere; norm within 1e-12 of 1.
struct SphereVector {
    Eigen::VectorXd coords;

    static SphereVector normalized(const Eigen::VectorXd& v);
    static SphereVector checked(const Eigen::VectorXd& v);

    Eigen::Index size() const { return coords.size(); }
};

// Signed permutation P with P(perm[j], j) = signs[j]; applying it to A gives
// output column j = signs[j] * A.col(perm[j]).
struct SignedPermutation {
    std::vector<int> perm;
    std::vector<int> signs;  // each +1 or -1

    static SignedPermutation identity(int r);
    void validate() const;
    Eigen::MatrixXd to_matrix() const;
};

MixingMatrix generate_A(const ProblemDims& dims, MatrixKind kind, std::uint64_t seed);

SparseCoefficients generate_X(const ProblemDims& dims, const SparsityModel& sm,
                              std::uint64_t seed);

// Y = A * X.
Eigen::MatrixXd synthesize(const MixingMatrix& A, const SparseCoefficients& X);

MixingMatrix apply_signed_permutation(const MixingMatrix& A, const SignedPermutation& P);

// Group composition: applying first then second equals applying compose(first, second).
SignedPermutation compose(const SignedPermutation& first, const SignedPermutation& second);

}  // namespace l4dec
