#include "l4dec/model.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "l4dec/rng.hpp"

namespace l4dec {

namespace {

// Column-major fill with one stream: entry (i, j) consumes draws in j-major
// order. Keeping the order pinned is part of the reproducibility contract.
Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

}  // namespace

void ProblemDims::validate() const {
    if (p <= 0 || r <= 0 || n <= 0)
        throw InvalidArgument("dims must be positive, got p=" + std::to_string(p) +
                              " r=" + std::to_string(r) + " n=" + std::to_string(n));
    if (r >= p || r >= n)
        throw InvalidArgument("need r < min(p, n), got p=" + std::to_string(p) +
                              " r=" + std::to_string(r) + " n=" + std::to_string(n));
}

void SparsityModel::validate() const {
    if (!(theta > 0.0) || !(theta <= 1.0))
        throw InvalidArgument("theta must be in (0, 1], got " + std::to_string(theta));
    if (!(sigma > 0.0))
        throw InvalidArgument("sigma must be positive, got " + std::to_string(sigma));
}

void MixingMatrix::validate() const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(entries);
    const auto& sv = svd.singularValues();
    if (std::abs(sv(0) - 1.0) > 1e-10)
        throw NumericalError("mixing matrix operator norm " + std::to_string(sv(0)) +
                             " deviates from 1 beyond 1e-10");
    if (sv(sv.size() - 1) <= 0.0)
        throw NumericalError("mixing matrix is rank deficient");
    if (kind == MatrixKind::SemiOrthogonal) {
        const double dev =
            (entries.transpose() * entries - Eigen::MatrixXd::Identity(r(), r()))
                .cwiseAbs()
                .maxCoeff();
        if (dev > 1e-10)
            throw NumericalError("semi-orthogonality violated by " + std::to_string(dev));
    }
}

void SparseCoefficients::validate() const {
    if (entries.rows() != support.rows() || entries.cols() != support.cols())
        throw InvalidArgument("coefficient/support shape mismatch");
    for (Eigen::Index j = 0; j < entries.cols(); ++j)
        for (Eigen::Index i = 0; i < entries.rows(); ++i)
            if (!support(i, j) && entries(i, j) != 0.0)
                throw NumericalError("nonzero entry off support at (" + std::to_string(i) +
                                     ", " + std::to_string(j) + ")");
}

SphereVector SphereVector::normalized(const Eigen::VectorXd& v) {
    const double norm = v.norm();
    if (norm == 0.0) throw InvalidArgument("cannot normalize the zero vector");
    return SphereVector{v / norm};
}

SphereVector SphereVector::checked(const Eigen::VectorXd& v) {
    if (std::abs(v.norm() - 1.0) > 1e-12)
        throw InvalidArgument("vector is not unit norm (|norm - 1| = " +
                              std::to_string(std::abs(v.norm() - 1.0)) + ")");
    return SphereVector{v};
}

SignedPermutation SignedPermutation::identity(int r) {
    SignedPermutation sp;
    sp.perm.resize(r);
    sp.signs.assign(r, 1);
    for (int j = 0; j < r; ++j) sp.perm[j] = j;
    return sp;
}

void SignedPermutation::validate() const {
    const int r = static_cast<int>(perm.size());
    if (signs.size() != perm.size())
        throw InvalidArgument("signed permutation perm/signs length mismatch");
    std::vector<bool> seen(r, false);
    for (int j = 0; j < r; ++j) {
        if (perm[j] < 0 || perm[j] >= r || seen[perm[j]])
            throw InvalidArgument("perm is not a permutation of [r]");
        seen[perm[j]] = true;
        if (signs[j] != 1 && signs[j] != -1)
            throw InvalidArgument("signs must be +1 or -1");
    }
}

Eigen::MatrixXd SignedPermutation::to_matrix() const {
    const int r = static_cast<int>(perm.size());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(r, r);
    for (int j = 0; j < r; ++j) P(perm[j], j) = signs[j];
    return P;
}

MixingMatrix generate_A(const ProblemDims& dims, MatrixKind kind, std::uint64_t seed) {
    dims.validate();
    Rng rng(mix_seed(seed, 0x41));
    Eigen::MatrixXd G = gaussian_matrix(dims.p, dims.r, rng);
    MixingMatrix A;
    A.kind = kind;
    if (kind == MatrixKind::SemiOrthogonal) {
        // Left singular vectors of the Gaussian draw; operator norm is 1 by
        // construction. Sign convention: largest-magnitude entry per column
        // positive, so the factor is unique (SVD signs are arbitrary).
        Eigen::BDCSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU);
        Eigen::MatrixXd U = svd.matrixU();
        for (Eigen::Index j = 0; j < U.cols(); ++j) {
            Eigen::Index imax = 0;
            U.col(j).cwiseAbs().maxCoeff(&imax);
            if (U(imax, j) < 0.0) U.col(j) = -U.col(j);
        }
        A.entries = U;
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
        A.entries = G / svd.singularValues()(0);
    }
    return A;
}

SparseCoefficients generate_X(const ProblemDims& dims, const SparsityModel& sm,
                              std::uint64_t seed) {
    dims.validate();
    sm.validate();
    Rng rng(mix_seed(seed, 0x58));
    SparseCoefficients X;
    X.entries = Eigen::MatrixXd::Zero(dims.r, dims.n);
    X.support.resize(dims.r, dims.n);
    // Per entry, column-major: one uniform decides the mask, then one normal
    // is drawn only when the entry is on. Draw order is part of the contract.
    for (int j = 0; j < dims.n; ++j) {
        for (int i = 0; i < dims.r; ++i) {
            const bool on = rng.bernoulli(sm.theta);
            X.support(i, j) = on;
            if (on) X.entries(i, j) = sm.sigma * rng.normal();
        }
    }
    return X;
}

Eigen::MatrixXd synthesize(const MixingMatrix& A, const SparseCoefficients& X) {
    if (A.entries.cols() != X.entries.rows())
        throw InvalidArgument("inner dimensions disagree: A is " + std::to_string(A.p()) +
                              "x" + std::to_string(A.r()) + ", X is " +
                              std::to_string(X.entries.rows()) + "x" +
                              std::to_string(X.entries.cols()));
    return A.entries * X.entries;
}

MixingMatrix apply_signed_permutation(const MixingMatrix& A, const SignedPermutation& P) {
    P.validate();
    if (static_cast<Eigen::Index>(P.perm.size()) != A.r())
        throw InvalidArgument("signed permutation size does not match column count");
    MixingMatrix out;
    out.kind = A.kind;
    out.entries.resize(A.p(), A.r());
    for (Eigen::Index j = 0; j < A.r(); ++j)
        out.entries.col(j) = P.signs[j] * A.entries.col(P.perm[j]);
    return out;
}

SignedPermutation compose(const SignedPermutation& first, const SignedPermutation& second) {
    first.validate();
    second.validate();
    if (first.perm.size() != second.perm.size())
        throw InvalidArgument("cannot compose signed permutations of different sizes");
    const int r = static_cast<int>(first.perm.size());
    // apply(apply(A, first), second).col(j)
    //   = second.signs[j] * apply(A, first).col(second.perm[j])
    //   = second.signs[j] * first.signs[second.perm[j]] * A.col(first.perm[second.perm[j]])
    SignedPermutation out;
    out.perm.resize(r);
    out.signs.resize(r);
    for (int j = 0; j < r; ++j) {
        out.perm[j] = first.perm[second.perm[j]];
        out.signs[j] = second.signs[j] * first.signs[second.perm[j]];
    }
    return out;
}

}  // namespace l4dec
