#include "l4dec/objective.hpp"

#include <cmath>

#include "l4dec/common.hpp"

namespace l4dec {

namespace {

void check_unit(const Eigen::VectorXd& q) {
    if (std::abs(q.norm() - 1.0) > 1e-12)
        throw InvalidArgument("objective evaluated off the sphere (|norm - 1| = " +
                              std::to_string(std::abs(q.norm() - 1.0)) + ")");
}

void check_dims(const Objective& obj, const Eigen::VectorXd& q) {
    if (q.size() != obj.data.rows())
        throw InvalidArgument("objective/vector dimension mismatch");
    check_unit(q);
}

// Population pieces at zeta = A^T q.
struct PopulationParts {
    Eigen::VectorXd zeta;
    double z44 = 0.0;  // ||zeta||_4^4
    double z22 = 0.0;  // ||zeta||_2^2
};

PopulationParts population_parts(const Objective& obj, const Eigen::VectorXd& q) {
    PopulationParts parts;
    parts.zeta = obj.data.transpose() * q;
    parts.z44 = parts.zeta.array().square().square().sum();
    parts.z22 = parts.zeta.squaredNorm();
    return parts;
}

// Euclidean population gradient -[(1-t) A z^3 + t ||z||^2 A z].
Eigen::VectorXd population_egrad(const Objective& obj, const PopulationParts& parts) {
    const double t = obj.theta;
    const Eigen::VectorXd z3 = parts.zeta.array().cube();
    return -(obj.data * ((1.0 - t) * z3 + (t * parts.z22) * parts.zeta));
}

}  // namespace

Objective Objective::sample_orth(Eigen::MatrixXd Y, double theta, double sigma) {
    SparsityModel{theta, sigma}.validate();
    return Objective{ObjectiveKind::SampleOrth, std::move(Y), theta, sigma,
                     kernels::Exec::Parallel};
}

Objective Objective::sample_general(Eigen::MatrixXd Ybar, double theta) {
    SparsityModel{theta, 1.0}.validate();
    return Objective{ObjectiveKind::SampleGeneral, std::move(Ybar), theta, 1.0,
                     kernels::Exec::Parallel};
}

Objective Objective::population_orth(Eigen::MatrixXd A, double theta) {
    SparsityModel{theta, 1.0}.validate();
    return Objective{ObjectiveKind::PopulationOrth, std::move(A), theta, 1.0,
                     kernels::Exec::Parallel};
}

Objective Objective::raw_l4(Eigen::MatrixXd Y) {
    return Objective{ObjectiveKind::RawL4, std::move(Y), 0.1, 1.0,
                     kernels::Exec::Parallel};
}

double Objective::sample_scale() const {
    const double n = static_cast<double>(data.cols());
    switch (kind) {
        case ObjectiveKind::SampleOrth:
            return 1.0 / (12.0 * theta * sigma * sigma * sigma * sigma * n);
        case ObjectiveKind::SampleGeneral:
            return theta * n / 12.0;
        case ObjectiveKind::RawL4:
            return 1.0;
        case ObjectiveKind::PopulationOrth:
            break;
    }
    throw InvalidArgument("sample_scale is undefined for the population objective");
}

double eval_value(const Objective& obj, const Eigen::VectorXd& q) {
    check_dims(obj, q);
    if (obj.is_population()) {
        const auto parts = population_parts(obj, q);
        return -0.25 * ((1.0 - obj.theta) * parts.z44 +
                        obj.theta * parts.z22 * parts.z22);
    }
    return -obj.sample_scale() * kernels::quartic_sum(obj.data, q, obj.exec);
}

GradEval grad_eval(const Objective& obj, const Eigen::VectorXd& q) {
    check_dims(obj, q);
    GradEval out;
    if (obj.is_population()) {
        const auto parts = population_parts(obj, q);
        out.c = parts.zeta;
        out.quartic = parts.z44;
        out.value = -0.25 * ((1.0 - obj.theta) * parts.z44 +
                             obj.theta * parts.z22 * parts.z22);
        const Eigen::VectorXd eg = population_egrad(obj, parts);
        out.rgrad = eg - q * q.dot(eg);
        return out;
    }
    const double c = obj.sample_scale();
    auto pass = kernels::quartic_grad(obj.data, q, obj.exec);
    out.quartic = pass.s4;
    out.value = -c * pass.s4;
    // Riemannian gradient -4c P (Y c^3); q^T (Y c^3) = s4.
    out.rgrad = (-4.0 * c) * (pass.g - pass.s4 * q);
    out.c = std::move(pass.c);
    return out;
}

Eigen::VectorXd eval_grad(const Objective& obj, const Eigen::VectorXd& q) {
    return grad_eval(obj, q).rgrad;
}

Eigen::MatrixXd eval_hess(const Objective& obj, const Eigen::VectorXd& q) {
    check_dims(obj, q);
    const Eigen::Index p = obj.data.rows();
    const Eigen::MatrixXd P =
        Eigen::MatrixXd::Identity(p, p) - q * q.transpose();
    Eigen::MatrixXd H;
    if (obj.is_population()) {
        const auto parts = population_parts(obj, q);
        const double t = obj.theta;
        const Eigen::VectorXd Az = obj.data * parts.zeta;
        const Eigen::VectorXd z2 = parts.zeta.array().square();
        // -3(1-t) A diag(z^2) A^T - t ||z||^2 AA^T - 2t (Az)(Az)^T, sandwiched,
        // plus [(1-t)||z||_4^4 + t ||z||_2^4] P.
        Eigen::MatrixXd M =
            (-3.0 * (1.0 - t)) * (obj.data * z2.asDiagonal() * obj.data.transpose());
        M.noalias() -= (t * parts.z22) * (obj.data * obj.data.transpose());
        M.noalias() -= 2.0 * t * (Az * Az.transpose());
        H = P * M * P +
            ((1.0 - t) * parts.z44 + t * parts.z22 * parts.z22) * P;
    } else {
        const double c = obj.sample_scale();
        const Eigen::VectorXd cv = obj.data.transpose() * q;
        const double s4 = cv.array().square().square().sum();
        const Eigen::VectorXd w = cv.array().square();
        const Eigen::MatrixXd G = kernels::weighted_gram(obj.data, w, obj.exec);
        H = (-12.0 * c) * (P * G * P) + (4.0 * c * s4) * P;
    }
    // Exact symmetry for downstream eigensolvers.
    return 0.5 * (H + H.transpose());
}

TangentEval eval_all(const Objective& obj, const Eigen::VectorXd& q) {
    TangentEval out;
    auto ge = grad_eval(obj, q);
    out.value = ge.value;
    out.grad = std::move(ge.rgrad);
    out.hess = eval_hess(obj, q);
    out.base = q;
    return out;
}

Eigen::VectorXd eval_hess_vec(const Objective& obj, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& v) {
    return hess_operator(obj, q).apply(v);
}

Eigen::VectorXd zeta(const MixingMatrix& A, const Eigen::VectorXd& q) {
    return A.entries.transpose() * q;
}

Eigen::VectorXd zeta(const Eigen::MatrixXd& A, const Eigen::VectorXd& q) {
    return A.transpose() * q;
}

LineProbe::LineProbe(const Objective& obj, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& d, const Eigen::VectorXd& c_cached)
    : obj_(obj), qd_(q.dot(d)), dd_(d.squaredNorm()) {
    c0_ = c_cached.size() > 0 ? c_cached : Eigen::VectorXd(obj.data.transpose() * q);
    cd_ = obj.data.transpose() * d;
}

double LineProbe::value(double alpha) const {
    // ||q + alpha d||^2 = 1 + 2 alpha q.d + alpha^2 d.d for unit q.
    const double norm2 = 1.0 + 2.0 * alpha * qd_ + alpha * alpha * dd_;
    const double inv_norm = 1.0 / std::sqrt(norm2);
    if (obj_.is_population()) {
        const Eigen::ArrayXd z = inv_norm * (c0_.array() + alpha * cd_.array());
        const double z44 = z.square().square().sum();
        const double z22 = z.square().sum();
        return -0.25 * ((1.0 - obj_.theta) * z44 + obj_.theta * z22 * z22);
    }
    return -obj_.sample_scale() *
           kernels::shifted_quartic_sum(c0_, cd_, alpha, inv_norm, obj_.exec);
}

HessOperator::HessOperator(const Objective& obj, Eigen::VectorXd q, Eigen::VectorXd c)
    : obj_(obj), q_(std::move(q)), c_(std::move(c)) {
    if (!obj_.is_population()) quartic_ = c_.array().square().square().sum();
}

Eigen::VectorXd HessOperator::apply(const Eigen::VectorXd& v) const {
    const Eigen::VectorXd u = v - q_ * q_.dot(v);
    Eigen::VectorXd out;
    if (obj_.is_population()) {
        const double t = obj_.theta;
        const double z22 = c_.squaredNorm();
        const double z44 = c_.array().square().square().sum();
        const Eigen::VectorXd w = obj_.data.transpose() * u;
        const Eigen::VectorXd Az = obj_.data * c_;
        Eigen::VectorXd m = (-3.0 * (1.0 - t)) *
                            (obj_.data * (c_.array().square() * w.array()).matrix());
        m.noalias() -= (t * z22) * (obj_.data * w);
        m.noalias() -= (2.0 * t * Az.dot(u)) * Az;
        out = m + ((1.0 - t) * z44 + t * z22 * z22) * u;
    } else {
        const double c = obj_.sample_scale();
        const Eigen::VectorXd hv = kernels::quartic_hessvec(obj_.data, c_, u, obj_.exec);
        out = (-4.0 * c) * hv + (4.0 * c * quartic_) * u;
    }
    return out - q_ * q_.dot(out);
}

Eigen::MatrixXd HessOperator::dense() const {
    return eval_hess(obj_, q_);
}

HessOperator hess_operator(const Objective& obj, const Eigen::VectorXd& q) {
    check_dims(obj, q);
    return HessOperator(obj, q, obj.data.transpose() * q);
}

HessOperator hess_operator(const Objective& obj, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& c_cached) {
    check_dims(obj, q);
    return HessOperator(obj, q, c_cached);
}

}  // namespace l4dec
