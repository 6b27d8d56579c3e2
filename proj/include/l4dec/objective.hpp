#pragma once

#include <Eigen/Core>

#include "l4dec/kernels.hpp"
#include "l4dec/model.hpp"

namespace l4dec {

// Objective families on the unit sphere, all written as minimization.
//   SampleOrth      -(12 theta sigma^4 n)^-1 ||Y^T q||_4^4
//   SampleGeneral   -(theta n / 12) ||Ybar^T q||_4^4
//   PopulationOrth  -1/4 [ (1-theta) ||A^T q||_4^4 + theta ||A^T q||_2^4 ]
//   RawL4           -||Y^T q||_4^4  (scale-free; same minimizers as the
//                   sample objectives on the same data)
enum class ObjectiveKind { SampleOrth, SampleGeneral, PopulationOrth, RawL4 };

struct Objective {
    ObjectiveKind kind = ObjectiveKind::RawL4;
    Eigen::MatrixXd data;  // Y, Ybar, or A depending on kind
    double theta = 0.1;
    double sigma = 1.0;
    kernels::Exec exec = kernels::Exec::Parallel;

    static Objective sample_orth(Eigen::MatrixXd Y, double theta, double sigma);
    static Objective sample_general(Eigen::MatrixXd Ybar, double theta);
    static Objective population_orth(Eigen::MatrixXd A, double theta);
    static Objective raw_l4(Eigen::MatrixXd Y);

    Eigen::Index dim() const { return data.rows(); }
    bool is_population() const { return kind == ObjectiveKind::PopulationOrth; }
    // Multiplier c with value = -c ||data^T q||_4^4 for the three sample-style
    // kinds; unused for PopulationOrth.
    double sample_scale() const;
};

// Value, Riemannian gradient, and dense tangent-restricted Hessian at q.
struct TangentEval {
    double value = 0.0;
    Eigen::VectorXd grad;       // tangent: <grad, base> = 0 up to roundoff
    Eigen::MatrixXd hess;       // P H P sandwich: hess * base = 0
    Eigen::VectorXd base;
};

double eval_value(const Objective& obj, const Eigen::VectorXd& q);
Eigen::VectorXd eval_grad(const Objective& obj, const Eigen::VectorXd& q);
Eigen::MatrixXd eval_hess(const Objective& obj, const Eigen::VectorXd& q);
TangentEval eval_all(const Objective& obj, const Eigen::VectorXd& q);

// Tangent Hessian applied to a vector (input projected first): O(pn) for the
// sample kinds, never materializes the p x p matrix.
Eigen::VectorXd eval_hess_vec(const Objective& obj, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& v);

// zeta = A^T q.
Eigen::VectorXd zeta(const MixingMatrix& A, const Eigen::VectorXd& q);
Eigen::VectorXd zeta(const Eigen::MatrixXd& A, const Eigen::VectorXd& q);

// Value + Riemannian gradient in one fused pass over the data, with the
// correlation vector c = data^T q exposed for reuse (Hessian products, line
// probes). The solver's per-iterate workhorse.
struct GradEval {
    double value = 0.0;
    Eigen::VectorXd rgrad;
    Eigen::VectorXd c;   // data^T q
    double quartic = 0.0;  // ||data^T q||_4^4
};
GradEval grad_eval(const Objective& obj, const Eigen::VectorXd& q);

// Objective value along alpha -> (q + alpha d)/||q + alpha d|| in O(data cols)
// per probe after one O(pn) setup; exact same arithmetic as eval_value up to
// the factored norm.
class LineProbe {
  public:
    LineProbe(const Objective& obj, const Eigen::VectorXd& q, const Eigen::VectorXd& d,
              const Eigen::VectorXd& c_cached);

    double value(double alpha) const;

  private:
    const Objective& obj_;
    Eigen::VectorXd c0_;  // data^T q
    Eigen::VectorXd cd_;  // data^T d
    double qd_ = 0.0;     // q . d
    double dd_ = 0.0;     // d . d
};

// Matrix-free tangent Hessian operator at a fixed base point.
class HessOperator {
  public:
    HessOperator(const Objective& obj, Eigen::VectorXd q, Eigen::VectorXd c);

    Eigen::Index dim() const { return q_.size(); }
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    Eigen::MatrixXd dense() const;
    const Eigen::VectorXd& base() const { return q_; }

  private:
    const Objective& obj_;
    Eigen::VectorXd q_;
    Eigen::VectorXd c_;       // data^T q
    double quartic_ = 0.0;    // ||data^T q||_4^4 (sample kinds)
};

HessOperator hess_operator(const Objective& obj, const Eigen::VectorXd& q);
HessOperator hess_operator(const Objective& obj, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& c_cached);

}  // namespace l4dec
