#pragma once

#include <Eigen/Dense>
#include <functional>

namespace adjrk {

/// Autonomous ODE dx/dt = f(x) with an analytic Jacobian.
struct OdeSystem {
  Eigen::Index dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

/// Partitioned system d/dt (x1, x2) = (f1(x1,x2), f2(x1,x2)) with the four
/// Jacobian blocks. `separable` is true iff f1 depends only on x2 and f2 only
/// on x1 (then jac11 and jac22 are identically zero).
struct PartitionedOdeSystem {
  Eigen::Index dim1 = 0;
  Eigen::Index dim2 = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> f1, f2;
  // jac11 = d f1 / d x1 (dim1 x dim1), jac12 = d f1 / d x2 (dim1 x dim2),
  // jac21 = d f2 / d x1 (dim2 x dim1), jac22 = d f2 / d x2 (dim2 x dim2).
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> jac11,
      jac12, jac21, jac22;
  bool separable = false;

  [[nodiscard]] Eigen::Index dim() const { return dim1 + dim2; }
};

/// Scalar cost of a final state, with analytic gradient.
struct CostFunction {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

/// View a partitioned system as the stacked plain system: f = (f1; f2) and
/// the Jacobian assembled from the four blocks.
OdeSystem as_plain(const PartitionedOdeSystem& p);

/// C(x) = 0.5 * ||x - target||^2, gradient x - target.
CostFunction quadratic_cost(Eigen::VectorXd target);

}  // namespace adjrk
