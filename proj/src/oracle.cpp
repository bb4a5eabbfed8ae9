#include "adjrk/oracle.hpp"

#include <cmath>

#include "adjrk/errors.hpp"
#include "adjrk/sensitivity.hpp"

namespace adjrk {

namespace {

Eigen::VectorXd final_state(const Problem& problem, const MethodTableau& method,
                            const Eigen::VectorXd& theta, double h, int steps,
                            const SolverConfig& cfg) {
  if (std::holds_alternative<PartitionedTableau>(method)) {
    const auto& t = std::get<PartitionedTableau>(method);
    const auto& sys = problem.partitioned_system();
    const auto traj =
        integrate_prk(sys, t, theta.head(sys.dim1), theta.tail(sys.dim2), h, steps, cfg);
    return traj.state(traj.steps());
  }
  const auto& t = std::get<ButcherTableau>(method);
  const auto sys = problem.plain_system();
  return integrate_rk(sys, t, theta, h, steps, cfg).states.back();
}

}  // namespace

GradientComparison compare_gradients(std::string reference_name,
                                     const Eigen::VectorXd& reference,
                                     const Eigen::VectorXd& candidate) {
  if (reference.size() != candidate.size()) {
    throw DimensionMismatchError("gradient comparison: dimension mismatch");
  }
  GradientComparison cmp;
  cmp.reference_name = std::move(reference_name);
  cmp.reference = reference;
  cmp.candidate = candidate;
  cmp.coordinate_abs_err = (reference - candidate).cwiseAbs();
  cmp.abs_err = cmp.coordinate_abs_err.maxCoeff();
  cmp.rel_err = cmp.abs_err / std::max(reference.cwiseAbs().maxCoeff(), 1e-300);
  return cmp;
}

Eigen::VectorXd fd_gradient(const Problem& problem, const MethodTableau& method,
                            const Eigen::VectorXd& theta, double h, int steps, double eps,
                            FdScheme scheme, const SolverConfig& cfg) {
  if (!(eps > 0.0)) throw ConfigError("finite-difference step eps must be positive");
  const Eigen::Index d = theta.size();
  Eigen::VectorXd grad(d);

  const auto cost_at = [&](const Eigen::VectorXd& th) {
    return problem.cost.value(final_state(problem, method, th, h, steps, cfg));
  };

  if (scheme == FdScheme::Forward) {
    const double base = cost_at(theta);
    for (Eigen::Index i = 0; i < d; ++i) {
      Eigen::VectorXd th = theta;
      th(i) += eps;
      grad(i) = (cost_at(th) - base) / eps;
    }
  } else {
    for (Eigen::Index i = 0; i < d; ++i) {
      Eigen::VectorXd plus = theta;
      Eigen::VectorXd minus = theta;
      plus(i) += eps;
      minus(i) -= eps;
      grad(i) = (cost_at(plus) - cost_at(minus)) / (2.0 * eps);
    }
  }
  return grad;
}

Eigen::VectorXd forward_sensitivity_gradient(const Problem& problem,
                                             const MethodTableau& method,
                                             const Eigen::VectorXd& theta, double h,
                                             int steps, const SolverConfig& cfg) {
  const Eigen::Index d = theta.size();
  Eigen::MatrixXd tangent(d, d);  // columns of d x_N / d theta

  if (std::holds_alternative<PartitionedTableau>(method)) {
    const auto& t = std::get<PartitionedTableau>(method);
    const auto& sys = problem.partitioned_system();
    const auto traj =
        integrate_prk(sys, t, theta.head(sys.dim1), theta.tail(sys.dim2), h, steps, cfg);
    for (Eigen::Index i = 0; i < d; ++i) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(d, i);
      tangent.col(i) = variational_prk(sys, t, traj, e, cfg).back();
    }
    const Eigen::VectorXd gC = problem.cost.gradient(traj.state(traj.steps()));
    return tangent.transpose() * gC;
  }

  const auto& t = std::get<ButcherTableau>(method);
  const auto sys = problem.plain_system();
  const auto traj = integrate_rk(sys, t, theta, h, steps, cfg);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(d, i);
    tangent.col(i) = variational_rk(sys, t, traj, e, cfg).back();
  }
  const Eigen::VectorXd gC = problem.cost.gradient(traj.states.back());
  return tangent.transpose() * gC;
}

Eigen::MatrixXd rk_stability_matrix(const ButcherTableau& t, const Eigen::MatrixXd& L,
                                    double h) {
  if (L.rows() != L.cols()) throw DimensionMismatchError("stability matrix: L must be square");
  const int s = t.stages();
  const Eigen::Index d = L.rows();
  const Eigen::Index dim = static_cast<Eigen::Index>(s) * d;

  // Stage system for f = Lx: X_i = x + h sum_j a_ij L X_j; one dense solve
  // applied to each basis vector.
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(dim, dim);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      if (t.a(i, j) != 0.0) M.block(i * d, j * d, d, d) -= h * t.a(i, j) * L;
    }
  }
  const auto lu = M.partialPivLu();

  Eigen::MatrixXd R(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const Eigen::VectorXd x = Eigen::VectorXd::Unit(d, c);
    Eigen::VectorXd rhs(dim);
    for (int i = 0; i < s; ++i) rhs.segment(i * d, d) = x;
    const Eigen::VectorXd stages = lu.solve(rhs);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < s; ++i) acc += t.b(i) * (L * stages.segment(i * d, d));
    R.col(c) = x + h * acc;
  }
  return R;
}

Eigen::VectorXd linear_exact_gradient(const Eigen::MatrixXd& L, const ButcherTableau& t,
                                      const CostFunction& cost, const Eigen::VectorXd& theta,
                                      double h, int steps) {
  if (theta.size() != L.rows()) {
    throw DimensionMismatchError("linear_exact_gradient: theta dimension mismatch with L");
  }
  if (steps < 0) throw ConfigError("step count must be >= 0");
  const Eigen::Index d = L.rows();
  const Eigen::MatrixXd R = rk_stability_matrix(t, L, h);
  Eigen::MatrixXd Rn = Eigen::MatrixXd::Identity(d, d);
  for (int n = 0; n < steps; ++n) Rn = R * Rn;
  const Eigen::VectorXd xN = Rn * theta;
  return Rn.transpose() * cost.gradient(xN);
}

}  // namespace adjrk
