#pragma once

#include <vector>

#include "adjrk/ode.hpp"
#include "adjrk/tableau.hpp"

namespace adjrk {

/// How implicit stage systems are solved.
struct SolverConfig {
  enum class Mode { FixedPoint, Newton };
  Mode mode = Mode::FixedPoint;
  /// Absolute tolerance on stage increments, max-norm over all stages.
  double tol = 1e-13;
  int max_iters = 100;
  /// Linear stage systems (variational/adjoint sweeps) are solved by a direct
  /// dense factorization up to this stacked dimension, iteratively beyond it.
  Eigen::Index direct_solve_max_dim = 2000;

  void validate() const;
};

/// Forward RK trajectory: all step states and all stage states, retained for
/// the backward pass.
struct Trajectory {
  double h = 0.0;
  ButcherTableau tableau;
  std::vector<Eigen::VectorXd> states;              // x_0 .. x_N
  std::vector<std::vector<Eigen::VectorXd>> stages;  // stages[n][i] = X_{n,i}
  long total_solver_iterations = 0;
  int max_solver_iterations = 0;
  double max_stage_residual = 0.0;

  [[nodiscard]] int steps() const { return static_cast<int>(states.size()) - 1; }
};

/// Forward PRK trajectory; states and stages kept per partition.
struct PartitionedTrajectory {
  double h = 0.0;
  PartitionedTableau tableau;
  std::vector<Eigen::VectorXd> states1, states2;
  std::vector<std::vector<Eigen::VectorXd>> stages1, stages2;
  long total_solver_iterations = 0;
  int max_solver_iterations = 0;
  double max_stage_residual = 0.0;

  [[nodiscard]] int steps() const { return static_cast<int>(states1.size()) - 1; }
  /// Stacked state (x1; x2) at step n.
  [[nodiscard]] Eigen::VectorXd state(int n) const;
};

/// Integrate dx/dt = f(x) from theta over `steps` steps of size h.
/// Strictly lower triangular tableaus are evaluated by forward substitution
/// with no iteration; otherwise stages are solved per cfg (fixed point or
/// Newton) to the increment tolerance. Throws NonConvergenceError with the
/// failing step, and propagates DomainError from the system.
Trajectory integrate_rk(const OdeSystem& sys, const ButcherTableau& t,
                        const Eigen::VectorXd& theta, double h, int steps,
                        const SolverConfig& cfg = {});

/// Partitioned counterpart of integrate_rk.
PartitionedTrajectory integrate_prk(const PartitionedOdeSystem& sys,
                                    const PartitionedTableau& t,
                                    const Eigen::VectorXd& theta1,
                                    const Eigen::VectorXd& theta2, double h, int steps,
                                    const SolverConfig& cfg = {});

/// Re-evaluate the update formula x_{n+1} = x_n + h sum_i b_i f(X_{n,i}) from
/// stored stages, in the same summation order the integrator uses.
Eigen::VectorXd advance_from_stages(const OdeSystem& sys, const ButcherTableau& t,
                                    const Eigen::VectorXd& xn,
                                    const std::vector<Eigen::VectorXd>& stage_states,
                                    double h);

}  // namespace adjrk
