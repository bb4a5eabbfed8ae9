#pragma once

#include <vector>

#include "adjrk/catalog.hpp"
#include "adjrk/integrate.hpp"
#include "adjrk/problems.hpp"
#include "adjrk/tableau.hpp"

namespace adjrk {

/// Result of a backward adjoint sweep: lambda_0 .. lambda_N in forward index
/// order (lambdas[N] is the supplied final condition). For partitioned runs
/// the vectors are stacked (lambda1; lambda2).
struct AdjointRun {
  std::vector<Eigen::VectorXd> lambdas;
  long total_solver_iterations = 0;
  int max_solver_iterations = 0;
};

/// Gradient of the cost of the numerical final state with respect to the
/// initial condition, with diagnostics.
struct GradientResult {
  Eigen::VectorXd gradient;  // lambda_0
  /// Max per-step change of the pairing lambda_n . delta_n along a diagnostic
  /// tangent sweep; zero (to round-off) for canonical pairs.
  double pairing_drift = 0.0;
  long forward_iterations = 0;
  long adjoint_iterations = 0;
  double forward_stage_residual = 0.0;
};

/// Discrete tangent sweep: propagates delta_0 through the variational
/// equations at the stored stage states, using the same tableau as the
/// forward pass. Returns delta_0 .. delta_N; delta_n is exactly
/// (d x_n / d theta) delta_0 up to the linear-solve tolerance.
/// Throws TableauMismatchError if traj was not produced with t.
std::vector<Eigen::VectorXd> variational_rk(const OdeSystem& sys, const ButcherTableau& t,
                                            const Trajectory& traj,
                                            const Eigen::VectorXd& delta0,
                                            const SolverConfig& cfg = {});

/// Partitioned tangent sweep; delta0 and the returned vectors are stacked.
std::vector<Eigen::VectorXd> variational_prk(const PartitionedOdeSystem& sys,
                                             const PartitionedTableau& t,
                                             const PartitionedTrajectory& traj,
                                             const Eigen::VectorXd& delta0,
                                             const SolverConfig& cfg = {});

/// Backward adjoint sweep with an explicit adjoint tableau (A, B):
///   Lambda_i = lambda_{n+1} + h sum_j (A_ij - B_j) l_j,
///   l_i = -J(X_{n,i})^T Lambda_i,
///   lambda_n = lambda_{n+1} - h sum_i B_i l_i.
/// The stage system is linear; it is solved by substitution when the modified
/// matrix A_ij - B_j is strictly upper triangular, by a dense factorization up
/// to cfg.direct_solve_max_dim, and by fixed-point iteration beyond that.
AdjointRun adjoint_rk(const OdeSystem& sys, const ButcherTableau& fwd,
                      const ButcherTableau& adj, const Trajectory& traj,
                      const Eigen::VectorXd& lambdaN, const SolverConfig& cfg = {});

/// Backward GPRK adjoint sweep (stacked final condition and results).
/// With separable_fast_path the slope families l11/l22 are skipped; this
/// requires sys.separable (else SeparabilityViolationError) and produces the
/// same result as the general path, since those slopes are identically zero.
AdjointRun adjoint_gprk(const PartitionedOdeSystem& sys, const PartitionedTableau& fwd,
                        const GprkTableau& adj, const PartitionedTrajectory& traj,
                        const Eigen::VectorXd& lambdaN, const SolverConfig& cfg = {},
                        bool separable_fast_path = false);

/// PRK adjoint: runs adjoint_gprk with the GPRK tableau obtained by using
/// adj.first for both partition-1 slope families and adj.second for both
/// partition-2 families (the reduction of Eq. B11=B12, B21=B22, ...).
AdjointRun adjoint_prk(const PartitionedOdeSystem& sys, const PartitionedTableau& fwd,
                       const PartitionedTableau& adj, const PartitionedTrajectory& traj,
                       const Eigen::VectorXd& lambdaN, const SolverConfig& cfg = {});

/// Max over n of |lambda_{n+1} . delta_{n+1} - lambda_n . delta_n| (stacked
/// vectors for partitioned runs, so the pairing sums both partitions).
double pairing_drift(const std::vector<Eigen::VectorXd>& deltas, const AdjointRun& run);

/// End-to-end exact gradient: integrate forward, evaluate the cost gradient
/// at the numerical final state, synthesize the canonical adjoint (RK or
/// GPRK) tableau, sweep backward, return lambda_0. Plain methods integrate
/// partitioned problems through their stacked view; partitioned methods
/// require a partitioned problem.
GradientResult exact_gradient(const Problem& problem, const MethodTableau& method,
                              const Eigen::VectorXd& theta, double h, int steps,
                              const SolverConfig& cfg = {});

/// Same pipeline with a caller-supplied adjoint tableau (canonical or not).
GradientResult gradient_with_adjoint(const Problem& problem, const ButcherTableau& fwd,
                                     const ButcherTableau& adj, const Eigen::VectorXd& theta,
                                     double h, int steps, const SolverConfig& cfg = {});
GradientResult gradient_with_adjoint(const Problem& problem, const PartitionedTableau& fwd,
                                     const GprkTableau& adj, const Eigen::VectorXd& theta,
                                     double h, int steps, const SolverConfig& cfg = {},
                                     bool separable_fast_path = false);

}  // namespace adjrk
