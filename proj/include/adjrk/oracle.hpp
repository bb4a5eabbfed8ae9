#pragma once

#include <string>

#include "adjrk/catalog.hpp"
#include "adjrk/integrate.hpp"
#include "adjrk/problems.hpp"

namespace adjrk {

/// Comparison of a candidate gradient against an independent reference.
struct GradientComparison {
  std::string reference_name;
  Eigen::VectorXd reference;
  Eigen::VectorXd candidate;
  Eigen::VectorXd coordinate_abs_err;
  double abs_err = 0.0;  // max-norm
  double rel_err = 0.0;  // abs_err / max(||reference||_max, 1e-300)
};

GradientComparison compare_gradients(std::string reference_name,
                                     const Eigen::VectorXd& reference,
                                     const Eigen::VectorXd& candidate);

enum class FdScheme { Forward, Central };

/// Finite-difference gradient of C(x_N(theta)): 1+d forward integrations for
/// the forward scheme, 2d for the central one.
Eigen::VectorXd fd_gradient(const Problem& problem, const MethodTableau& method,
                            const Eigen::VectorXd& theta, double h, int steps, double eps,
                            FdScheme scheme = FdScheme::Central,
                            const SolverConfig& cfg = {});

/// Exact discrete gradient via d variational basis sweeps: assembles
/// d x_N / d theta columnwise and applies the chain rule
/// (d x_N / d theta)^T grad C(x_N). This is the primary exactness oracle; it
/// shares only the forward integrator with the adjoint pipeline.
Eigen::VectorXd forward_sensitivity_gradient(const Problem& problem,
                                             const MethodTableau& method,
                                             const Eigen::VectorXd& theta, double h,
                                             int steps, const SolverConfig& cfg = {});

/// One-step map of an RK method on f(x) = L x: the stability matrix R(hL),
/// built by direct solution of the stage system for each basis vector.
Eigen::MatrixXd rk_stability_matrix(const ButcherTableau& t, const Eigen::MatrixXd& L,
                                    double h);

/// Closed-form gradient for the linear problem: (R(hL)^N)^T grad C(R(hL)^N
/// theta). Supports steps = 0 (identity map).
Eigen::VectorXd linear_exact_gradient(const Eigen::MatrixXd& L, const ButcherTableau& t,
                                      const CostFunction& cost, const Eigen::VectorXd& theta,
                                      double h, int steps);

}  // namespace adjrk
