#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "adjrk/ode.hpp"

namespace adjrk {

using ProblemParams = std::map<std::string, double>;

/// A fully wired initial-value problem: system, cost, default initial
/// condition and default horizon.
struct Problem {
  std::string name;
  std::variant<OdeSystem, PartitionedOdeSystem> system;
  CostFunction cost;
  Eigen::VectorXd theta0;
  double default_h = 0.05;
  int default_steps = 100;

  [[nodiscard]] bool partitioned() const {
    return std::holds_alternative<PartitionedOdeSystem>(system);
  }
  [[nodiscard]] Eigen::Index dim() const;
  /// The partitioned system; throws DimensionMismatchError for plain problems.
  [[nodiscard]] const PartitionedOdeSystem& partitioned_system() const;
  /// The system as a plain OdeSystem (stacked view for partitioned problems).
  [[nodiscard]] OdeSystem plain_system() const;
};

/// Names accepted by builtin_problem.
const std::vector<std::string>& problem_names();

/// Construct a catalog problem.
///
/// Problems and their parameters:
///  - "linear": dense f(x) = L x with L drawn from a seeded generator.
///    Params: d (default 6), seed (default 1), scale (default 0.8).
///  - "harmonic": harmonic oscillator q' = p, p' = -omega^2 q, separable.
///    Params: omega (default 1).
///  - "pendulum": H = p^2/2 - cos q + coupling * q * p; nonseparable unless
///    coupling = 0. Params: coupling (default 0.2).
///  - "kepler": planar two-body problem, separable, d = 4. Params: e
///    (eccentricity, default 0.6), mu (default 1), energy_cost (0/1, default
///    0; selects the squared-energy-error cost with param target_energy,
///    defaulting to the energy of the default initial condition).
///  - "heat-advection": periodic 1-D advection-diffusion semi-discretization,
///    upwind advection and centered diffusion, spatially partitioned into the
///    left and right index halves. Params: d (default 20), nu (default 0.01),
///    c (default 0.4).
/// All costs default to quadratic with target 0; replace Problem::cost to use
/// another target. Throws UnknownProblemError / InvalidParamError.
Problem builtin_problem(std::string_view name, const ProblemParams& params = {});

/// Plain linear problem from an explicit matrix (used for matrices loaded
/// from file).
Problem linear_problem(Eigen::MatrixXd L, Eigen::VectorXd theta0, Eigen::VectorXd target,
                       double default_h = 0.05, int default_steps = 100);

}  // namespace adjrk
