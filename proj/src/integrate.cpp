#include "adjrk/integrate.hpp"

#include <cmath>
#include <sstream>

#include "adjrk/errors.hpp"
#include "adjrk/log.hpp"

namespace adjrk {

namespace {

[[noreturn]] void throw_nonconvergence(long step, int iters, double residual) {
  std::ostringstream os;
  os << "stage iteration did not converge at step " << step << " after " << iters
     << " iterations (residual " << residual << ")";
  throw NonConvergenceError(os.str(), step, iters, residual);
}

double max_abs_diff(const std::vector<Eigen::VectorXd>& a,
                    const std::vector<Eigen::VectorXd>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, (a[i] - b[i]).cwiseAbs().maxCoeff());
  }
  return m;
}

struct StageSolveResult {
  std::vector<Eigen::VectorXd> stages;
  int iterations = 0;
  double residual = 0.0;
};

// Explicit forward substitution: stage i needs only k_j for j < i.
StageSolveResult rk_stages_explicit(const OdeSystem& sys, const ButcherTableau& t,
                                    const Eigen::VectorXd& xn, double h) {
  const int s = t.stages();
  StageSolveResult out;
  out.stages.resize(s);
  std::vector<Eigen::VectorXd> k(s);
  for (int i = 0; i < s; ++i) {
    Eigen::VectorXd x = xn;
    for (int j = 0; j < i; ++j) {
      if (t.a(i, j) != 0.0) x += h * t.a(i, j) * k[j];
    }
    out.stages[i] = x;
    k[i] = sys.f(x);
  }
  return out;
}

StageSolveResult rk_stages_fixed_point(const OdeSystem& sys, const ButcherTableau& t,
                                       const Eigen::VectorXd& xn, double h, long step,
                                       const SolverConfig& cfg) {
  const int s = t.stages();
  StageSolveResult out;
  out.stages.assign(s, xn);
  std::vector<Eigen::VectorXd> next(s);
  double inc = 0.0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    std::vector<Eigen::VectorXd> k(s);
    for (int j = 0; j < s; ++j) k[j] = sys.f(out.stages[j]);
    for (int i = 0; i < s; ++i) {
      Eigen::VectorXd x = xn;
      for (int j = 0; j < s; ++j) {
        if (t.a(i, j) != 0.0) x += h * t.a(i, j) * k[j];
      }
      next[i] = x;
    }
    inc = max_abs_diff(next, out.stages);
    out.stages.swap(next);
    out.iterations = it;
    if (inc <= cfg.tol) {
      out.residual = inc;
      return out;
    }
  }
  throw_nonconvergence(step, out.iterations, inc);
}

StageSolveResult rk_stages_newton(const OdeSystem& sys, const ButcherTableau& t,
                                  const Eigen::VectorXd& xn, double h, long step,
                                  const SolverConfig& cfg) {
  const int s = t.stages();
  const Eigen::Index d = sys.dim;
  const Eigen::Index n = static_cast<Eigen::Index>(s) * d;
  StageSolveResult out;
  out.stages.assign(s, xn);
  double inc = 0.0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    // F_i = X_i - xn - h sum_j a_ij f(X_j);  J = I - h a_ij (df/dx)(X_j)
    Eigen::VectorXd F(n);
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
    std::vector<Eigen::VectorXd> k(s);
    std::vector<Eigen::MatrixXd> jac(s);
    for (int j = 0; j < s; ++j) {
      k[j] = sys.f(out.stages[j]);
      jac[j] = sys.jacobian(out.stages[j]);
    }
    for (int i = 0; i < s; ++i) {
      Eigen::VectorXd r = out.stages[i] - xn;
      for (int j = 0; j < s; ++j) {
        if (t.a(i, j) != 0.0) {
          r -= h * t.a(i, j) * k[j];
          J.block(i * d, j * d, d, d) -= h * t.a(i, j) * jac[j];
        }
      }
      F.segment(i * d, d) = r;
    }
    const Eigen::VectorXd delta = J.partialPivLu().solve(F);
    for (int i = 0; i < s; ++i) out.stages[i] -= delta.segment(i * d, d);
    inc = delta.cwiseAbs().maxCoeff();
    out.iterations = it;
    if (inc <= cfg.tol) {
      out.residual = inc;
      return out;
    }
  }
  throw_nonconvergence(step, out.iterations, inc);
}

struct PrkStageSolveResult {
  std::vector<Eigen::VectorXd> stages1, stages2;
  int iterations = 0;
  double residual = 0.0;
};

PrkStageSolveResult prk_stages_explicit(const PartitionedOdeSystem& sys,
                                        const PartitionedTableau& t,
                                        const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                                        double h) {
  const int s = t.stages();
  PrkStageSolveResult out;
  out.stages1.resize(s);
  out.stages2.resize(s);
  std::vector<Eigen::VectorXd> k1(s), k2(s);
  for (int i = 0; i < s; ++i) {
    Eigen::VectorXd X1 = x1;
    Eigen::VectorXd X2 = x2;
    for (int j = 0; j < i; ++j) {
      if (t.first.a(i, j) != 0.0) X1 += h * t.first.a(i, j) * k1[j];
      if (t.second.a(i, j) != 0.0) X2 += h * t.second.a(i, j) * k2[j];
    }
    out.stages1[i] = X1;
    out.stages2[i] = X2;
    k1[i] = sys.f1(X1, X2);
    k2[i] = sys.f2(X1, X2);
  }
  return out;
}

PrkStageSolveResult prk_stages_fixed_point(const PartitionedOdeSystem& sys,
                                           const PartitionedTableau& t,
                                           const Eigen::VectorXd& x1,
                                           const Eigen::VectorXd& x2, double h, long step,
                                           const SolverConfig& cfg) {
  const int s = t.stages();
  PrkStageSolveResult out;
  out.stages1.assign(s, x1);
  out.stages2.assign(s, x2);
  std::vector<Eigen::VectorXd> n1(s), n2(s);
  double inc = 0.0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    std::vector<Eigen::VectorXd> k1(s), k2(s);
    for (int j = 0; j < s; ++j) {
      k1[j] = sys.f1(out.stages1[j], out.stages2[j]);
      k2[j] = sys.f2(out.stages1[j], out.stages2[j]);
    }
    for (int i = 0; i < s; ++i) {
      Eigen::VectorXd X1 = x1;
      Eigen::VectorXd X2 = x2;
      for (int j = 0; j < s; ++j) {
        if (t.first.a(i, j) != 0.0) X1 += h * t.first.a(i, j) * k1[j];
        if (t.second.a(i, j) != 0.0) X2 += h * t.second.a(i, j) * k2[j];
      }
      n1[i] = X1;
      n2[i] = X2;
    }
    inc = std::max(max_abs_diff(n1, out.stages1), max_abs_diff(n2, out.stages2));
    out.stages1.swap(n1);
    out.stages2.swap(n2);
    out.iterations = it;
    if (inc <= cfg.tol) {
      out.residual = inc;
      return out;
    }
  }
  throw_nonconvergence(step, out.iterations, inc);
}

PrkStageSolveResult prk_stages_newton(const PartitionedOdeSystem& sys,
                                      const PartitionedTableau& t, const Eigen::VectorXd& x1,
                                      const Eigen::VectorXd& x2, double h, long step,
                                      const SolverConfig& cfg) {
  const int s = t.stages();
  const Eigen::Index d1 = sys.dim1;
  const Eigen::Index d2 = sys.dim2;
  const Eigen::Index n = static_cast<Eigen::Index>(s) * (d1 + d2);
  const auto off1 = [d1](int i) { return static_cast<Eigen::Index>(i) * d1; };
  const auto off2 = [s, d1, d2](int i) {
    return static_cast<Eigen::Index>(s) * d1 + static_cast<Eigen::Index>(i) * d2;
  };

  PrkStageSolveResult out;
  out.stages1.assign(s, x1);
  out.stages2.assign(s, x2);
  double inc = 0.0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    Eigen::VectorXd F(n);
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
    std::vector<Eigen::VectorXd> k1(s), k2(s);
    std::vector<Eigen::MatrixXd> j11(s), j12(s), j21(s), j22(s);
    for (int j = 0; j < s; ++j) {
      k1[j] = sys.f1(out.stages1[j], out.stages2[j]);
      k2[j] = sys.f2(out.stages1[j], out.stages2[j]);
      j11[j] = sys.jac11(out.stages1[j], out.stages2[j]);
      j12[j] = sys.jac12(out.stages1[j], out.stages2[j]);
      j21[j] = sys.jac21(out.stages1[j], out.stages2[j]);
      j22[j] = sys.jac22(out.stages1[j], out.stages2[j]);
    }
    for (int i = 0; i < s; ++i) {
      Eigen::VectorXd r1 = out.stages1[i] - x1;
      Eigen::VectorXd r2 = out.stages2[i] - x2;
      for (int j = 0; j < s; ++j) {
        const double a1 = t.first.a(i, j);
        const double a2 = t.second.a(i, j);
        if (a1 != 0.0) {
          r1 -= h * a1 * k1[j];
          J.block(off1(i), off1(j), d1, d1) -= h * a1 * j11[j];
          J.block(off1(i), off2(j), d1, d2) -= h * a1 * j12[j];
        }
        if (a2 != 0.0) {
          r2 -= h * a2 * k2[j];
          J.block(off2(i), off1(j), d2, d1) -= h * a2 * j21[j];
          J.block(off2(i), off2(j), d2, d2) -= h * a2 * j22[j];
        }
      }
      F.segment(off1(i), d1) = r1;
      F.segment(off2(i), d2) = r2;
    }
    const Eigen::VectorXd delta = J.partialPivLu().solve(F);
    for (int i = 0; i < s; ++i) {
      out.stages1[i] -= delta.segment(off1(i), d1);
      out.stages2[i] -= delta.segment(off2(i), d2);
    }
    inc = delta.cwiseAbs().maxCoeff();
    out.iterations = it;
    if (inc <= cfg.tol) {
      out.residual = inc;
      return out;
    }
  }
  throw_nonconvergence(step, out.iterations, inc);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (max_iters < 1) throw ConfigError("solver max_iters must be >= 1");
}

Eigen::VectorXd PartitionedTrajectory::state(int n) const {
  Eigen::VectorXd x(states1[n].size() + states2[n].size());
  x << states1[n], states2[n];
  return x;
}

Eigen::VectorXd advance_from_stages(const OdeSystem& sys, const ButcherTableau& t,
                                    const Eigen::VectorXd& xn,
                                    const std::vector<Eigen::VectorXd>& stage_states,
                                    double h) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(xn.size());
  for (int i = 0; i < t.stages(); ++i) {
    acc += t.b(i) * sys.f(stage_states[i]);
  }
  return xn + h * acc;
}

Trajectory integrate_rk(const OdeSystem& sys, const ButcherTableau& t,
                        const Eigen::VectorXd& theta, double h, int steps,
                        const SolverConfig& cfg) {
  cfg.validate();
  if (!(h > 0.0)) throw ConfigError("step size h must be positive");
  if (steps < 1) throw ConfigError("step count must be >= 1");
  if (theta.size() != sys.dim) {
    throw DimensionMismatchError("initial condition dimension does not match the system");
  }

  const bool expl = t.strictly_lower_triangular();
  Trajectory traj{h, t, {}, {}, 0, 0, 0.0};
  traj.states.reserve(steps + 1);
  traj.stages.reserve(steps);
  traj.states.push_back(theta);

  for (int n = 0; n < steps; ++n) {
    const Eigen::VectorXd& xn = traj.states.back();
    StageSolveResult sol;
    if (expl) {
      sol = rk_stages_explicit(sys, t, xn, h);
    } else if (cfg.mode == SolverConfig::Mode::Newton) {
      sol = rk_stages_newton(sys, t, xn, h, n, cfg);
    } else {
      sol = rk_stages_fixed_point(sys, t, xn, h, n, cfg);
    }
    traj.total_solver_iterations += sol.iterations;
    traj.max_solver_iterations = std::max(traj.max_solver_iterations, sol.iterations);
    traj.max_stage_residual = std::max(traj.max_stage_residual, sol.residual);
    traj.states.push_back(advance_from_stages(sys, t, xn, sol.stages, h));
    traj.stages.push_back(std::move(sol.stages));
  }
  log::debug("integrate_rk: ", steps, " steps, ", traj.total_solver_iterations,
             " solver iterations");
  return traj;
}

PartitionedTrajectory integrate_prk(const PartitionedOdeSystem& sys,
                                    const PartitionedTableau& t,
                                    const Eigen::VectorXd& theta1,
                                    const Eigen::VectorXd& theta2, double h, int steps,
                                    const SolverConfig& cfg) {
  cfg.validate();
  if (!(h > 0.0)) throw ConfigError("step size h must be positive");
  if (steps < 1) throw ConfigError("step count must be >= 1");
  if (theta1.size() != sys.dim1 || theta2.size() != sys.dim2) {
    throw DimensionMismatchError("initial condition dimensions do not match the partitions");
  }

  const bool expl =
      t.first.strictly_lower_triangular() && t.second.strictly_lower_triangular();
  PartitionedTrajectory traj{h, t, {}, {}, {}, {}, 0, 0, 0.0};
  traj.states1.push_back(theta1);
  traj.states2.push_back(theta2);

  for (int n = 0; n < steps; ++n) {
    const Eigen::VectorXd& x1 = traj.states1.back();
    const Eigen::VectorXd& x2 = traj.states2.back();
    PrkStageSolveResult sol;
    if (expl) {
      sol = prk_stages_explicit(sys, t, x1, x2, h);
    } else if (cfg.mode == SolverConfig::Mode::Newton) {
      sol = prk_stages_newton(sys, t, x1, x2, h, n, cfg);
    } else {
      sol = prk_stages_fixed_point(sys, t, x1, x2, h, n, cfg);
    }
    traj.total_solver_iterations += sol.iterations;
    traj.max_solver_iterations = std::max(traj.max_solver_iterations, sol.iterations);
    traj.max_stage_residual = std::max(traj.max_stage_residual, sol.residual);

    Eigen::VectorXd acc1 = Eigen::VectorXd::Zero(sys.dim1);
    Eigen::VectorXd acc2 = Eigen::VectorXd::Zero(sys.dim2);
    for (int i = 0; i < t.stages(); ++i) {
      acc1 += t.first.b(i) * sys.f1(sol.stages1[i], sol.stages2[i]);
      acc2 += t.second.b(i) * sys.f2(sol.stages1[i], sol.stages2[i]);
    }
    traj.states1.push_back(x1 + h * acc1);
    traj.states2.push_back(x2 + h * acc2);
    traj.stages1.push_back(std::move(sol.stages1));
    traj.stages2.push_back(std::move(sol.stages2));
  }
  log::debug("integrate_prk: ", steps, " steps, ", traj.total_solver_iterations,
             " solver iterations");
  return traj;
}

}  // namespace adjrk
