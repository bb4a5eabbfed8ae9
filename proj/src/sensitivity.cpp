#include "adjrk/sensitivity.hpp"

#include <cmath>
#include <sstream>

#include "adjrk/errors.hpp"
#include "adjrk/log.hpp"

namespace adjrk {

namespace {

void require_traj_tableau(const ButcherTableau& traj_t, const ButcherTableau& t) {
  if (!traj_t.same_coefficients(t)) {
    throw TableauMismatchError("trajectory was produced with a different tableau");
  }
}

void require_stages(int fwd, int adj, const char* what) {
  if (fwd != adj) {
    std::ostringstream os;
    os << what << ": forward tableau has " << fwd << " stages, adjoint has " << adj;
    throw TableauMismatchError(os.str());
  }
}

bool strictly_upper(const Eigen::MatrixXd& c) {
  for (int i = 0; i < c.rows(); ++i) {
    for (int j = 0; j <= i; ++j) {
      if (c(i, j) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<Eigen::VectorXd> variational_rk(const OdeSystem& sys, const ButcherTableau& t,
                                            const Trajectory& traj,
                                            const Eigen::VectorXd& delta0,
                                            const SolverConfig& cfg) {
  cfg.validate();
  require_traj_tableau(traj.tableau, t);
  if (delta0.size() != sys.dim) {
    throw DimensionMismatchError("delta0 dimension does not match the system");
  }
  const int s = t.stages();
  const Eigen::Index d = sys.dim;
  const double h = traj.h;
  const bool expl = t.strictly_lower_triangular();

  std::vector<Eigen::VectorXd> deltas;
  deltas.reserve(traj.steps() + 1);
  deltas.push_back(delta0);

  std::vector<Eigen::MatrixXd> jac(s);
  std::vector<Eigen::VectorXd> D(s), m(s);
  for (int n = 0; n < traj.steps(); ++n) {
    const Eigen::VectorXd& dn = deltas.back();
    for (int i = 0; i < s; ++i) jac[i] = sys.jacobian(traj.stages[n][i]);

    if (expl) {
      // forward substitution: D_i = dn + h sum_{j<i} a_ij m_j
      for (int i = 0; i < s; ++i) {
        Eigen::VectorXd Di = dn;
        for (int j = 0; j < i; ++j) {
          if (t.a(i, j) != 0.0) Di += h * t.a(i, j) * m[j];
        }
        D[i] = Di;
        m[i] = jac[i] * Di;
      }
    } else {
      const Eigen::Index dim = static_cast<Eigen::Index>(s) * d;
      if (dim <= cfg.direct_solve_max_dim) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(dim, dim);
        Eigen::VectorXd rhs(dim);
        for (int i = 0; i < s; ++i) {
          rhs.segment(i * d, d) = dn;
          for (int j = 0; j < s; ++j) {
            if (t.a(i, j) != 0.0) M.block(i * d, j * d, d, d) -= h * t.a(i, j) * jac[j];
          }
        }
        const Eigen::VectorXd sol = M.partialPivLu().solve(rhs);
        for (int i = 0; i < s; ++i) {
          D[i] = sol.segment(i * d, d);
          m[i] = jac[i] * D[i];
        }
      } else {
        // fixed-point on the linear system
        for (int i = 0; i < s; ++i) D[i] = dn;
        int it = 0;
        double inc = 0.0;
        std::vector<Eigen::VectorXd> next(s);
        for (it = 1; it <= cfg.max_iters; ++it) {
          for (int j = 0; j < s; ++j) m[j] = jac[j] * D[j];
          for (int i = 0; i < s; ++i) {
            Eigen::VectorXd Di = dn;
            for (int j = 0; j < s; ++j) {
              if (t.a(i, j) != 0.0) Di += h * t.a(i, j) * m[j];
            }
            next[i] = Di;
          }
          inc = 0.0;
          for (int i = 0; i < s; ++i) {
            inc = std::max(inc, (next[i] - D[i]).cwiseAbs().maxCoeff());
          }
          D.swap(next);
          if (inc <= cfg.tol) break;
        }
        if (inc > cfg.tol) {
          throw NonConvergenceError("variational stage iteration did not converge", n, it,
                                    inc);
        }
        for (int i = 0; i < s; ++i) m[i] = jac[i] * D[i];
      }
    }

    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < s; ++i) acc += t.b(i) * m[i];
    deltas.push_back(dn + h * acc);
  }
  return deltas;
}

std::vector<Eigen::VectorXd> variational_prk(const PartitionedOdeSystem& sys,
                                             const PartitionedTableau& t,
                                             const PartitionedTrajectory& traj,
                                             const Eigen::VectorXd& delta0,
                                             const SolverConfig& cfg) {
  cfg.validate();
  if (!traj.tableau.same_coefficients(t)) {
    throw TableauMismatchError("trajectory was produced with a different tableau");
  }
  const Eigen::Index d1 = sys.dim1;
  const Eigen::Index d2 = sys.dim2;
  if (delta0.size() != d1 + d2) {
    throw DimensionMismatchError("delta0 dimension does not match the system");
  }
  const int s = t.stages();
  const double h = traj.h;
  const bool expl =
      t.first.strictly_lower_triangular() && t.second.strictly_lower_triangular();

  std::vector<Eigen::VectorXd> deltas;
  deltas.reserve(traj.steps() + 1);
  deltas.push_back(delta0);

  std::vector<Eigen::MatrixXd> J11(s), J12(s), J21(s), J22(s);
  std::vector<Eigen::VectorXd> D1(s), D2(s), m1(s), m2(s);

  for (int n = 0; n < traj.steps(); ++n) {
    const Eigen::VectorXd dn1 = deltas.back().head(d1);
    const Eigen::VectorXd dn2 = deltas.back().tail(d2);
    for (int i = 0; i < s; ++i) {
      const Eigen::VectorXd& X1 = traj.stages1[n][i];
      const Eigen::VectorXd& X2 = traj.stages2[n][i];
      J11[i] = sys.jac11(X1, X2);
      J12[i] = sys.jac12(X1, X2);
      J21[i] = sys.jac21(X1, X2);
      J22[i] = sys.jac22(X1, X2);
    }

    if (expl) {
      for (int i = 0; i < s; ++i) {
        Eigen::VectorXd Di1 = dn1;
        Eigen::VectorXd Di2 = dn2;
        for (int j = 0; j < i; ++j) {
          if (t.first.a(i, j) != 0.0) Di1 += h * t.first.a(i, j) * m1[j];
          if (t.second.a(i, j) != 0.0) Di2 += h * t.second.a(i, j) * m2[j];
        }
        D1[i] = Di1;
        D2[i] = Di2;
        m1[i] = J11[i] * Di1 + J12[i] * Di2;
        m2[i] = J21[i] * Di1 + J22[i] * Di2;
      }
    } else {
      const Eigen::Index dim = static_cast<Eigen::Index>(s) * (d1 + d2);
      const auto off1 = [d1](int i) { return static_cast<Eigen::Index>(i) * d1; };
      const auto off2 = [s, d1, d2](int i) {
        return static_cast<Eigen::Index>(s) * d1 + static_cast<Eigen::Index>(i) * d2;
      };
      if (dim <= cfg.direct_solve_max_dim) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(dim, dim);
        Eigen::VectorXd rhs(dim);
        for (int i = 0; i < s; ++i) {
          rhs.segment(off1(i), d1) = dn1;
          rhs.segment(off2(i), d2) = dn2;
          for (int j = 0; j < s; ++j) {
            const double a1 = t.first.a(i, j);
            const double a2 = t.second.a(i, j);
            if (a1 != 0.0) {
              M.block(off1(i), off1(j), d1, d1) -= h * a1 * J11[j];
              M.block(off1(i), off2(j), d1, d2) -= h * a1 * J12[j];
            }
            if (a2 != 0.0) {
              M.block(off2(i), off1(j), d2, d1) -= h * a2 * J21[j];
              M.block(off2(i), off2(j), d2, d2) -= h * a2 * J22[j];
            }
          }
        }
        const Eigen::VectorXd sol = M.partialPivLu().solve(rhs);
        for (int i = 0; i < s; ++i) {
          D1[i] = sol.segment(off1(i), d1);
          D2[i] = sol.segment(off2(i), d2);
          m1[i] = J11[i] * D1[i] + J12[i] * D2[i];
          m2[i] = J21[i] * D1[i] + J22[i] * D2[i];
        }
      } else {
        for (int i = 0; i < s; ++i) {
          D1[i] = dn1;
          D2[i] = dn2;
        }
        std::vector<Eigen::VectorXd> n1(s), n2(s);
        double inc = 0.0;
        int it = 0;
        for (it = 1; it <= cfg.max_iters; ++it) {
          for (int j = 0; j < s; ++j) {
            m1[j] = J11[j] * D1[j] + J12[j] * D2[j];
            m2[j] = J21[j] * D1[j] + J22[j] * D2[j];
          }
          for (int i = 0; i < s; ++i) {
            Eigen::VectorXd Di1 = dn1;
            Eigen::VectorXd Di2 = dn2;
            for (int j = 0; j < s; ++j) {
              if (t.first.a(i, j) != 0.0) Di1 += h * t.first.a(i, j) * m1[j];
              if (t.second.a(i, j) != 0.0) Di2 += h * t.second.a(i, j) * m2[j];
            }
            n1[i] = Di1;
            n2[i] = Di2;
          }
          inc = 0.0;
          for (int i = 0; i < s; ++i) {
            inc = std::max(inc, (n1[i] - D1[i]).cwiseAbs().maxCoeff());
            inc = std::max(inc, (n2[i] - D2[i]).cwiseAbs().maxCoeff());
          }
          D1.swap(n1);
          D2.swap(n2);
          if (inc <= cfg.tol) break;
        }
        if (inc > cfg.tol) {
          throw NonConvergenceError("variational stage iteration did not converge", n, it,
                                    inc);
        }
        for (int i = 0; i < s; ++i) {
          m1[i] = J11[i] * D1[i] + J12[i] * D2[i];
          m2[i] = J21[i] * D1[i] + J22[i] * D2[i];
        }
      }
    }

    Eigen::VectorXd acc1 = Eigen::VectorXd::Zero(d1);
    Eigen::VectorXd acc2 = Eigen::VectorXd::Zero(d2);
    for (int i = 0; i < s; ++i) {
      acc1 += t.first.b(i) * m1[i];
      acc2 += t.second.b(i) * m2[i];
    }
    Eigen::VectorXd next(d1 + d2);
    next << dn1 + h * acc1, dn2 + h * acc2;
    deltas.push_back(std::move(next));
  }
  return deltas;
}

AdjointRun adjoint_rk(const OdeSystem& sys, const ButcherTableau& fwd,
                      const ButcherTableau& adj, const Trajectory& traj,
                      const Eigen::VectorXd& lambdaN, const SolverConfig& cfg) {
  cfg.validate();
  require_traj_tableau(traj.tableau, fwd);
  require_stages(fwd.stages(), adj.stages(), "adjoint_rk");
  if (lambdaN.size() != sys.dim) {
    throw DimensionMismatchError("lambdaN dimension does not match the system");
  }
  const int s = adj.stages();
  const Eigen::Index d = sys.dim;
  const double h = traj.h;
  const int N = traj.steps();

  // Modified stage matrix of the backward-written scheme:
  //   Lambda_i = lambda_{n+1} + h sum_j C_ij l_j, C_ij = A_ij - B_j.
  Eigen::MatrixXd C(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) C(i, j) = adj.a(i, j) - adj.b(j);
  }
  const bool upper = strictly_upper(C);

  AdjointRun run;
  run.lambdas.assign(N + 1, Eigen::VectorXd());
  run.lambdas[N] = lambdaN;

  std::vector<Eigen::MatrixXd> jacT(s);
  std::vector<Eigen::VectorXd> Lam(s), l(s);
  for (int n = N - 1; n >= 0; --n) {
    const Eigen::VectorXd& lnext = run.lambdas[n + 1];
    for (int i = 0; i < s; ++i) jacT[i] = sys.jacobian(traj.stages[n][i]).transpose();

    if (upper) {
      // backward substitution: stage s-1 first
      for (int i = s - 1; i >= 0; --i) {
        Eigen::VectorXd Li = lnext;
        for (int j = i + 1; j < s; ++j) {
          if (C(i, j) != 0.0) Li += h * C(i, j) * l[j];
        }
        Lam[i] = Li;
        l[i] = -(jacT[i] * Li);
      }
    } else {
      const Eigen::Index dim = static_cast<Eigen::Index>(s) * d;
      if (dim <= cfg.direct_solve_max_dim) {
        // (I + h C_ij J_j^T) Lambda = 1 (x) lambda_{n+1}
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(dim, dim);
        Eigen::VectorXd rhs(dim);
        for (int i = 0; i < s; ++i) {
          rhs.segment(i * d, d) = lnext;
          for (int j = 0; j < s; ++j) {
            if (C(i, j) != 0.0) M.block(i * d, j * d, d, d) += h * C(i, j) * jacT[j];
          }
        }
        const Eigen::VectorXd sol = M.partialPivLu().solve(rhs);
        for (int i = 0; i < s; ++i) {
          Lam[i] = sol.segment(i * d, d);
          l[i] = -(jacT[i] * Lam[i]);
        }
      } else {
        for (int i = 0; i < s; ++i) Lam[i] = lnext;
        std::vector<Eigen::VectorXd> next(s);
        double inc = 0.0;
        int it = 0;
        for (it = 1; it <= cfg.max_iters; ++it) {
          for (int j = 0; j < s; ++j) l[j] = -(jacT[j] * Lam[j]);
          for (int i = 0; i < s; ++i) {
            Eigen::VectorXd Li = lnext;
            for (int j = 0; j < s; ++j) {
              if (C(i, j) != 0.0) Li += h * C(i, j) * l[j];
            }
            next[i] = Li;
          }
          inc = 0.0;
          for (int i = 0; i < s; ++i) {
            inc = std::max(inc, (next[i] - Lam[i]).cwiseAbs().maxCoeff());
          }
          Lam.swap(next);
          if (inc <= cfg.tol) break;
        }
        if (inc > cfg.tol) {
          throw NonConvergenceError("adjoint stage iteration did not converge", n, it, inc);
        }
        run.total_solver_iterations += it;
        run.max_solver_iterations = std::max(run.max_solver_iterations, it);
        for (int i = 0; i < s; ++i) l[i] = -(jacT[i] * Lam[i]);
      }
    }

    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < s; ++i) acc += adj.b(i) * l[i];
    run.lambdas[n] = lnext - h * acc;
  }
  return run;
}

AdjointRun adjoint_gprk(const PartitionedOdeSystem& sys, const PartitionedTableau& fwd,
                        const GprkTableau& adj, const PartitionedTrajectory& traj,
                        const Eigen::VectorXd& lambdaN, const SolverConfig& cfg,
                        bool separable_fast_path) {
  cfg.validate();
  if (!traj.tableau.same_coefficients(fwd)) {
    throw TableauMismatchError("trajectory was produced with a different tableau");
  }
  require_stages(fwd.stages(), adj.stages(), "adjoint_gprk");
  const Eigen::Index d1 = sys.dim1;
  const Eigen::Index d2 = sys.dim2;
  if (lambdaN.size() != d1 + d2) {
    throw DimensionMismatchError("lambdaN dimension does not match the system");
  }
  if (separable_fast_path && !sys.separable) {
    throw SeparabilityViolationError(
        "separable fast path requested on a non-separable system");
  }
  const int s = adj.stages();
  const double h = traj.h;
  const int N = traj.steps();

  // Modified stage matrices of the backward-written scheme:
  //   Lambda^1_i = lambda^1_{n+1} + h sum_j [C11_ij l11_j + C12_ij l12_j]
  //   Lambda^2_i = lambda^2_{n+1} + h sum_j [C21_ij l21_j + C22_ij l22_j]
  // with C_pq(i,j) = B_pq(j) - A_pq(i,j) and slopes
  //   l11_j = J11_j^T Lambda^1_j,  l12_j = J21_j^T Lambda^2_j,
  //   l21_j = J12_j^T Lambda^1_j,  l22_j = J22_j^T Lambda^2_j.
  Eigen::MatrixXd C11(s, s), C12(s, s), C21(s, s), C22(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      C11(i, j) = adj.B11(j) - adj.A11(i, j);
      C12(i, j) = adj.B12(j) - adj.A12(i, j);
      C21(i, j) = adj.B21(j) - adj.A21(i, j);
      C22(i, j) = adj.B22(j) - adj.A22(i, j);
    }
  }
  const bool upper = strictly_upper(C11) && strictly_upper(C12) && strictly_upper(C21) &&
                     strictly_upper(C22);

  AdjointRun run;
  run.lambdas.assign(N + 1, Eigen::VectorXd());
  run.lambdas[N] = lambdaN;

  const Eigen::MatrixXd zero11t = Eigen::MatrixXd::Zero(d1, d1);
  const Eigen::MatrixXd zero22t = Eigen::MatrixXd::Zero(d2, d2);
  std::vector<Eigen::MatrixXd> J11t(s), J12t(s), J21t(s), J22t(s);
  std::vector<Eigen::VectorXd> L1(s), L2(s), l11(s), l12(s), l21(s), l22(s);

  for (int n = N - 1; n >= 0; --n) {
    const Eigen::VectorXd ln1 = run.lambdas[n + 1].head(d1);
    const Eigen::VectorXd ln2 = run.lambdas[n + 1].tail(d2);
    for (int i = 0; i < s; ++i) {
      const Eigen::VectorXd& X1 = traj.stages1[n][i];
      const Eigen::VectorXd& X2 = traj.stages2[n][i];
      // J11^T and J22^T are skipped on the fast path: for separable systems
      // jac11 and jac22 vanish identically, so l11 = l22 = 0.
      J11t[i] = separable_fast_path ? zero11t : Eigen::MatrixXd(sys.jac11(X1, X2).transpose());
      J22t[i] = separable_fast_path ? zero22t : Eigen::MatrixXd(sys.jac22(X1, X2).transpose());
      J12t[i] = sys.jac12(X1, X2).transpose();  // d2 x d1
      J21t[i] = sys.jac21(X1, X2).transpose();  // d1 x d2
    }

    const auto compute_slopes = [&](int i) {
      l11[i] = J11t[i] * L1[i];
      l12[i] = J21t[i] * L2[i];
      l21[i] = J12t[i] * L1[i];
      l22[i] = J22t[i] * L2[i];
    };

    if (upper) {
      for (int i = s - 1; i >= 0; --i) {
        Eigen::VectorXd Li1 = ln1;
        Eigen::VectorXd Li2 = ln2;
        for (int j = i + 1; j < s; ++j) {
          if (C11(i, j) != 0.0) Li1 += h * C11(i, j) * l11[j];
          if (C12(i, j) != 0.0) Li1 += h * C12(i, j) * l12[j];
          if (C21(i, j) != 0.0) Li2 += h * C21(i, j) * l21[j];
          if (C22(i, j) != 0.0) Li2 += h * C22(i, j) * l22[j];
        }
        L1[i] = Li1;
        L2[i] = Li2;
        compute_slopes(i);
      }
    } else {
      const Eigen::Index dim = static_cast<Eigen::Index>(s) * (d1 + d2);
      const auto off1 = [d1](int i) { return static_cast<Eigen::Index>(i) * d1; };
      const auto off2 = [s, d1, d2](int i) {
        return static_cast<Eigen::Index>(s) * d1 + static_cast<Eigen::Index>(i) * d2;
      };
      if (dim <= cfg.direct_solve_max_dim) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(dim, dim);
        Eigen::VectorXd rhs(dim);
        for (int i = 0; i < s; ++i) {
          rhs.segment(off1(i), d1) = ln1;
          rhs.segment(off2(i), d2) = ln2;
          for (int j = 0; j < s; ++j) {
            if (C11(i, j) != 0.0) M.block(off1(i), off1(j), d1, d1) -= h * C11(i, j) * J11t[j];
            if (C12(i, j) != 0.0) M.block(off1(i), off2(j), d1, d2) -= h * C12(i, j) * J21t[j];
            if (C21(i, j) != 0.0) M.block(off2(i), off1(j), d2, d1) -= h * C21(i, j) * J12t[j];
            if (C22(i, j) != 0.0) M.block(off2(i), off2(j), d2, d2) -= h * C22(i, j) * J22t[j];
          }
        }
        const Eigen::VectorXd sol = M.partialPivLu().solve(rhs);
        for (int i = 0; i < s; ++i) {
          L1[i] = sol.segment(off1(i), d1);
          L2[i] = sol.segment(off2(i), d2);
          compute_slopes(i);
        }
      } else {
        for (int i = 0; i < s; ++i) {
          L1[i] = ln1;
          L2[i] = ln2;
        }
        std::vector<Eigen::VectorXd> n1(s), n2(s);
        double inc = 0.0;
        int it = 0;
        for (it = 1; it <= cfg.max_iters; ++it) {
          for (int j = 0; j < s; ++j) compute_slopes(j);
          for (int i = 0; i < s; ++i) {
            Eigen::VectorXd Li1 = ln1;
            Eigen::VectorXd Li2 = ln2;
            for (int j = 0; j < s; ++j) {
              if (C11(i, j) != 0.0) Li1 += h * C11(i, j) * l11[j];
              if (C12(i, j) != 0.0) Li1 += h * C12(i, j) * l12[j];
              if (C21(i, j) != 0.0) Li2 += h * C21(i, j) * l21[j];
              if (C22(i, j) != 0.0) Li2 += h * C22(i, j) * l22[j];
            }
            n1[i] = Li1;
            n2[i] = Li2;
          }
          inc = 0.0;
          for (int i = 0; i < s; ++i) {
            inc = std::max(inc, (n1[i] - L1[i]).cwiseAbs().maxCoeff());
            inc = std::max(inc, (n2[i] - L2[i]).cwiseAbs().maxCoeff());
          }
          L1.swap(n1);
          L2.swap(n2);
          if (inc <= cfg.tol) break;
        }
        if (inc > cfg.tol) {
          throw NonConvergenceError("adjoint stage iteration did not converge", n, it, inc);
        }
        run.total_solver_iterations += it;
        run.max_solver_iterations = std::max(run.max_solver_iterations, it);
        for (int i = 0; i < s; ++i) compute_slopes(i);
      }
    }

    // lambda_n = lambda_{n+1} + h sum_i B weights applied to the slopes
    // (the forward-written scheme subtracts them from lambda_n).
    Eigen::VectorXd acc1 = Eigen::VectorXd::Zero(d1);
    Eigen::VectorXd acc2 = Eigen::VectorXd::Zero(d2);
    for (int i = 0; i < s; ++i) {
      if (!separable_fast_path) {
        acc1 += adj.B11(i) * l11[i];
        acc2 += adj.B22(i) * l22[i];
      }
      acc1 += adj.B12(i) * l12[i];
      acc2 += adj.B21(i) * l21[i];
    }
    Eigen::VectorXd ln(d1 + d2);
    ln << ln1 + h * acc1, ln2 + h * acc2;
    run.lambdas[n] = std::move(ln);
  }
  return run;
}

AdjointRun adjoint_prk(const PartitionedOdeSystem& sys, const PartitionedTableau& fwd,
                       const PartitionedTableau& adj, const PartitionedTrajectory& traj,
                       const Eigen::VectorXd& lambdaN, const SolverConfig& cfg) {
  GprkTableau g(adj.first.b, adj.second.b, adj.first.b, adj.second.b, adj.first.a,
                adj.first.a, adj.second.a, adj.second.a);
  return adjoint_gprk(sys, fwd, g, traj, lambdaN, cfg);
}

double pairing_drift(const std::vector<Eigen::VectorXd>& deltas, const AdjointRun& run) {
  if (deltas.size() != run.lambdas.size()) {
    throw LengthMismatchError("pairing_drift: trajectory lengths differ");
  }
  double drift = 0.0;
  for (std::size_t n = 0; n + 1 < deltas.size(); ++n) {
    const double p0 = run.lambdas[n].dot(deltas[n]);
    const double p1 = run.lambdas[n + 1].dot(deltas[n + 1]);
    drift = std::max(drift, std::abs(p1 - p0));
  }
  return drift;
}

namespace {

GradientResult finish_plain(const OdeSystem& sys, const ButcherTableau& fwd,
                            const ButcherTableau& adj, const CostFunction& cost,
                            const Trajectory& traj, const SolverConfig& cfg) {
  const Eigen::VectorXd lambdaN = cost.gradient(traj.states.back());
  AdjointRun run = adjoint_rk(sys, fwd, adj, traj, lambdaN, cfg);

  GradientResult result;
  result.gradient = run.lambdas.front();
  result.forward_iterations = traj.total_solver_iterations;
  result.adjoint_iterations = run.total_solver_iterations;
  result.forward_stage_residual = traj.max_stage_residual;

  const Eigen::VectorXd delta0 =
      Eigen::VectorXd::Ones(sys.dim) / std::sqrt(static_cast<double>(sys.dim));
  result.pairing_drift = pairing_drift(variational_rk(sys, fwd, traj, delta0, cfg), run);
  return result;
}

GradientResult finish_partitioned(const PartitionedOdeSystem& sys,
                                  const PartitionedTableau& fwd, const GprkTableau& adj,
                                  const CostFunction& cost, const PartitionedTrajectory& traj,
                                  const SolverConfig& cfg, bool fast_path) {
  const Eigen::VectorXd lambdaN = cost.gradient(traj.state(traj.steps()));
  AdjointRun run = adjoint_gprk(sys, fwd, adj, traj, lambdaN, cfg, fast_path);

  GradientResult result;
  result.gradient = run.lambdas.front();
  result.forward_iterations = traj.total_solver_iterations;
  result.adjoint_iterations = run.total_solver_iterations;
  result.forward_stage_residual = traj.max_stage_residual;

  const Eigen::Index d = sys.dim();
  const Eigen::VectorXd delta0 =
      Eigen::VectorXd::Ones(d) / std::sqrt(static_cast<double>(d));
  result.pairing_drift = pairing_drift(variational_prk(sys, fwd, traj, delta0, cfg), run);
  return result;
}

}  // namespace

GradientResult gradient_with_adjoint(const Problem& problem, const ButcherTableau& fwd,
                                     const ButcherTableau& adj, const Eigen::VectorXd& theta,
                                     double h, int steps, const SolverConfig& cfg) {
  const OdeSystem sys = problem.plain_system();
  const Trajectory traj = integrate_rk(sys, fwd, theta, h, steps, cfg);
  return finish_plain(sys, fwd, adj, problem.cost, traj, cfg);
}

GradientResult gradient_with_adjoint(const Problem& problem, const PartitionedTableau& fwd,
                                     const GprkTableau& adj, const Eigen::VectorXd& theta,
                                     double h, int steps, const SolverConfig& cfg,
                                     bool separable_fast_path) {
  const PartitionedOdeSystem& sys = problem.partitioned_system();
  if (theta.size() != sys.dim()) {
    throw DimensionMismatchError("theta dimension does not match the problem");
  }
  const PartitionedTrajectory traj = integrate_prk(
      sys, fwd, theta.head(sys.dim1), theta.tail(sys.dim2), h, steps, cfg);
  return finish_partitioned(sys, fwd, adj, problem.cost, traj, cfg, separable_fast_path);
}

GradientResult exact_gradient(const Problem& problem, const MethodTableau& method,
                              const Eigen::VectorXd& theta, double h, int steps,
                              const SolverConfig& cfg) {
  if (std::holds_alternative<ButcherTableau>(method)) {
    const auto& fwd = std::get<ButcherTableau>(method);
    return gradient_with_adjoint(problem, fwd, synthesize_adjoint_rk(fwd), theta, h, steps,
                                 cfg);
  }
  const auto& fwd = std::get<PartitionedTableau>(method);
  if (!problem.partitioned()) {
    throw TableauMismatchError(
        "a partitioned method requires a partitioned problem; '" + problem.name +
        "' is plain");
  }
  return gradient_with_adjoint(problem, fwd, synthesize_gprk(fwd), theta, h, steps, cfg);
}

}  // namespace adjrk
