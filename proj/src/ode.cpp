#include "adjrk/ode.hpp"

namespace adjrk {

OdeSystem as_plain(const PartitionedOdeSystem& p) {
  OdeSystem sys;
  sys.dim = p.dim();
  const Eigen::Index d1 = p.dim1;
  const Eigen::Index d2 = p.dim2;
  sys.f = [p, d1, d2](const Eigen::VectorXd& x) {
    const Eigen::VectorXd x1 = x.head(d1);
    const Eigen::VectorXd x2 = x.tail(d2);
    Eigen::VectorXd out(d1 + d2);
    out.head(d1) = p.f1(x1, x2);
    out.tail(d2) = p.f2(x1, x2);
    return out;
  };
  sys.jacobian = [p, d1, d2](const Eigen::VectorXd& x) {
    const Eigen::VectorXd x1 = x.head(d1);
    const Eigen::VectorXd x2 = x.tail(d2);
    Eigen::MatrixXd J(d1 + d2, d1 + d2);
    J.topLeftCorner(d1, d1) = p.jac11(x1, x2);
    J.topRightCorner(d1, d2) = p.jac12(x1, x2);
    J.bottomLeftCorner(d2, d1) = p.jac21(x1, x2);
    J.bottomRightCorner(d2, d2) = p.jac22(x1, x2);
    return J;
  };
  return sys;
}

CostFunction quadratic_cost(Eigen::VectorXd target) {
  CostFunction c;
  c.value = [target](const Eigen::VectorXd& x) { return 0.5 * (x - target).squaredNorm(); };
  c.gradient = [target](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x - target; };
  return c;
}

}  // namespace adjrk
