#include "adjrk/problems.hpp"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "adjrk/errors.hpp"

namespace adjrk {

namespace {

/// Reads parameters with defaults and rejects unknown keys.
class ParamReader {
 public:
  explicit ParamReader(const ProblemParams& params) : params_(params) {}

  double get(const std::string& key, double fallback) {
    used_.insert(key);
    const auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  int get_int(const std::string& key, int fallback, int min_value) {
    const double v = get(key, static_cast<double>(fallback));
    if (v != std::floor(v) || v < min_value || v > 1e9) {
      std::ostringstream os;
      os << "parameter '" << key << "' must be an integer >= " << min_value << ", got " << v;
      throw InvalidParamError(os.str(), key);
    }
    return static_cast<int>(v);
  }

  double get_positive(const std::string& key, double fallback) {
    const double v = get(key, fallback);
    if (!(v > 0.0)) {
      throw InvalidParamError("parameter '" + key + "' must be positive", key);
    }
    return v;
  }

  void finish() const {
    for (const auto& [key, value] : params_) {
      (void)value;
      if (used_.count(key) == 0) {
        throw InvalidParamError("unknown parameter '" + key + "'", key);
      }
    }
  }

 private:
  const ProblemParams& params_;
  std::set<std::string> used_;
};

Problem make_linear(const ProblemParams& params) {
  ParamReader reader(params);
  const int d = reader.get_int("d", 6, 1);
  const int seed = reader.get_int("seed", 1, 0);
  const double scale = reader.get_positive("scale", 0.8);
  reader.finish();

  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::MatrixXd L(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) L(i, j) = unit(rng);
  }
  const double norm = L.cwiseAbs().rowwise().sum().maxCoeff();
  if (norm > 0.0) L *= scale / norm;
  Eigen::VectorXd theta0(d);
  for (int i = 0; i < d; ++i) theta0(i) = unit(rng);

  Problem p = linear_problem(std::move(L), std::move(theta0), Eigen::VectorXd::Zero(d));
  p.name = "linear";
  return p;
}

Problem make_harmonic(const ProblemParams& params) {
  ParamReader reader(params);
  const double omega = reader.get_positive("omega", 1.0);
  reader.finish();
  const double w2 = omega * omega;

  PartitionedOdeSystem sys;
  sys.dim1 = 1;
  sys.dim2 = 1;
  sys.separable = true;
  sys.f1 = [](const Eigen::VectorXd&, const Eigen::VectorXd& p) { return p; };
  sys.f2 = [w2](const Eigen::VectorXd& q, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return -w2 * q;
  };
  sys.jac11 = [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(1, 1);
  };
  sys.jac12 = [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Identity(1, 1);
  };
  sys.jac21 = [w2](const Eigen::VectorXd&, const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, -w2);
  };
  sys.jac22 = [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(1, 1);
  };

  Problem p;
  p.name = "harmonic";
  p.system = std::move(sys);
  p.cost = quadratic_cost(Eigen::VectorXd::Zero(2));
  p.theta0 = Eigen::Vector2d(1.0, 0.0);
  p.default_h = 0.1;
  p.default_steps = 100;
  return p;
}

Problem make_pendulum(const ProblemParams& params) {
  ParamReader reader(params);
  const double c = reader.get("coupling", 0.2);
  reader.finish();

  PartitionedOdeSystem sys;
  sys.dim1 = 1;
  sys.dim2 = 1;
  sys.separable = (c == 0.0);
  // H = p^2/2 - cos q + c q p
  sys.f1 = [c](const Eigen::VectorXd& q, const Eigen::VectorXd& p) -> Eigen::VectorXd {
    return p + c * q;
  };
  sys.f2 = [c](const Eigen::VectorXd& q, const Eigen::VectorXd& p) -> Eigen::VectorXd {
    Eigen::VectorXd out(1);
    out(0) = -std::sin(q(0)) - c * p(0);
    return out;
  };
  sys.jac11 = [c](const Eigen::VectorXd&, const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, c);
  };
  sys.jac12 = [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Identity(1, 1);
  };
  sys.jac21 = [](const Eigen::VectorXd& q, const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, -std::cos(q(0)));
  };
  sys.jac22 = [c](const Eigen::VectorXd&, const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Constant(1, 1, -c);
  };

  Problem p;
  p.name = "pendulum";
  p.system = std::move(sys);
  p.cost = quadratic_cost(Eigen::VectorXd::Zero(2));
  p.theta0 = Eigen::Vector2d(0.8, 0.3);
  p.default_h = 0.05;
  p.default_steps = 100;
  return p;
}

constexpr double kKeplerMinRadius = 1e-8;

Eigen::VectorXd kepler_accel(double mu, const Eigen::VectorXd& q) {
  const double r = q.norm();
  if (r < kKeplerMinRadius) {
    throw DomainError("kepler: radius fell below 1e-8 (collision with the center)");
  }
  return -mu / (r * r * r) * q;
}

Eigen::MatrixXd kepler_accel_jacobian(double mu, const Eigen::VectorXd& q) {
  const double r = q.norm();
  if (r < kKeplerMinRadius) {
    throw DomainError("kepler: radius fell below 1e-8 (collision with the center)");
  }
  const double r3 = r * r * r;
  const double r5 = r3 * r * r;
  return -mu * (Eigen::MatrixXd::Identity(2, 2) / r3 - 3.0 / r5 * q * q.transpose());
}

Problem make_kepler(const ProblemParams& params) {
  ParamReader reader(params);
  const double e = reader.get("e", 0.6);
  const double mu = reader.get_positive("mu", 1.0);
  const int energy_cost = reader.get_int("energy_cost", 0, 0);
  if (e < 0.0 || e >= 1.0) {
    throw InvalidParamError("eccentricity e must lie in [0, 1)", "e");
  }

  Eigen::VectorXd theta0(4);
  theta0 << 1.0 - e, 0.0, 0.0, std::sqrt(mu * (1.0 + e) / (1.0 - e));

  const auto energy = [mu](const Eigen::VectorXd& x) {
    const Eigen::Vector2d q = x.head(2);
    const Eigen::Vector2d p = x.tail(2);
    return 0.5 * p.squaredNorm() - mu / q.norm();
  };
  const double default_energy = energy(theta0);
  const double target_energy = reader.get("target_energy", default_energy);
  reader.finish();

  PartitionedOdeSystem sys;
  sys.dim1 = 2;
  sys.dim2 = 2;
  sys.separable = true;
  sys.f1 = [](const Eigen::VectorXd&, const Eigen::VectorXd& p) { return p; };
  sys.f2 = [mu](const Eigen::VectorXd& q, const Eigen::VectorXd&) {
    return kepler_accel(mu, q);
  };
  sys.jac11 = [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(2, 2);
  };
  sys.jac12 = [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Identity(2, 2);
  };
  sys.jac21 = [mu](const Eigen::VectorXd& q, const Eigen::VectorXd&) {
    return kepler_accel_jacobian(mu, q);
  };
  sys.jac22 = [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(2, 2);
  };

  Problem p;
  p.name = "kepler";
  p.system = std::move(sys);
  p.theta0 = std::move(theta0);
  p.default_h = 0.01;
  p.default_steps = 100;
  if (energy_cost != 0) {
    // C(x) = (H(x) - E*)^2, grad = 2 (H - E*) (dH/dq, dH/dp).
    p.cost.value = [energy, target_energy](const Eigen::VectorXd& x) {
      const double d = energy(x) - target_energy;
      return d * d;
    };
    p.cost.gradient = [energy, target_energy, mu](const Eigen::VectorXd& x) {
      const Eigen::Vector2d q = x.head(2);
      const Eigen::Vector2d p2 = x.tail(2);
      const double r = q.norm();
      Eigen::VectorXd g(4);
      g.head(2) = mu / (r * r * r) * q;
      g.tail(2) = p2;
      return Eigen::VectorXd(2.0 * (energy(x) - target_energy) * g);
    };
  } else {
    p.cost = quadratic_cost(Eigen::VectorXd::Zero(4));
  }
  return p;
}

Problem make_heat_advection(const ProblemParams& params) {
  ParamReader reader(params);
  const int d = reader.get_int("d", 20, 4);
  const double nu = reader.get("nu", 0.01);
  const double c = reader.get("c", 0.4);
  reader.finish();
  if (nu < 0.0) throw InvalidParamError("diffusion coefficient nu must be >= 0", "nu");
  if (c < 0.0) throw InvalidParamError("advection speed c must be >= 0 (upwind stencil)", "c");

  const double dx = 1.0 / d;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const int left = (i + d - 1) % d;
    const int right = (i + 1) % d;
    M(i, left) += nu / (dx * dx) + c / dx;
    M(i, i) += -2.0 * nu / (dx * dx) - c / dx;
    M(i, right) += nu / (dx * dx);
  }

  const int d1 = d / 2;
  const int d2 = d - d1;
  const Eigen::MatrixXd M11 = M.topLeftCorner(d1, d1);
  const Eigen::MatrixXd M12 = M.topRightCorner(d1, d2);
  const Eigen::MatrixXd M21 = M.bottomLeftCorner(d2, d1);
  const Eigen::MatrixXd M22 = M.bottomRightCorner(d2, d2);

  PartitionedOdeSystem sys;
  sys.dim1 = d1;
  sys.dim2 = d2;
  sys.separable = false;
  sys.f1 = [M11, M12](const Eigen::VectorXd& x1, const Eigen::VectorXd& x2) -> Eigen::VectorXd {
    return M11 * x1 + M12 * x2;
  };
  sys.f2 = [M21, M22](const Eigen::VectorXd& x1, const Eigen::VectorXd& x2) -> Eigen::VectorXd {
    return M21 * x1 + M22 * x2;
  };
  sys.jac11 = [M11](const Eigen::VectorXd&, const Eigen::VectorXd&) { return M11; };
  sys.jac12 = [M12](const Eigen::VectorXd&, const Eigen::VectorXd&) { return M12; };
  sys.jac21 = [M21](const Eigen::VectorXd&, const Eigen::VectorXd&) { return M21; };
  sys.jac22 = [M22](const Eigen::VectorXd&, const Eigen::VectorXd&) { return M22; };

  Eigen::VectorXd theta0(d);
  for (int i = 0; i < d; ++i) {
    const double x = static_cast<double>(i) / d;
    theta0(i) = std::sin(2.0 * M_PI * x) + 0.5 * std::cos(4.0 * M_PI * x);
  }

  Problem p;
  p.name = "heat-advection";
  p.system = std::move(sys);
  p.cost = quadratic_cost(Eigen::VectorXd::Zero(d));
  p.theta0 = std::move(theta0);
  p.default_h = 0.05;
  p.default_steps = 100;
  return p;
}

}  // namespace

Eigen::Index Problem::dim() const {
  if (partitioned()) return std::get<PartitionedOdeSystem>(system).dim();
  return std::get<OdeSystem>(system).dim;
}

const PartitionedOdeSystem& Problem::partitioned_system() const {
  if (!partitioned()) {
    throw DimensionMismatchError("problem '" + name + "' is not partitioned");
  }
  return std::get<PartitionedOdeSystem>(system);
}

OdeSystem Problem::plain_system() const {
  if (partitioned()) return as_plain(std::get<PartitionedOdeSystem>(system));
  return std::get<OdeSystem>(system);
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {
      "linear", "harmonic", "pendulum", "kepler", "heat-advection",
  };
  return names;
}

Problem builtin_problem(std::string_view name, const ProblemParams& params) {
  if (name == "linear") return make_linear(params);
  if (name == "harmonic") return make_harmonic(params);
  if (name == "pendulum") return make_pendulum(params);
  if (name == "kepler") return make_kepler(params);
  if (name == "heat-advection") return make_heat_advection(params);
  std::ostringstream os;
  os << "unknown problem '" << name << "'; available:";
  for (const auto& n : problem_names()) os << " " << n;
  throw UnknownProblemError(os.str());
}

Problem linear_problem(Eigen::MatrixXd L, Eigen::VectorXd theta0, Eigen::VectorXd target,
                       double default_h, int default_steps) {
  if (L.rows() != L.cols()) throw DimensionMismatchError("linear problem matrix must be square");
  if (theta0.size() != L.rows() || target.size() != L.rows()) {
    throw DimensionMismatchError("linear problem: theta0/target dimension mismatch with L");
  }
  OdeSystem sys;
  sys.dim = L.rows();
  sys.f = [L](const Eigen::VectorXd& x) -> Eigen::VectorXd { return L * x; };
  sys.jacobian = [L](const Eigen::VectorXd&) { return L; };

  Problem p;
  p.name = "linear";
  p.system = std::move(sys);
  p.cost = quadratic_cost(std::move(target));
  p.theta0 = std::move(theta0);
  p.default_h = default_h;
  p.default_steps = default_steps;
  return p;
}

}  // namespace adjrk
