#include "adjrk/catalog.hpp"

#include <cmath>
#include <sstream>

#include "adjrk/errors.hpp"

namespace adjrk {

namespace {

using R = Rational;

ButcherTableau from_entries(std::vector<std::vector<R>> a, std::vector<R> b) {
  return ButcherTableau::from_rational(RationalTableau{std::move(a), std::move(b)});
}

/// PRK pair of a kick-drift splitting: partition 1 (positions) advances with
/// drift coefficients c, partition 2 (momenta) with kick coefficients d, the
/// first kick happening before the first drift. The resulting tableaus are
///   a1_ij = c_j (j < i),   a2_ij = d_j (j <= i),
/// and the pair satisfies the separable-symplecticity coupling condition for
/// any c, d.
PartitionedTableau splitting_pair(const std::vector<R>& drift, const std::vector<R>& kick) {
  const std::size_t s = drift.size();
  std::vector<std::vector<R>> a1(s, std::vector<R>(s));
  std::vector<std::vector<R>> a2(s, std::vector<R>(s));
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      if (j < i) a1[i][j] = drift[j];
      if (j <= i) a2[i][j] = kick[j];
    }
  }
  return PartitionedTableau(from_entries(std::move(a1), drift),
                            from_entries(std::move(a2), kick));
}

}  // namespace

ButcherTableau tableau_explicit_euler() { return from_entries({{R{0}}}, {R{1}}); }

ButcherTableau tableau_implicit_midpoint() {
  return from_entries({{R{1, 2}}}, {R{1}});
}

ButcherTableau tableau_rk4() {
  return from_entries(
      {
          {R{0}, R{0}, R{0}, R{0}},
          {R{1, 2}, R{0}, R{0}, R{0}},
          {R{0}, R{1, 2}, R{0}, R{0}},
          {R{0}, R{0}, R{1}, R{0}},
      },
      {R{1, 6}, R{1, 3}, R{1, 3}, R{1, 6}});
}

PartitionedTableau pair_symplectic_euler() {
  return PartitionedTableau(from_entries({{R{0}}}, {R{1}}),
                            from_entries({{R{1}}}, {R{1}}));
}

PartitionedTableau pair_stormer_verlet() {
  // Lobatto IIIA-IIIB with two stages.
  auto first = from_entries(
      {
          {R{0}, R{0}},
          {R{1, 2}, R{1, 2}},
      },
      {R{1, 2}, R{1, 2}});
  auto second = from_entries(
      {
          {R{1, 2}, R{0}},
          {R{1, 2}, R{0}},
      },
      {R{1, 2}, R{1, 2}});
  return PartitionedTableau(std::move(first), std::move(second));
}

PartitionedTableau pair_lobatto3() {
  auto iiia = from_entries(
      {
          {R{0}, R{0}, R{0}},
          {R{5, 24}, R{1, 3}, R{-1, 24}},
          {R{1, 6}, R{2, 3}, R{1, 6}},
      },
      {R{1, 6}, R{2, 3}, R{1, 6}});
  auto iiib = from_entries(
      {
          {R{1, 6}, R{-1, 6}, R{0}},
          {R{1, 6}, R{1, 3}, R{0}},
          {R{1, 6}, R{5, 6}, R{0}},
      },
      {R{1, 6}, R{2, 3}, R{1, 6}});
  return PartitionedTableau(std::move(iiia), std::move(iiib));
}

PartitionedTableau pair_ruth3() {
  return splitting_pair({R{2, 3}, R{-2, 3}, R{1}}, {R{7, 24}, R{3, 4}, R{-1, 24}});
}

PartitionedTableau pair_sprk_embedded() {
  // Kutta's third-order stage matrix with two weight vectors: b1 is the
  // order-3 weight vector, b2 a distinct order-2 one. Applied spatially, one
  // weight set per index block.
  std::vector<std::vector<R>> a = {
      {R{0}, R{0}, R{0}},
      {R{1, 2}, R{0}, R{0}},
      {R{-1}, R{2}, R{0}},
  };
  auto first = from_entries(a, {R{1, 6}, R{2, 3}, R{1, 6}});
  auto second = from_entries(a, {R{1, 4}, R{1, 2}, R{1, 4}});
  return PartitionedTableau(std::move(first), std::move(second));
}

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names = {
      "euler",  "midpoint",       "rk4",   "sympeuler",
      "stormer-verlet", "lobatto3", "ruth3", "sprk-embedded",
  };
  return names;
}

MethodInfo method(std::string_view name) {
  if (name == "euler") {
    return {"euler", tableau_explicit_euler(), 1, "explicit Euler"};
  }
  if (name == "midpoint") {
    return {"midpoint", tableau_implicit_midpoint(), 2, "implicit midpoint (1-stage Gauss)"};
  }
  if (name == "rk4") {
    return {"rk4", tableau_rk4(), 4, "classical 4-stage Runge-Kutta"};
  }
  if (name == "sympeuler") {
    return {"sympeuler", pair_symplectic_euler(), 1, "symplectic Euler pair"};
  }
  if (name == "stormer-verlet") {
    return {"stormer-verlet", pair_stormer_verlet(), 2, "Stormer-Verlet (Lobatto IIIA-IIIB, 2 stages)"};
  }
  if (name == "lobatto3") {
    return {"lobatto3", pair_lobatto3(), 4, "Lobatto IIIA-IIIB pair, 3 stages"};
  }
  if (name == "ruth3") {
    return {"ruth3", pair_ruth3(), 3, "Ruth's third-order splitting pair (distinct weights)"};
  }
  if (name == "sprk-embedded") {
    return {"sprk-embedded", pair_sprk_embedded(), 2, "spatially partitioned embedded pair (shared a, distinct b)"};
  }
  std::ostringstream os;
  os << "unknown method '" << name << "'; available:";
  for (const auto& n : method_names()) os << " " << n;
  throw UnknownMethodError(os.str());
}

double rk_order_residual(const ButcherTableau& t, int p) {
  if (p < 1 || p > 4) {
    throw InvalidParamError("order conditions implemented for p in 1..4", "p");
  }
  const Eigen::VectorXd c = t.a.rowwise().sum();
  const Eigen::VectorXd& b = t.b;
  const Eigen::MatrixXd& a = t.a;
  double r = 0.0;
  const auto track = [&r](double lhs, double rhs) { r = std::max(r, std::abs(lhs - rhs)); };

  track(b.sum(), 1.0);
  if (p >= 2) track(b.dot(c), 1.0 / 2.0);
  if (p >= 3) {
    track(b.dot(c.cwiseProduct(c)), 1.0 / 3.0);
    track(b.dot(a * c), 1.0 / 6.0);
  }
  if (p >= 4) {
    track(b.dot(c.cwiseProduct(c).cwiseProduct(c)), 1.0 / 4.0);
    track(b.cwiseProduct(c).dot(a * c), 1.0 / 8.0);
    track(b.dot(a * c.cwiseProduct(c)), 1.0 / 12.0);
    track(b.dot(a * (a * c)), 1.0 / 24.0);
  }
  return r;
}

}  // namespace adjrk
