#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "adjrk/tableau.hpp"

namespace adjrk {

/// A method is either a plain RK tableau or a partitioned pair.
using MethodTableau = std::variant<ButcherTableau, PartitionedTableau>;

struct MethodInfo {
  std::string name;
  MethodTableau tableau;
  int order;  ///< classical convergence order of the method (pair order for PRK)
  std::string description;

  [[nodiscard]] bool partitioned() const {
    return std::holds_alternative<PartitionedTableau>(tableau);
  }
};

/// Registered method names, in registry order.
const std::vector<std::string>& method_names();

/// Look up a catalog method; throws UnknownMethodError.
MethodInfo method(std::string_view name);

// Individual constructors, exact coefficients attached.
ButcherTableau tableau_explicit_euler();
ButcherTableau tableau_implicit_midpoint();
ButcherTableau tableau_rk4();
PartitionedTableau pair_symplectic_euler();
PartitionedTableau pair_stormer_verlet();
PartitionedTableau pair_lobatto3();          // Lobatto IIIA-IIIB, 3 stages
PartitionedTableau pair_ruth3();             // kick-drift splitting, b1 != b2
PartitionedTableau pair_sprk_embedded();     // shared a, distinct weight vectors

/// Max residual of the classical RK order conditions for orders 1..p
/// (p <= 4), with abscissae taken as row sums of a. Used to validate catalog
/// coefficients in the test suite.
double rk_order_residual(const ButcherTableau& t, int p);

}  // namespace adjrk
