#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adjrk/rational.hpp"

namespace adjrk {

/// Exact rational coefficients of a tableau, kept alongside the double image
/// for methods whose coefficients are known in closed form.
struct RationalTableau {
  std::vector<std::vector<Rational>> a;  // s x s
  std::vector<Rational> b;               // s
};

/// Coefficients (a_ij, b_i) of an s-stage Runge-Kutta method.
///
/// No abscissae are stored: the library integrates autonomous systems only,
/// so the c-vector is never consumed.
struct ButcherTableau {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  /// Exact coefficients, present for catalog methods and for tableaus parsed
  /// from files whose entries are all integers or rational strings.
  std::optional<RationalTableau> exact;

  ButcherTableau(Eigen::MatrixXd a, Eigen::VectorXd b);
  static ButcherTableau from_rational(RationalTableau exact);

  [[nodiscard]] int stages() const { return static_cast<int>(b.size()); }
  /// True iff a_ij = 0 for j >= i, i.e. the method is explicit.
  [[nodiscard]] bool strictly_lower_triangular() const;
  [[nodiscard]] double max_abs() const;
  [[nodiscard]] bool same_coefficients(const ButcherTableau& other) const;
};

/// A pair of tableaus (a1,b1), (a2,b2) sharing the stage count, applied to the
/// two blocks of a partitioned system.
struct PartitionedTableau {
  ButcherTableau first;
  ButcherTableau second;

  PartitionedTableau(ButcherTableau first, ButcherTableau second);
  [[nodiscard]] int stages() const { return first.stages(); }
  [[nodiscard]] double max_abs() const;
  [[nodiscard]] bool same_coefficients(const PartitionedTableau& other) const;
};

/// Coefficients of a generalized partitioned Runge-Kutta (GPRK) method for the
/// adjoint of a partitioned system: four weight vectors and four stage
/// matrices. Reduces to a PRK method only when B11=B12, B21=B22, A11=A12 and
/// A21=A22.
struct GprkTableau {
  Eigen::VectorXd B11, B12, B21, B22;
  Eigen::MatrixXd A11, A12, A21, A22;

  GprkTableau(Eigen::VectorXd B11, Eigen::VectorXd B12, Eigen::VectorXd B21,
              Eigen::VectorXd B22, Eigen::MatrixXd A11, Eigen::MatrixXd A12,
              Eigen::MatrixXd A21, Eigen::MatrixXd A22);

  [[nodiscard]] int stages() const { return static_cast<int>(B11.size()); }
  [[nodiscard]] double max_abs() const;
};

/// Labeled residuals of a family of coefficient conditions.
///
/// Residuals are absolute values divided by max(1, magnitude of the
/// participating tableau entries), so tolerance statements are scale-free.
/// When all inputs carry exact rational coefficients the residuals are
/// evaluated in exact arithmetic, so identities that hold algebraically
/// report exactly zero.
struct ConditionReport {
  struct Entry {
    std::string condition;  // e.g. "B", "A", "A12", "weights-equal", "coupling"
    int i = -1;             // 0-based indices; j = -1 for vector conditions
    int j = -1;
    double residual = 0.0;
  };
  std::vector<Entry> residuals;
  double max_residual = 0.0;

  /// Largest residual among entries whose condition id matches exactly.
  [[nodiscard]] double max_residual_for(std::string_view condition) const;
};

/// Relative tolerance below which a weight counts as zero and synthesis is
/// refused (the closed-form coefficients divide by b_i).
inline constexpr double kZeroWeightRelTol = 1e-12;

/// Adjoint tableau (A, B) with B = b and A_ij = b_j - (b_j/b_i) a_ji.
/// Together with the input, the result satisfies the canonical-pair
/// conditions b_i = B_i and b_i A_ij + B_j a_ji = b_i B_j.
/// Throws ZeroWeightError when some |b_i| is below tolerance.
ButcherTableau synthesize_adjoint_rk(const ButcherTableau& t);

/// GPRK tableau for the adjoint of a PRK discretization: the unique
/// coefficient set satisfying the six canonical condition families, given by
///   B11 = B21 = b1,  B12 = B22 = b2,
///   A11_ij = b1_j - (b1_j/b1_i) a1_ji,   A12_ij = b2_j - (b2_j/b1_i) a1_ji,
///   A21_ij = b1_j - (b1_j/b2_i) a2_ji,   A22_ij = b2_j - (b2_j/b2_i) a2_ji.
/// Throws ZeroWeightError (with partition tag) when a weight vanishes.
GprkTableau synthesize_gprk(const PartitionedTableau& t);

/// Residuals of the canonical-pair conditions for a plain RK forward/adjoint
/// pair: |b_i - B_i| for all i ("B") and |b_i A_ij + B_j a_ji - b_i B_j| for
/// all i,j ("A").
ConditionReport check_rk_adjoint_conditions(const ButcherTableau& fwd,
                                            const ButcherTableau& adj);

/// Residuals of the six GPRK condition families: the weight conditions
/// ("B11", "B21" against b1; "B12", "B22" against b2) and the four matrix
/// condition families ("A11", "A12", "A21", "A22").
ConditionReport check_gprk_conditions(const PartitionedTableau& fwd,
                                      const GprkTableau& adj);

/// Residuals of the symplecticity conditions for a partitioned pair:
/// "weights-equal" holds |b1_i - b2_i|, "coupling" holds
/// |b1_i a2_ij + b2_j a1_ji - b1_i b2_j|. The families are reported
/// separately: for separable Hamiltonians a pair is symplectic when
/// "coupling" holds even if "weights-equal" is violated.
ConditionReport check_symplecticity_conditions(const PartitionedTableau& t);

/// True iff B11=B12, B21=B22, A11=A12 and A21=A22 entrywise within tol,
/// i.e. the GPRK method falls into the class of PRK methods.
bool is_reducible_to_prk(const GprkTableau& g, double tol);

}  // namespace adjrk
