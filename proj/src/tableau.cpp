#include "adjrk/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adjrk/errors.hpp"

namespace adjrk {

namespace {

template <class Dense>
void require_finite(const Dense& m, const char* what) {
  if (!m.allFinite()) {
    throw DimensionMismatchError(std::string(what) + " contains non-finite entries");
  }
}

void require_same_stages(int s1, int s2, const char* what) {
  if (s1 != s2) {
    std::ostringstream os;
    os << what << ": stage counts differ (" << s1 << " vs " << s2 << ")";
    throw StageMismatchError(os.str());
  }
}

double condition_scale(std::initializer_list<double> magnitudes) {
  double scale = 1.0;
  for (double m : magnitudes) scale = std::max(scale, m);
  return scale;
}

void check_nonzero_weights(const Eigen::VectorXd& b, int partition) {
  const double floor = kZeroWeightRelTol * std::max(1.0, b.cwiseAbs().maxCoeff());
  for (int i = 0; i < b.size(); ++i) {
    if (std::abs(b(i)) <= floor) {
      std::ostringstream os;
      os << "weight b";
      if (partition != 0) os << "^[" << partition << "]";
      os << "(" << i + 1 << ") is zero (|" << b(i) << "| <= " << floor
         << "); the adjoint coefficients divide by it";
      throw ZeroWeightError(os.str(), i, partition);
    }
  }
}

// A_pq(i,j) = bq_j - (bq_j / bp_i) * ap_ji
Eigen::MatrixXd adjoint_block(const Eigen::MatrixXd& ap, const Eigen::VectorXd& bp,
                              const Eigen::VectorXd& bq) {
  const int s = static_cast<int>(bp.size());
  Eigen::MatrixXd A(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      A(i, j) = bq(j) - (bq(j) / bp(i)) * ap(j, i);
    }
  }
  return A;
}

}  // namespace

ButcherTableau::ButcherTableau(Eigen::MatrixXd a_, Eigen::VectorXd b_)
    : a(std::move(a_)), b(std::move(b_)) {
  if (b.size() == 0) throw DimensionMismatchError("tableau must have at least one stage");
  if (a.rows() != b.size() || a.cols() != b.size()) {
    std::ostringstream os;
    os << "tableau a must be " << b.size() << "x" << b.size() << ", got " << a.rows()
       << "x" << a.cols();
    throw DimensionMismatchError(os.str());
  }
  require_finite(a, "tableau a");
  require_finite(b, "tableau b");
}

ButcherTableau ButcherTableau::from_rational(RationalTableau exact_) {
  const int s = static_cast<int>(exact_.b.size());
  Eigen::MatrixXd a(s, s);
  Eigen::VectorXd b(s);
  for (int i = 0; i < s; ++i) {
    b(i) = exact_.b[static_cast<std::size_t>(i)].to_double();
    for (int j = 0; j < s; ++j) {
      a(i, j) = exact_.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].to_double();
    }
  }
  ButcherTableau t(std::move(a), std::move(b));
  t.exact = std::move(exact_);
  return t;
}

bool ButcherTableau::strictly_lower_triangular() const {
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = i; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) return false;
    }
  }
  return true;
}

double ButcherTableau::max_abs() const {
  return std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
}

bool ButcherTableau::same_coefficients(const ButcherTableau& other) const {
  return stages() == other.stages() && a == other.a && b == other.b;
}

PartitionedTableau::PartitionedTableau(ButcherTableau first_, ButcherTableau second_)
    : first(std::move(first_)), second(std::move(second_)) {
  require_same_stages(first.stages(), second.stages(), "partitioned tableau");
}

double PartitionedTableau::max_abs() const {
  return std::max(first.max_abs(), second.max_abs());
}

bool PartitionedTableau::same_coefficients(const PartitionedTableau& other) const {
  return first.same_coefficients(other.first) && second.same_coefficients(other.second);
}

GprkTableau::GprkTableau(Eigen::VectorXd B11_, Eigen::VectorXd B12_, Eigen::VectorXd B21_,
                         Eigen::VectorXd B22_, Eigen::MatrixXd A11_, Eigen::MatrixXd A12_,
                         Eigen::MatrixXd A21_, Eigen::MatrixXd A22_)
    : B11(std::move(B11_)),
      B12(std::move(B12_)),
      B21(std::move(B21_)),
      B22(std::move(B22_)),
      A11(std::move(A11_)),
      A12(std::move(A12_)),
      A21(std::move(A21_)),
      A22(std::move(A22_)) {
  const auto s = B11.size();
  if (s == 0) throw DimensionMismatchError("GPRK tableau must have at least one stage");
  for (const auto* v : {&B12, &B21, &B22}) {
    if (v->size() != s) throw StageMismatchError("GPRK weight vectors must share the stage count");
  }
  for (const auto* m : {&A11, &A12, &A21, &A22}) {
    if (m->rows() != s || m->cols() != s) {
      throw StageMismatchError("GPRK stage matrices must be s x s");
    }
    require_finite(*m, "GPRK stage matrix");
  }
  for (const auto* v : {&B11, &B12, &B21, &B22}) require_finite(*v, "GPRK weights");
}

double GprkTableau::max_abs() const {
  double m = 0.0;
  for (const auto* v : {&B11, &B12, &B21, &B22}) m = std::max(m, v->cwiseAbs().maxCoeff());
  for (const auto* a : {&A11, &A12, &A21, &A22}) m = std::max(m, a->cwiseAbs().maxCoeff());
  return m;
}

double ConditionReport::max_residual_for(std::string_view condition) const {
  double m = 0.0;
  for (const auto& e : residuals) {
    if (e.condition == condition) m = std::max(m, e.residual);
  }
  return m;
}

ButcherTableau synthesize_adjoint_rk(const ButcherTableau& t) {
  check_nonzero_weights(t.b, 0);
  return ButcherTableau(adjoint_block(t.a, t.b, t.b), t.b);
}

GprkTableau synthesize_gprk(const PartitionedTableau& t) {
  check_nonzero_weights(t.first.b, 1);
  check_nonzero_weights(t.second.b, 2);
  const Eigen::VectorXd& b1 = t.first.b;
  const Eigen::VectorXd& b2 = t.second.b;
  return GprkTableau(b1, b2, b1, b2,
                     adjoint_block(t.first.a, b1, b1), adjoint_block(t.first.a, b1, b2),
                     adjoint_block(t.second.a, b2, b1), adjoint_block(t.second.a, b2, b2));
}

ConditionReport check_rk_adjoint_conditions(const ButcherTableau& fwd,
                                            const ButcherTableau& adj) {
  require_same_stages(fwd.stages(), adj.stages(), "check_rk_adjoint_conditions");
  const int s = fwd.stages();
  const double scale = condition_scale({fwd.max_abs(), adj.max_abs()});

  ConditionReport report;
  for (int i = 0; i < s; ++i) {
    report.residuals.push_back({"B", i, -1, std::abs(fwd.b(i) - adj.b(i)) / scale});
  }
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      const double r =
          fwd.b(i) * adj.a(i, j) + adj.b(j) * fwd.a(j, i) - fwd.b(i) * adj.b(j);
      report.residuals.push_back({"A", i, j, std::abs(r) / scale});
    }
  }
  for (const auto& e : report.residuals) {
    report.max_residual = std::max(report.max_residual, e.residual);
  }
  return report;
}

ConditionReport check_gprk_conditions(const PartitionedTableau& fwd, const GprkTableau& adj) {
  require_same_stages(fwd.stages(), adj.stages(), "check_gprk_conditions");
  const int s = fwd.stages();
  const double scale = condition_scale({fwd.max_abs(), adj.max_abs()});
  const Eigen::VectorXd& b1 = fwd.first.b;
  const Eigen::VectorXd& b2 = fwd.second.b;
  const Eigen::MatrixXd& a1 = fwd.first.a;
  const Eigen::MatrixXd& a2 = fwd.second.a;

  ConditionReport report;
  for (int i = 0; i < s; ++i) {
    report.residuals.push_back({"B11", i, -1, std::abs(b1(i) - adj.B11(i)) / scale});
    report.residuals.push_back({"B21", i, -1, std::abs(b1(i) - adj.B21(i)) / scale});
    report.residuals.push_back({"B12", i, -1, std::abs(b2(i) - adj.B12(i)) / scale});
    report.residuals.push_back({"B22", i, -1, std::abs(b2(i) - adj.B22(i)) / scale});
  }
  // b^[p]_i A^[pq]_ij + B^[pq]_j a^[p']_ji = b^[p]_i B^[pq]_j, where blocks
  // A11, A12 pair with (b1, a1) and A21, A22 with (b2, a2).
  const auto matrix_family = [&](const char* id, const Eigen::VectorXd& bp,
                                 const Eigen::MatrixXd& ap, const Eigen::MatrixXd& A,
                                 const Eigen::VectorXd& B) {
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        const double r = bp(i) * A(i, j) + B(j) * ap(j, i) - bp(i) * B(j);
        report.residuals.push_back({id, i, j, std::abs(r) / scale});
      }
    }
  };
  matrix_family("A11", b1, a1, adj.A11, adj.B11);
  matrix_family("A12", b1, a1, adj.A12, adj.B12);
  matrix_family("A21", b2, a2, adj.A21, adj.B21);
  matrix_family("A22", b2, a2, adj.A22, adj.B22);

  for (const auto& e : report.residuals) {
    report.max_residual = std::max(report.max_residual, e.residual);
  }
  return report;
}

ConditionReport check_symplecticity_conditions(const PartitionedTableau& t) {
  const int s = t.stages();
  const double scale = condition_scale({t.max_abs()});
  ConditionReport report;

  const bool exact = t.first.exact.has_value() && t.second.exact.has_value();
  if (exact) {
    // Exact rational evaluation: symplectic pairs with non-representable
    // coefficients (e.g. Lobatto IIIA-IIIB) report a residual of exactly 0.
    try {
      const auto& r1 = *t.first.exact;
      const auto& r2 = *t.second.exact;
      for (int i = 0; i < s; ++i) {
        const double r = abs(r1.b[i] - r2.b[i]).to_double();
        report.residuals.push_back({"weights-equal", i, -1, r / scale});
      }
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
          const Rational r =
              r1.b[i] * r2.a[i][j] + r2.b[j] * r1.a[j][i] - r1.b[i] * r2.b[j];
          report.residuals.push_back({"coupling", i, j, abs(r).to_double() / scale});
        }
      }
      for (const auto& e : report.residuals) {
        report.max_residual = std::max(report.max_residual, e.residual);
      }
      return report;
    } catch (const std::overflow_error&) {
      report.residuals.clear();  // fall through to the double path
    }
  }

  for (int i = 0; i < s; ++i) {
    report.residuals.push_back(
        {"weights-equal", i, -1, std::abs(t.first.b(i) - t.second.b(i)) / scale});
  }
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      const double r = t.first.b(i) * t.second.a(i, j) + t.second.b(j) * t.first.a(j, i) -
                       t.first.b(i) * t.second.b(j);
      report.residuals.push_back({"coupling", i, j, std::abs(r) / scale});
    }
  }
  for (const auto& e : report.residuals) {
    report.max_residual = std::max(report.max_residual, e.residual);
  }
  return report;
}

bool is_reducible_to_prk(const GprkTableau& g, double tol) {
  const auto close = [tol](const auto& x, const auto& y) {
    return ((x - y).cwiseAbs().maxCoeff() <= tol);
  };
  return close(g.B11, g.B12) && close(g.B21, g.B22) && close(g.A11, g.A12) &&
         close(g.A21, g.A22);
}

}  // namespace adjrk
