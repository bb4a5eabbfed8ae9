#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "adjrk/integrate.hpp"
#include "adjrk/oracle.hpp"
#include "adjrk/sensitivity.hpp"
#include "adjrk/tableau.hpp"

namespace adjrk::io {

/// Locale-independent formatting with 17 significant digits.
std::string format_double(double v);

enum class TableauFileKind { Plain, Pair, Gprk };

/// Classify a parsed tableau document by its keys: {"a","b"} plain,
/// {"first","second"} pair, {"B11",...,"A22"} GPRK.
TableauFileKind classify_tableau_json(const nlohmann::json& j);
TableauFileKind classify_tableau_file(const std::filesystem::path& path);

/// Parsers accept numeric entries, exact decimal strings ("0.5") and rational
/// strings ("1/2"). When every entry of a plain tableau is an integer or a
/// rational string the exact coefficients are attached. Matrices are
/// row-major. Throw ParseError on malformed input.
ButcherTableau parse_butcher(const nlohmann::json& j);
PartitionedTableau parse_pair(const nlohmann::json& j);
GprkTableau parse_gprk(const nlohmann::json& j);

ButcherTableau read_butcher(const std::filesystem::path& path);
PartitionedTableau read_pair(const std::filesystem::path& path);
GprkTableau read_gprk(const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);

nlohmann::json to_json(const ButcherTableau& t);
nlohmann::json to_json(const PartitionedTableau& t);
nlohmann::json to_json(const GprkTableau& t);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

/// Dense row-major matrix, either a bare [[...]] array or {"matrix": [[...]]}.
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);
/// Vector file: bare [...] array or {"vector": [...]} or whitespace/comma
/// separated plain text.
Eigen::VectorXd read_vector(const std::filesystem::path& path);

/// Trajectory CSV with header t,x_1,...,x_d; one row per step state.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv(std::ostream& os, const PartitionedTrajectory& traj);

/// Stage sidecar: structured text with all stage states per step.
nlohmann::json stages_json(const Trajectory& traj);
nlohmann::json stages_json(const PartitionedTrajectory& traj);

/// {"gradient": [...], "pairing_drift": r, "iterations": {...}}
nlohmann::json gradient_report(const GradientResult& result);

/// CSV with header coordinate,reference,candidate,abs_err.
void write_comparison_csv(std::ostream& os, const GradientComparison& cmp);
nlohmann::json comparison_summary(const GradientComparison& cmp);

nlohmann::json condition_report_json(const ConditionReport& report);
void print_condition_report(std::ostream& os, const ConditionReport& report);

}  // namespace adjrk::io
