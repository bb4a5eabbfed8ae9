#include "adjrk/io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adjrk/errors.hpp"

namespace adjrk::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

struct ParsedEntry {
  double value = 0.0;
  std::optional<Rational> exact;
};

bool parse_int64(std::string_view s, std::int64_t& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

ParsedEntry parse_entry(const json& j, const std::string& where) {
  ParsedEntry e;
  if (j.is_number_integer()) {
    e.value = j.get<double>();
    e.exact = Rational{j.get<std::int64_t>(), 1};
    return e;
  }
  if (j.is_number()) {
    e.value = j.get<double>();
    return e;
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
      std::int64_t num = 0, den = 0;
      if (!parse_int64(std::string_view(s).substr(0, slash), num) ||
          !parse_int64(std::string_view(s).substr(slash + 1), den) || den == 0) {
        throw ParseError(where + ": malformed rational entry '" + s + "'");
      }
      const Rational r{num, den};
      e.value = r.to_double();
      e.exact = r;
      return e;
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ParseError(where + ": malformed numeric entry '" + s + "'");
    }
    e.value = v;
    std::int64_t asInt = 0;
    if (parse_int64(s, asInt)) e.exact = Rational{asInt, 1};
    return e;
  }
  throw ParseError(where + ": entry must be a number or string, got " + std::string(j.type_name()));
}

Eigen::VectorXd parse_vector_field(const json& j, const std::string& where,
                                   std::vector<Rational>* exact) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty array");
  Eigen::VectorXd v(j.size());
  bool all_exact = exact != nullptr;
  std::vector<Rational> rats;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const ParsedEntry e = parse_entry(j[i], where);
    v(static_cast<Eigen::Index>(i)) = e.value;
    if (e.exact.has_value()) {
      rats.push_back(*e.exact);
    } else {
      all_exact = false;
    }
  }
  if (exact != nullptr && all_exact) *exact = std::move(rats);
  return v;
}

Eigen::MatrixXd parse_matrix_field(const json& j, const std::string& where,
                                   std::vector<std::vector<Rational>>* exact) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty 2-D array");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw ParseError(where + ": expected rows to be arrays (row-major)");
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  bool all_exact = exact != nullptr;
  std::vector<std::vector<Rational>> rats;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw ParseError(where + ": ragged matrix rows");
    }
    std::vector<Rational> row;
    for (std::size_t k = 0; k < cols; ++k) {
      const ParsedEntry e = parse_entry(j[i][k], where);
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = e.value;
      if (e.exact.has_value()) {
        row.push_back(*e.exact);
      } else {
        all_exact = false;
      }
    }
    rats.push_back(std::move(row));
  }
  if (exact != nullptr && all_exact) *exact = std::move(rats);
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

}  // namespace

TableauFileKind classify_tableau_json(const json& j) {
  if (!j.is_object()) throw ParseError("tableau file must contain a JSON object");
  if (j.contains("first") && j.contains("second")) return TableauFileKind::Pair;
  if (j.contains("B11")) return TableauFileKind::Gprk;
  if (j.contains("a") && j.contains("b")) return TableauFileKind::Plain;
  throw ParseError("unrecognized tableau file: expected keys a/b, first/second, or B11..A22");
}

TableauFileKind classify_tableau_file(const std::filesystem::path& path) {
  return classify_tableau_json(read_json_file(path));
}

ButcherTableau parse_butcher(const json& j) {
  if (!j.is_object() || !j.contains("a") || !j.contains("b")) {
    throw ParseError("plain tableau requires keys 'a' and 'b'");
  }
  std::vector<std::vector<Rational>> ra;
  std::vector<Rational> rb;
  Eigen::MatrixXd a = parse_matrix_field(j.at("a"), "tableau a", &ra);
  Eigen::VectorXd b = parse_vector_field(j.at("b"), "tableau b", &rb);
  if (j.contains("s")) {
    const auto s = j.at("s").get<std::int64_t>();
    if (s != b.size()) throw ParseError("tableau 's' does not match the length of b");
  }
  try {
    ButcherTableau t(std::move(a), std::move(b));
    if (!ra.empty() && !rb.empty()) t.exact = RationalTableau{std::move(ra), std::move(rb)};
    return t;
  } catch (const DimensionMismatchError& e) {
    throw ParseError(std::string("invalid tableau: ") + e.what());
  }
}

PartitionedTableau parse_pair(const json& j) {
  if (!j.is_object() || !j.contains("first") || !j.contains("second")) {
    throw ParseError("partitioned tableau requires keys 'first' and 'second'");
  }
  try {
    return PartitionedTableau(parse_butcher(j.at("first")), parse_butcher(j.at("second")));
  } catch (const StageMismatchError& e) {
    throw ParseError(std::string("invalid pair: ") + e.what());
  }
}

GprkTableau parse_gprk(const json& j) {
  for (const char* key : {"B11", "B12", "B21", "B22", "A11", "A12", "A21", "A22"}) {
    if (!j.is_object() || !j.contains(key)) {
      throw ParseError(std::string("GPRK tableau requires key '") + key + "'");
    }
  }
  try {
    return GprkTableau(parse_vector_field(j.at("B11"), "B11", nullptr),
                       parse_vector_field(j.at("B12"), "B12", nullptr),
                       parse_vector_field(j.at("B21"), "B21", nullptr),
                       parse_vector_field(j.at("B22"), "B22", nullptr),
                       parse_matrix_field(j.at("A11"), "A11", nullptr),
                       parse_matrix_field(j.at("A12"), "A12", nullptr),
                       parse_matrix_field(j.at("A21"), "A21", nullptr),
                       parse_matrix_field(j.at("A22"), "A22", nullptr));
  } catch (const StageMismatchError& e) {
    throw ParseError(std::string("invalid GPRK tableau: ") + e.what());
  } catch (const DimensionMismatchError& e) {
    throw ParseError(std::string("invalid GPRK tableau: ") + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("JSON parse error in " + path.string() + ": " + e.what());
  }
  return j;
}

ButcherTableau read_butcher(const std::filesystem::path& path) {
  return parse_butcher(read_json_file(path));
}

PartitionedTableau read_pair(const std::filesystem::path& path) {
  return parse_pair(read_json_file(path));
}

GprkTableau read_gprk(const std::filesystem::path& path) {
  return parse_gprk(read_json_file(path));
}

json to_json(const ButcherTableau& t) {
  json j;
  j["s"] = t.stages();
  j["a"] = matrix_to_json(t.a);
  j["b"] = vector_to_json(t.b);
  return j;
}

json to_json(const PartitionedTableau& t) {
  json j;
  j["first"] = to_json(t.first);
  j["second"] = to_json(t.second);
  return j;
}

json to_json(const GprkTableau& t) {
  json j;
  j["s"] = t.stages();
  j["B11"] = vector_to_json(t.B11);
  j["B12"] = vector_to_json(t.B12);
  j["B21"] = vector_to_json(t.B21);
  j["B22"] = vector_to_json(t.B22);
  j["A11"] = matrix_to_json(t.A11);
  j["A12"] = matrix_to_json(t.A12);
  j["A21"] = matrix_to_json(t.A21);
  j["A22"] = matrix_to_json(t.A22);
  return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  const json& m = j.is_object() && j.contains("matrix") ? j.at("matrix") : j;
  return parse_matrix_field(m, "matrix file " + path.string(), nullptr);
}

Eigen::VectorXd read_vector(const std::filesystem::path& path) {
  // Try JSON first, fall back to whitespace/comma separated text.
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    const json j = json::parse(text);
    const json& v = j.is_object() && j.contains("vector") ? j.at("vector") : j;
    return parse_vector_field(v, "vector file " + path.string(), nullptr);
  } catch (const json::parse_error&) {
    std::vector<double> values;
    std::istringstream stream(text);
    std::string word;
    while (stream >> word) {
      for (char& c : word) {
        if (c == ',') c = ' ';
      }
      std::istringstream ws(word);
      double v = 0.0;
      while (ws >> v) values.push_back(v);
    }
    if (values.empty()) throw ParseError("vector file has no numeric entries: " + path.string());
    Eigen::VectorXd out(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) out(static_cast<Eigen::Index>(i)) = values[i];
    return out;
  }
}

namespace {

void write_csv_header(std::ostream& os, Eigen::Index d) {
  os << "t";
  for (Eigen::Index i = 1; i <= d; ++i) os << ",x_" << i;
  os << "\n";
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const Eigen::Index d = traj.states.front().size();
  write_csv_header(os, d);
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    os << format_double(static_cast<double>(n) * traj.h);
    for (Eigen::Index i = 0; i < d; ++i) os << "," << format_double(traj.states[n](i));
    os << "\n";
  }
}

void write_trajectory_csv(std::ostream& os, const PartitionedTrajectory& traj) {
  const Eigen::Index d = traj.states1.front().size() + traj.states2.front().size();
  write_csv_header(os, d);
  for (std::size_t n = 0; n < traj.states1.size(); ++n) {
    os << format_double(static_cast<double>(n) * traj.h);
    const Eigen::VectorXd x = traj.state(static_cast<int>(n));
    for (Eigen::Index i = 0; i < d; ++i) os << "," << format_double(x(i));
    os << "\n";
  }
}

namespace {

json stage_list(const std::vector<std::vector<Eigen::VectorXd>>& stages) {
  json out = json::array();
  for (const auto& per_step : stages) {
    json step = json::array();
    for (const auto& stage : per_step) step.push_back(vector_to_json(stage));
    out.push_back(step);
  }
  return out;
}

}  // namespace

json stages_json(const Trajectory& traj) {
  json j;
  j["h"] = traj.h;
  j["steps"] = traj.steps();
  j["stages"] = stage_list(traj.stages);
  return j;
}

json stages_json(const PartitionedTrajectory& traj) {
  json j;
  j["h"] = traj.h;
  j["steps"] = traj.steps();
  j["stages1"] = stage_list(traj.stages1);
  j["stages2"] = stage_list(traj.stages2);
  return j;
}

json gradient_report(const GradientResult& result) {
  json j;
  j["gradient"] = vector_to_json(result.gradient);
  j["pairing_drift"] = result.pairing_drift;
  j["iterations"] = {
      {"forward", result.forward_iterations},
      {"adjoint", result.adjoint_iterations},
  };
  j["forward_stage_residual"] = result.forward_stage_residual;
  return j;
}

void write_comparison_csv(std::ostream& os, const GradientComparison& cmp) {
  os << "coordinate,reference,candidate,abs_err\n";
  for (Eigen::Index i = 0; i < cmp.reference.size(); ++i) {
    os << i << "," << format_double(cmp.reference(i)) << "," << format_double(cmp.candidate(i))
       << "," << format_double(cmp.coordinate_abs_err(i)) << "\n";
  }
}

json comparison_summary(const GradientComparison& cmp) {
  json j;
  j["reference"] = cmp.reference_name;
  j["abs_err"] = cmp.abs_err;
  j["rel_err"] = cmp.rel_err;
  return j;
}

json condition_report_json(const ConditionReport& report) {
  json j;
  j["max_residual"] = report.max_residual;
  json entries = json::array();
  for (const auto& e : report.residuals) {
    entries.push_back({{"condition", e.condition}, {"i", e.i}, {"j", e.j},
                       {"residual", e.residual}});
  }
  j["residuals"] = entries;
  return j;
}

void print_condition_report(std::ostream& os, const ConditionReport& report) {
  // Per-family summary, then any violations above round-off.
  std::vector<std::string> families;
  for (const auto& e : report.residuals) {
    bool seen = false;
    for (const auto& f : families) seen = seen || f == e.condition;
    if (!seen) families.push_back(e.condition);
  }
  for (const auto& f : families) {
    os << "  condition " << f << ": max residual " << format_double(report.max_residual_for(f))
       << "\n";
  }
  os << "  overall max residual: " << format_double(report.max_residual) << "\n";
}

}  // namespace adjrk::io
