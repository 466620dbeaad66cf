#pragma once

/**
 * @file serialization.hpp
 * @brief JSON (nlohmann) and CSV views of the result types.
 *
 * Doubles go through the shortest representation that parses back to the
 * same value, so a JSON fixture round-trips bit for bit.
 */

#include "copies_lab/certificate.hpp"
#include "copies_lab/constructions.hpp"
#include "copies_lab/core.hpp"
#include "copies_lab/discrepancy.hpp"
#include "copies_lab/geometry_kernel.hpp"
#include "copies_lab/measure_estimation.hpp"
#include "copies_lab/pattern_search.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace copies_lab {

using Json = nlohmann::json;

inline Json point_json(const Point& p) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) out.push_back(p[i]);
  return out;
}

inline Point point_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), ErrorKind::InvalidArgument, "a point is a non-empty array");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), ErrorKind::InvalidArgument, "point coordinates must be numbers");
    p[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return p;
}

/// Row-major: an array of rows.
inline Json matrix_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

inline Matrix matrix_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), ErrorKind::InvalidArgument, "a matrix is an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == cols,
            ErrorKind::InvalidArgument, "matrix rows must have equal length");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

/// Finite values as numbers, +inf as the string "inf".
inline Json extended_json(const ExtendedValue& v) {
  if (v.is_infinite()) return "inf";
  return v.value();
}

inline void to_json(Json& j, const KernelIntegral& k) {
  j = Json{{"lhs", k.value},
           {"rhs", k.expected},
           {"relative_error", k.relative_error},
           {"refinement_levels", k.refinement_levels},
           {"evaluations", k.evaluations}};
}

inline void to_json(Json& j, const ConvergenceRow& row) {
  j = Json{{"delta", row.delta},         {"phi", row.phi},       {"phi_std_error", row.phi_std_error},
           {"kernel", row.kernel},       {"gap", row.gap},       {"l1_gap", row.l1_gap},
           {"l1_gap_over_delta", row.l1_gap_over_delta}};
}

inline void to_json(Json& j, const ConvergenceTable& table) {
  j = Json{{"rows", table.rows}, {"fitted_order", table.fitted_order}};
}

inline void to_json(Json& j, const ChebyshevBound& b) {
  j = Json{{"lhs_measure_estimate", b.lhs_measure_estimate},
           {"rhs_bound", b.rhs_bound},
           {"mean", b.mean},
           {"deviating", b.deviating}};
}

inline void to_json(Json& j, const BallRegion& ball) {
  j = Json{{"center", point_json(ball.center)}, {"radius", ball.radius}};
}

inline void to_json(Json& j, const DensityEstimate& e) {
  j = Json{{"fraction", e.fraction}, {"std_error", e.std_error}};
}

inline void to_json(Json& j, const DenseBall& b) {
  j = Json{{"ball", b.ball},
           {"density", b.density},
           {"std_error", b.std_error},
           {"candidates", b.candidates}};
}

inline void to_json(Json& j, const CoverageRecord& c) {
  j = Json{{"center", point_json(c.center)},
           {"radius", c.radius},
           {"fraction", c.fraction},
           {"std_error", c.std_error}};
}

inline void to_json(Json& j, const IdentityCheck& c) {
  j = Json{{"lhs", c.lhs},
           {"lhs_std_error", c.lhs_std_error},
           {"rhs", c.rhs},
           {"rhs_std_error", c.rhs_std_error},
           {"combined_std_error", c.combined_std_error()}};
}

inline void to_json(Json& j, const SphereScanReport& r) {
  j = Json{{"found", r.found},
           {"index", r.index},
           {"point", r.found ? point_json(r.point) : Json(nullptr)},
           {"coverages", r.coverages},
           {"best_index", r.best_index},
           {"best_min_coverage", r.best_min_coverage},
           {"candidates_checked", r.candidates_checked}};
}

inline void to_json(Json& j, const AdmissibleScale& s) {
  j = Json{{"offset", s.offset}, {"r_squared", s.r_squared.value()}, {"r", s.r}};
}

inline void to_json(Json& j, const EpsilonOfN& e) {
  j = Json{{"value", e.value}, {"is_void", e.is_void}};
}

/// Exactly the certificate's fixture fields.
inline void to_json(Json& j, const AvoidanceCertificate& c) {
  j = Json{{"n", c.n},
           {"offset", c.scale.offset},
           {"r_squared", c.scale.r_squared.value()},
           {"eps0", c.eps0},
           {"a_grid_step", c.a_grid_step},
           {"max_discrepancy", c.max_discrepancy},
           {"slack", c.slack},
           {"verdict", c.verdict}};
}

/// Rebuilds r^2 from the offset, so the double-double constant is exact again.
inline AvoidanceCertificate certificate_from_json(const Json& j) {
  AvoidanceCertificate c;
  c.n = j.at("n").get<std::int64_t>();
  c.scale = admissible_scale(j.at("offset").get<std::int64_t>());
  c.eps0 = j.at("eps0").get<double>();
  c.a_grid_step = j.at("a_grid_step").get<double>();
  c.max_discrepancy = j.at("max_discrepancy").get<double>();
  c.slack = j.at("slack").get<double>();
  c.verdict = j.at("verdict").get<bool>();
  return c;
}

inline void to_json(Json& j, const CertificateRecheck& r) {
  j = Json{{"trials", r.trials}, {"hits", r.hits}};
  if (r.hits < r.trials) j["first_miss"] = Json{{"A", r.first_miss_A}, {"B", r.first_miss_B}};
}

inline void to_json(Json& j, const BourgainTripleSearch& s) {
  Json examples = Json::array();
  for (const auto& [a, b] : s.examples) examples.push_back(Json{{"A", a}, {"B", b}});
  j = Json{{"grid_points", s.grid_points}, {"solutions", s.solutions}, {"examples", examples}};
}

inline void to_json(Json& j, const ExpSumRow& row) {
  j = Json{{"m", row.m}, {"exact", row.exact}, {"analytic", row.analytic}};
}

inline void to_json(Json& j, const DiscrepancyReport& r) {
  j = Json{{"n", r.n},
           {"exact_star", r.exact_star},
           {"exact_extreme", r.exact_extreme},
           {"et_bound", r.et_bound},
           {"M", r.M},
           {"H", r.H},
           {"vdc_bound", r.vdc_bound},
           {"final_bound", r.final_bound},
           {"theorem_bound", r.theorem_bound},
           {"rows", r.rows}};
}

inline void to_json(Json& j, const DiophantineQuality& q) {
  j = Json{{"z", q.z},
           {"q_max", q.q_max},
           {"min_product", q.min_product},
           {"witness_q", q.witness_q},
           {"tail_min_product", q.tail_min_product},
           {"tail_witness_q", q.tail_witness_q}};
}

inline void to_json(Json& j, const AnalyticBound& b) {
  j = Json{{"H", b.H}, {"M", b.M}, {"value", b.value}};
}

inline void to_json(Json& j, const Pattern& p) {
  Json points = Json::array();
  for (const auto& x : p.points()) points.push_back(point_json(x));
  j = Json{{"dimension", p.dimension()}, {"points", points}};
}

inline Pattern pattern_from_json(const Json& j) {
  require(j.is_object() && j.contains("dimension") && j.contains("points"),
          ErrorKind::InvalidArgument, "pattern file needs \"dimension\" and \"points\"");
  const int d = j.at("dimension").get<int>();
  std::vector<Point> points;
  for (const auto& p : j.at("points")) {
    points.push_back(point_from_json(p));
    require(points.back().size() == d, ErrorKind::InvalidArgument,
            "pattern point does not match the declared dimension");
  }
  return Pattern(std::move(points));
}

inline Pattern load_pattern(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::InvalidArgument, "cannot open pattern file " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, "pattern file " + path + ": " + e.what());
  }
  return pattern_from_json(j);
}

inline void to_json(Json& j, const PatternStats& s) { j = Json{{"sep", s.sep}, {"diam", s.diam}}; }

inline void to_json(Json& j, const Placement& p) {
  j = Json{{"scale", p.scale},
           {"rotation", matrix_json(p.rotation)},
           {"translation", point_json(p.translation)}};
}

inline Placement placement_from_json(const Json& j) {
  Placement p;
  p.scale = j.at("scale").get<double>();
  p.rotation = matrix_from_json(j.at("rotation"));
  p.translation = point_from_json(j.at("translation"));
  require(is_rotation(p.rotation), ErrorKind::InvalidArgument, "placement rotation is not in SO(d)");
  return p;
}

inline void to_json(Json& j, const RotationMeasure& m) {
  j = Json{{"estimate", m.estimate},
           {"std_error", m.std_error},
           {"lower_bound", m.lower_bound},
           {"lower_bound_std_error", m.lower_bound_std_error},
           {"coverages", m.coverages}};
}

inline void to_json(Json& j, const RhoMinBounds& b) {
  j = Json{{"lower", b.lower}, {"upper", b.upper}};
}

struct RunManifest {
  std::string subcommand;
  std::map<std::string, Json> parameters;
  std::uint64_t seed = 42;
  std::string tool_version{kToolVersion};
  std::string timestamp;
};

inline void to_json(Json& j, const RunManifest& m) {
  Json params = Json::object();
  for (const auto& [k, v] : m.parameters) params[k] = v;
  j = Json{{"subcommand", m.subcommand},
           {"parameters", params},
           {"seed", m.seed},
           {"tool_version", m.tool_version},
           {"timestamp", m.timestamp}};
}

// ---- CSV ----

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<Json>> rows;  ///< numbers, strings or booleans
};

inline std::string format_number(double x) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, x);
  return ec == std::errc() ? std::string(buffer, end) : std::string("nan");
}

inline std::string csv_cell(const Json& v) {
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

inline CsvTable expsum_table(const DiscrepancyReport& report) {
  CsvTable t{{"m", "exact_sum", "analytic_bound"}, {}};
  for (const auto& row : report.rows) t.rows.push_back({row.m, row.exact, row.analytic});
  return t;
}

inline CsvTable convergence_csv(const ConvergenceTable& table) {
  CsvTable t{{"delta", "phi", "phi_std_error", "kernel", "gap", "l1_gap", "l1_gap_over_delta"}, {}};
  for (const auto& r : table.rows) {
    t.rows.push_back({r.delta, r.phi, r.phi_std_error, r.kernel, r.gap, r.l1_gap, r.l1_gap_over_delta});
  }
  return t;
}

/// Two-column key,value view of the scalar leaves of a JSON object.
inline CsvTable flatten_csv(const Json& j) {
  CsvTable t{{"key", "value"}, {}};
  auto walk = [&](auto&& self, const Json& node, const std::string& prefix) -> void {
    if (node.is_object()) {
      for (const auto& [k, v] : node.items()) self(self, v, prefix.empty() ? k : prefix + "." + k);
    } else if (node.is_array()) {
      for (std::size_t i = 0; i < node.size(); ++i) {
        self(self, node[i], prefix + "[" + std::to_string(i) + "]");
      }
    } else {
      t.rows.push_back({prefix, node});
    }
  };
  walk(walk, j, "");
  return t;
}

}  // namespace copies_lab
