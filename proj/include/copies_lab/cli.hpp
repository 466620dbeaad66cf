#pragma once

/**
 * @file cli.hpp
 * @brief `copies-lab` command line: one subcommand per module, JSON on
 *        stdout, optional CSV / plot-data / JSON files.
 *
 * Exit codes: 0 success, 1 computation failure (including a failed
 * --expect-pass), 2 usage error.
 */

#include "copies_lab/certificate.hpp"
#include "copies_lab/constructions.hpp"
#include "copies_lab/core.hpp"
#include "copies_lab/discrepancy.hpp"
#include "copies_lab/geometry_kernel.hpp"
#include "copies_lab/measure_estimation.hpp"
#include "copies_lab/pattern_search.hpp"
#include "copies_lab/sampling.hpp"
#include "copies_lab/serialization.hpp"
#include "copies_lab/set_oracle.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace copies_lab::cli {

/// What a subcommand hands back to the driver.
struct Outcome {
  Json result;
  std::optional<CsvTable> table;  ///< written by --csv (else the flattened result)
  std::optional<CsvTable> plot;   ///< written by --plot-data (else `table`)
  bool passed = true;             ///< consulted only under --expect-pass
  std::string failure;
};

namespace detail {

/// Integer that also accepts scientific notation ("1e5"), as long as it is integral.
inline std::int64_t parse_integer(const std::string& flag, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw CLI::ValidationError(flag, "expected an integer, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(value) || value != std::floor(value) ||
      std::abs(value) > 9.007199254740992e15) {
    throw CLI::ValidationError(flag, "expected an integer, got '" + text + "'");
  }
  return static_cast<std::int64_t>(value);
}

inline CLI::Option* add_integer(CLI::App* app, const std::string& name, std::int64_t& target,
                                const std::string& description) {
  const std::string flag = name.substr(0, name.find(','));
  auto* opt = app->add_option_function<std::string>(
      name, [&target, flag](const std::string& s) { target = parse_integer(flag, s); }, description);
  opt->default_str(std::to_string(target));
  return opt;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

/// Every option of the subcommand, given or defaulted, as text.
inline std::map<std::string, Json> collect_parameters(const CLI::App& sub) {
  std::map<std::string, Json> params;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      if (opt->get_expected_min() == 0) {
        params[name] = true;
      } else if (results.size() == 1) {
        params[name] = results.front();
      } else {
        params[name] = results;
      }
    } else if (opt->get_expected_min() == 0) {
      params[name] = false;
    } else {
      params[name] = opt->get_default_str();
    }
  }
  return params;
}

inline void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::InvalidArgument, "cannot write " + path);
  body(out);
}

inline Point vector_or_origin(const std::vector<double>& coords, int d, const std::string& flag) {
  if (coords.empty()) return Point::Zero(d);
  if (static_cast<int>(coords.size()) != d) {
    throw CLI::ValidationError(flag, "expected " + std::to_string(d) + " coordinates");
  }
  return Eigen::Map<const Point>(coords.data(), d);
}

}  // namespace detail

/// Oracle selection shared by `measure` and `search`.
struct SetOptions {
  std::string kind = "ball";
  double set_radius = 1.0;
  double gap = 0.05;
  double s = 0.1;
  double hole = 0.3;
  std::vector<double> normal;

  void add_to(CLI::App* app) {
    app->add_option("--set", kind, "ball | annular | bourgain | cell | halfspace | everything")
        ->capture_default_str()
        ->check(CLI::IsMember({"ball", "annular", "bourgain", "cell", "halfspace", "everything"}));
    app->add_option("--set-radius", set_radius, "radius of --set ball")->capture_default_str();
    app->add_option("--gap", gap, "middle gap eps of --set annular")->capture_default_str();
    app->add_option("--s", s, "parameter of --set bourgain")->capture_default_str();
    app->add_option("--hole", hole, "square hole side of --set cell")->capture_default_str();
    app->add_option("--normal", normal, "inward normal of --set halfspace (through the origin)");
  }

  [[nodiscard]] SetOracle build(int d) const {
    if (kind == "ball") return oracles::ball(Point::Zero(d), set_radius);
    if (kind == "annular") return to_oracle(AnnularSet{d, gap});
    if (kind == "bourgain") return to_oracle(BourgainSet{d, s});
    if (kind == "cell") return oracles::periodic_cell_complement(d, hole);
    if (kind == "halfspace") {
      Point n = Point::Zero(d);
      n[0] = 1.0;
      if (!normal.empty()) n = detail::vector_or_origin(normal, d, "--normal");
      return oracles::half_space(Point::Zero(d), n);
    }
    return oracles::everything(d);
  }
};

// ---------------------------------------------------------------- kernel

struct KernelOptions {
  int dim = 2;
  double radius = 1.0;
  bool check_integral = false;
  std::int64_t points = 200;
  std::optional<double> v_norm;
  bool phi_table = false;
  std::vector<double> deltas{1e-2, 1e-3, 1e-4};
  std::int64_t samples = 1000000;
  bool lattice = false;
};

inline Outcome run_kernel(const KernelOptions& o, std::uint64_t seed, std::ostream& err) {
  const KernelSpec spec{o.dim, o.radius};
  validate(spec);
  Outcome out;
  out.result = Json{{"dimension", o.dim}, {"radius", o.radius}, {"surface_area", surface_area(spec)}};
  if (o.v_norm) out.result["kernel_value"] = extended_json(kernel_value_at_norm(spec, *o.v_norm));
  if (o.check_integral) {
    err << "kernel: radial quadrature, " << o.points << " initial points\n";
    const auto integral = kernel_integral(spec, static_cast<int>(o.points));
    const Json fields = integral;
    for (const auto& [k, v] : fields.items()) out.result[k] = v;
    out.passed = integral.relative_error <= 1e-6;
    if (!out.passed) out.failure = "kernel integral relative error above 1e-6";
  }
  if (o.phi_table) {
    err << "kernel: overlap table over " << o.deltas.size() << " thicknesses\n";
    Point v = Point::Zero(o.dim);
    v[0] = o.v_norm.value_or(o.radius);
    const SamplerConfig sampler{seed, o.samples,
                                o.lattice ? SamplingMode::LatticeGrid : SamplingMode::UniformMonteCarlo};
    const auto table = phi_convergence_table(spec, v, o.deltas, sampler);
    out.result["phi_table"] = table;
    out.table = convergence_csv(table);
    if (o.deltas.size() >= 2 && !(table.fitted_order >= 0.9)) {
      out.passed = false;
      out.failure = "fitted convergence order below 0.9";
    }
  }
  return out;
}

// --------------------------------------------------------------- measure

struct MeasureOptions {
  int dim = 2;
  SetOptions set;
  std::string check = "mean";
  double radius = 0.5;
  std::int64_t samples = 4000000;
  bool lattice = false;
  std::vector<double> center;
  double region_radius = 0.0;
  double grid_step = 0.5;
};

inline Outcome run_measure(const MeasureOptions& o, std::uint64_t seed, std::ostream& err) {
  const SetOracle oracle = o.set.build(o.dim);
  const SamplerConfig sampler{seed, o.samples,
                              o.lattice ? SamplingMode::LatticeGrid : SamplingMode::UniformMonteCarlo};
  const Point center = detail::vector_or_origin(o.center, o.dim, "--center");
  Outcome out;
  out.result = Json{{"set", oracle.label()}, {"check", o.check}};
  err << "measure: " << o.check << " on " << oracle.label() << "\n";

  if (o.check == "density") {
    out.result["density"] = ball_density(oracle, BallRegion{center, o.radius}, sampler);
  } else if (o.check == "coverage") {
    out.result["coverage"] = sphere_coverage(oracle, center, o.radius, sampler);
  } else if (o.check == "densest") {
    const double region = o.region_radius > 0.0 ? o.region_radius : 4.0 * o.radius;
    out.result["densest"] =
        densest_ball_scan(oracle, o.radius, BallRegion{center, region}, o.grid_step, sampler);
  } else {
    require(oracle.is_bounded(), ErrorKind::UnboundedOracle,
            "identity checks need a bounded set (use --set ball)");
    const auto& hint = *oracle.bound();
    const double region = o.region_radius > 0.0 ? o.region_radius
                                                : (hint.center - center).norm() + hint.radius + o.radius;
    const BallRegion integration{center, region};
    const bool mean = o.check == "mean";
    const auto check = mean ? mean_identity_check(oracle, o.radius, integration, sampler)
                            : meansq_identity_check(oracle, o.radius, integration, sampler);
    out.result["identity"] = check;
    const double tolerance = mean ? 0.01 : 0.02;
    if (o.set.kind == "ball") {
      // |E| and A_r are exact for a ball, so the mean identity has a closed form.
      const double area = surface_area(KernelSpec{o.dim, o.radius});
      const double volume = ball_volume(o.dim, o.set.set_radius);
      if (mean) out.result["expected"] = area * volume;
    }
    const double reference = out.result.contains("expected") ? out.result["expected"].get<double>()
                                                             : check.rhs;
    const double rel = std::abs(check.lhs - reference) / std::abs(reference);
    out.result["relative_difference"] = rel;
    out.passed = rel <= tolerance;
    if (!out.passed) out.failure = "identity sides differ by more than the tolerance";
  }
  return out;
}

// ------------------------------------------------------------- construct

struct ConstructOptions {
  std::string what = "sequence";
  std::int64_t n = 32;
  std::int64_t offset = 1;
  double A = 0.0;
  double B = 0.0;
  std::optional<double> eps;
  double s = 0.1;
  double step = 1e-3;
};

inline Outcome run_construct(const ConstructOptions& o, std::ostream& err) {
  const auto scale = admissible_scale(o.offset);
  Outcome out;
  out.result = Json{{"scale", scale}};
  if (o.what == "bourgain") {
    err << "construct: triple search on a " << o.step << " grid\n";
    out.result["triple_search"] = bourgain_triple_search(scale.r_squared, o.s, o.step);
    return out;
  }
  const auto terms = quadratic_sequence(QuadraticSeq{scale.r_squared, o.A, o.B, o.n});
  if (o.n >= 2) out.result["epsilon_of_n"] = epsilon_of_n(o.n);
  out.result["terms"] = terms;
  CsvTable table{{"k", "term"}, {}};
  for (std::size_t k = 0; k < terms.size(); ++k) {
    table.rows.push_back({static_cast<std::int64_t>(k), terms[k]});
  }
  out.table = std::move(table);
  if (o.eps) {
    const auto hit = gap_hit_test(terms, *o.eps);
    out.result["gap_hit"] = hit ? Json(static_cast<std::int64_t>(*hit)) : Json(nullptr);
  }
  return out;
}

// ------------------------------------------------------------ certify-ap

struct CertifyOptions {
  std::int64_t n = 32;
  std::int64_t offset = 1;
  double eps0 = 0.0;  ///< 0: factor * (max grid discrepancy + slack)
  double factor = 1.05;
  double grid_step = 1e-4;
  std::int64_t recheck = 100000;
};

inline Outcome run_certify(const CertifyOptions& o, std::uint64_t seed, std::ostream& err) {
  const auto scale = admissible_scale(o.offset);
  const double eps0 = o.eps0 > 0.0 ? o.eps0 : auto_eps0(o.n, scale, o.grid_step, o.factor);
  err << "certify-ap: n = " << o.n << ", eps0 = " << eps0 << "\n";
  const auto cert = ap_avoidance_certificate(o.n, scale, eps0, o.grid_step);
  Outcome out;
  out.result = Json{{"certificate", cert}, {"worst_A", cert.worst_A}, {"grid_points", cert.grid_points}};
  if (o.recheck > 0) {
    err << "certify-ap: re-checking " << o.recheck << " random (A, B)\n";
    const auto recheck = recheck_certificate(cert, o.recheck, seed);
    out.result["recheck"] = recheck;
    if (recheck.hits < recheck.trials) {
      out.passed = false;
      out.failure = "a random (A, B) avoided the gap";
    }
  }
  if (!cert.verdict) {
    out.passed = false;
    out.failure = "certificate verdict is false";
  }
  return out;
}

// ----------------------------------------------------------- discrepancy

struct DiscrepancyOptions {
  std::int64_t n = 100000;
  std::int64_t offset = 1;
  double A = 0.0;
  double B = 0.0;
  bool full = false;
  std::int64_t M = 0;
  std::int64_t golden_q_max = 0;
  std::int64_t viete_range = 0;
};

inline Outcome run_discrepancy(const DiscrepancyOptions& o, std::ostream& err) {
  const auto scale = admissible_scale(o.offset);
  const QuadraticSeq params{scale.r_squared, o.A, o.B, o.n};
  Outcome out;
  err << "discrepancy: n = " << o.n << "\n";
  if (o.full) {
    const auto report = full_report(params);
    out.result = report;
    out.table = expsum_table(report);
    bool rows_ok = true;
    for (const auto& row : report.rows) rows_ok = rows_ok && row.exact <= row.analytic;
    out.passed = report.exact_extreme <= report.et_bound && rows_ok;
    if (!out.passed) out.failure = "discrepancy chain violated";
  } else {
    const auto seq = make_sequence(params);
    out.result = Json{{"n", o.n},
                      {"exact_star", star_discrepancy_exact(seq)},
                      {"exact_extreme", extreme_discrepancy_exact(seq)}};
    if (o.M > 0) {
      const double et = erdos_turan_bound(seq, o.M);
      out.result["M"] = o.M;
      out.result["et_bound"] = et;
      out.passed = out.result["exact_extreme"].get<double>() <= et;
      if (!out.passed) out.failure = "exact_extreme exceeds et_bound";
    }
  }
  if (o.golden_q_max > 0) {
    const auto quality = golden_quality(o.golden_q_max);
    out.result["golden_quality"] = quality;
    if (!(quality.min_product >= 1.0 / 3.0)) {
      out.passed = false;
      out.failure = "golden-ratio quality below 1/3";
    }
  }
  if (o.viete_range > 0) {
    std::int64_t min_abs = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t p = -o.viete_range; p <= o.viete_range; ++p) {
      for (std::int64_t q = -o.viete_range; q <= o.viete_range; ++q) {
        if (q == 0) continue;
        min_abs = std::min(min_abs, std::abs(viete_identity(p, q)));
      }
    }
    out.result["viete"] = Json{{"range", o.viete_range}, {"min_abs", min_abs}};
    if (min_abs < 1) {
      out.passed = false;
      out.failure = "p^2 + pq - q^2 vanished";
    }
  }
  return out;
}

// ---------------------------------------------------------------- search

inline SetOptions annular_default() {
  SetOptions set;
  set.kind = "annular";
  return set;
}

struct SearchOptions {
  int dim = 2;
  SetOptions set = annular_default();
  std::string mode = "similar";
  std::string pattern_file;
  std::string preset = "triangle";
  double r = 40.0;
  std::int64_t rotation_samples = 10000;
  double grid_step = 0.0;
  double region_radius = 0.0;
  std::vector<double> region_center;
  std::vector<double> x0;
  std::int64_t samples = 10000;
  std::int64_t density_samples = 2048;
  std::int64_t coverage_samples = 2048;
};

inline Pattern preset_pattern(const std::string& name, int d) {
  std::vector<std::vector<double>> coords;
  if (name == "triangle") {
    coords = {{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}};
  } else if (name == "collinear") {
    coords = {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};
  } else {
    coords = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  }
  std::vector<Point> points;
  for (const auto& c : coords) {
    Point p = Point::Zero(d);
    p[0] = c[0];
    p[1] = c[1];
    points.push_back(p);
  }
  return Pattern(std::move(points));
}

inline Outcome run_search(const SearchOptions& o, std::uint64_t seed, std::ostream& err) {
  const Pattern pattern = o.pattern_file.empty() ? preset_pattern(o.preset, o.dim)
                                                 : load_pattern(o.pattern_file);
  const int d = pattern.dimension();
  const SetOracle oracle = o.set.build(d);
  Outcome out;
  out.result = Json{{"set", oracle.label()}, {"mode", o.mode}, {"pattern", pattern},
                    {"pattern_stats", pattern_stats(pattern)}};
  if (o.mode == "stats") return out;

  if (o.mode == "rotation") {
    // Scaled copy of the pattern with its first point moved onto x0.
    const Point x0 = detail::vector_or_origin(o.x0, d, "--x0");
    std::vector<Point> moved;
    for (const auto& p : pattern.points()) moved.push_back(x0 + o.r * (p - pattern.points().front()));
    err << "search: rotation measure with " << o.samples << " samples\n";
    const auto measure = rotation_success_measure(oracle, x0, Pattern(std::move(moved)), o.samples, seed);
    out.result["rotation_measure"] = measure;
    const double sigma = std::hypot(measure.std_error, measure.lower_bound_std_error);
    out.passed = measure.estimate >= measure.lower_bound - 3.0 * sigma;
    if (!out.passed) out.failure = "estimate below the union bound by more than 3 sigma";
    return out;
  }

  SearchConfig config;
  config.rotation_samples = o.rotation_samples;
  config.translation_grid_step = o.grid_step;
  config.seed = seed;
  config.density_samples = o.density_samples;
  config.coverage_samples = o.coverage_samples;
  double reach = 0.0;
  for (const auto& p : pattern.points()) reach = std::max(reach, o.r * p.norm());
  config.candidate_region = BallRegion{detail::vector_or_origin(o.region_center, d, "--region-center"),
                                       o.region_radius > 0.0 ? o.region_radius : 2.0 * reach};
  out.result["candidate_region"] = config.candidate_region;
  err << "search: " << o.mode << " copy at r = " << o.r << "\n";

  if (o.mode == "translated") {
    const auto z = find_translated_copy(oracle, pattern, o.r, config);
    out.result["found"] = z.has_value();
    out.result["translation"] = z ? point_json(*z) : Json(nullptr);
    out.result["verified"] = z && verify_translation(oracle, pattern, o.r, *z);
    out.passed = z.has_value();
  } else {
    const auto placement = find_similar_copy(oracle, pattern, o.r, config);
    out.result["found"] = placement.has_value();
    out.result["placement"] = placement ? Json(*placement) : Json(nullptr);
    out.result["verified"] = placement && verify_placement(oracle, pattern, *placement);
    out.passed = placement.has_value();
  }
  if (!out.passed) out.failure = "no copy found within the search budget";
  return out;
}

// ---------------------------------------------------------------- bounds

inline Outcome run_bounds(std::int64_t n) {
  Outcome out;
  out.result = rho_min_bounds(n);
  // Plot series on a quarter-decade grid from 10^4 up to max(n, 10^12).
  CsvTable plot{{"n", "final_bound", "theorem_bound", "rho_lower", "rho_upper"}, {}};
  const double top = std::log10(std::max<double>(static_cast<double>(n), 1e12));
  for (int k = 16; k <= static_cast<int>(std::floor(4.0 * top)); ++k) {
    const auto m = static_cast<std::int64_t>(std::llround(std::pow(10.0, 0.25 * k)));
    const auto rho = rho_min_bounds(m);
    plot.rows.push_back({m, final_bound(m).value, theorem_bound(m), rho.lower, rho.upper});
  }
  out.plot = std::move(plot);
  return out;
}

// ---------------------------------------------------------------- driver

/// Runs one command line (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sphere kernels, densities, pattern copies and the annular counterexample",
               "copies-lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::int64_t seed = 42;
  std::int64_t threads = 0;
  std::string csv_path;
  std::string plot_path;
  std::string json_path;
  bool expect_pass = false;

  auto add_common = [&](CLI::App* sub) {
    detail::add_integer(sub, "--seed", seed, "random seed");
    detail::add_integer(sub, "--threads", threads, "worker cap (0: COPIES_LAB_THREADS or all cores)");
    sub->add_option("--csv", csv_path, "write a CSV table to this path");
    sub->add_option("--plot-data", plot_path, "write plot series (CSV) to this path");
    sub->add_option("--json-out", json_path, "also write the JSON report to this path");
    sub->add_flag("--expect-pass", expect_pass, "exit 1 unless the run's own check passes");
  };

  KernelOptions kernel;
  auto* kernel_cmd = app.add_subcommand("kernel", "sphere area, kernel values, kernel integral, overlap table");
  kernel_cmd->add_option("--dim", kernel.dim, "dimension d >= 2")->capture_default_str();
  kernel_cmd->add_option("--radius", kernel.radius, "sphere radius r")->capture_default_str();
  kernel_cmd->add_flag("--check-integral", kernel.check_integral, "compare the kernel integral with A^2");
  detail::add_integer(kernel_cmd, "--points", kernel.points, "initial quadrature points (>= 100)");
  kernel_cmd->add_option("--v-norm", kernel.v_norm, "evaluate the kernel at |v|");
  kernel_cmd->add_flag("--phi-table", kernel.phi_table, "tabulate annulus overlaps against the kernel");
  kernel_cmd->add_option("--deltas", kernel.deltas, "shell thicknesses, strictly decreasing")
      ->capture_default_str();
  detail::add_integer(kernel_cmd, "--samples", kernel.samples, "samples per thickness");
  kernel_cmd->add_flag("--lattice", kernel.lattice, "deterministic lattice instead of Monte Carlo");
  add_common(kernel_cmd);

  MeasureOptions measure;
  auto* measure_cmd = app.add_subcommand("measure", "densities, sphere coverage, mean identities");
  measure_cmd->add_option("--dim", measure.dim, "dimension d >= 2")->capture_default_str();
  measure.set.add_to(measure_cmd);
  measure_cmd->add_option("--check", measure.check, "mean | meansq | density | coverage | densest")
      ->capture_default_str()
      ->check(CLI::IsMember({"mean", "meansq", "density", "coverage", "densest"}));
  measure_cmd->add_option("--radius", measure.radius, "sphere or ball radius")->capture_default_str();
  detail::add_integer(measure_cmd, "--samples", measure.samples, "Monte Carlo budget");
  measure_cmd->add_flag("--lattice", measure.lattice, "deterministic lattice (density, coverage)");
  measure_cmd->add_option("--center", measure.center, "ball / sphere / region center");
  measure_cmd->add_option("--region-radius", measure.region_radius, "integration or search region radius")
      ->capture_default_str();
  measure_cmd->add_option("--grid-step", measure.grid_step, "grid step of --check densest")
      ->capture_default_str();
  add_common(measure_cmd);

  ConstructOptions construct;
  auto* construct_cmd = app.add_subcommand("construct", "quadratic radial sequences, admissible scales");
  construct_cmd->add_option("--what", construct.what, "sequence | bourgain")
      ->capture_default_str()
      ->check(CLI::IsMember({"sequence", "bourgain"}));
  detail::add_integer(construct_cmd, "--n", construct.n, "sequence length");
  detail::add_integer(construct_cmd, "--offset", construct.offset, "m in r^2 = m + golden ratio");
  construct_cmd->add_option("--A", construct.A, "linear coefficient")->capture_default_str();
  construct_cmd->add_option("--B", construct.B, "constant term")->capture_default_str();
  construct_cmd->add_option("--eps", construct.eps, "report the first term in the middle gap");
  construct_cmd->add_option("--s", construct.s, "Bourgain parameter")->capture_default_str();
  construct_cmd->add_option("--step", construct.step, "(A, B) grid step for --what bourgain")
      ->capture_default_str();
  add_common(construct_cmd);

  CertifyOptions certify;
  auto* certify_cmd = app.add_subcommand("certify-ap", "certificate that no n-term AP copy fits");
  detail::add_integer(certify_cmd, "--n", certify.n, "progression length");
  detail::add_integer(certify_cmd, "--offset", certify.offset, "m in r^2 = m + golden ratio");
  certify_cmd->add_option("--eps0", certify.eps0, "gap to certify (0: automatic)")->capture_default_str();
  certify_cmd->add_option("--factor", certify.factor, "automatic eps0 multiplier")->capture_default_str();
  certify_cmd->add_option("--grid-step", certify.grid_step, "A grid step")->capture_default_str();
  detail::add_integer(certify_cmd, "--recheck", certify.recheck, "random (A, B) re-checks");
  add_common(certify_cmd);

  DiscrepancyOptions disc;
  auto* disc_cmd = app.add_subcommand("discrepancy", "exact discrepancy and the bound chain");
  detail::add_integer(disc_cmd, "--n", disc.n, "sequence length");
  detail::add_integer(disc_cmd, "--offset", disc.offset, "m in r^2 = m + golden ratio");
  disc_cmd->add_option("--A", disc.A, "linear coefficient")->capture_default_str();
  disc_cmd->add_option("--B", disc.B, "constant term")->capture_default_str();
  disc_cmd->add_flag("--full", disc.full, "full report with exponential sums");
  detail::add_integer(disc_cmd, "--M", disc.M, "Erdos-Turan truncation (without --full)");
  detail::add_integer(disc_cmd, "--golden-q-max", disc.golden_q_max, "golden-ratio quality up to q");
  detail::add_integer(disc_cmd, "--viete-range", disc.viete_range, "check p^2 + pq - q^2 for |p|, |q| <= R");
  add_common(disc_cmd);

  SearchOptions search;
  auto* search_cmd = app.add_subcommand("search", "translated / similar copies, rotation measure");
  search_cmd->add_option("--dim", search.dim, "dimension for presets")->capture_default_str();
  search.set.add_to(search_cmd);
  search_cmd->get_option("--set")->default_str("annular");
  search_cmd->add_option("--mode", search.mode, "similar | translated | rotation | stats")
      ->capture_default_str()
      ->check(CLI::IsMember({"similar", "translated", "rotation", "stats"}));
  search_cmd->add_option("--pattern", search.pattern_file, "pattern JSON file")->check(CLI::ExistingFile);
  search_cmd->add_option("--preset", search.preset, "triangle | collinear | square")
      ->capture_default_str()
      ->check(CLI::IsMember({"triangle", "collinear", "square"}));
  search_cmd->add_option("--r", search.r, "scale")->capture_default_str();
  detail::add_integer(search_cmd, "--rotation-samples", search.rotation_samples, "rotations per center");
  search_cmd->add_option("--grid-step", search.grid_step, "grid step (0: r sep / 10)")->capture_default_str();
  search_cmd->add_option("--region-radius", search.region_radius, "candidate region radius (0: 2 r |P|)")
      ->capture_default_str();
  search_cmd->add_option("--region-center", search.region_center, "candidate region center");
  search_cmd->add_option("--x0", search.x0, "rotation center for --mode rotation");
  detail::add_integer(search_cmd, "--samples", search.samples, "rotations for --mode rotation");
  detail::add_integer(search_cmd, "--density-samples", search.density_samples, "samples per density probe");
  detail::add_integer(search_cmd, "--coverage-samples", search.coverage_samples, "samples per sphere");
  add_common(search_cmd);

  std::int64_t bounds_n = 2;
  auto* bounds_cmd = app.add_subcommand("bounds", "known bounds on rho_min(n)");
  detail::add_integer(bounds_cmd, "--n", bounds_n, "pattern size")->required();
  add_common(bounds_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  if (threads < 0 || seed < 0) {
    err << "usage error: " << (threads < 0 ? "--threads" : "--seed") << " must be non-negative\n";
    return 2;
  }
  set_thread_count(static_cast<int>(threads));
  const auto useed = static_cast<std::uint64_t>(seed);

  Outcome outcome;
  try {
    if (name == "kernel") outcome = run_kernel(kernel, useed, err);
    else if (name == "measure") outcome = run_measure(measure, useed, err);
    else if (name == "construct") outcome = run_construct(construct, err);
    else if (name == "certify-ap") outcome = run_certify(certify, useed, err);
    else if (name == "discrepancy") outcome = run_discrepancy(disc, err);
    else if (name == "search") outcome = run_search(search, useed, err);
    else outcome = run_bounds(bounds_n);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    const bool usage = e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::InvalidSampler;
    err << (usage ? "usage error: " : "error: ") << e.what() << "\n";
    return usage ? 2 : 1;
  }

  RunManifest manifest;
  manifest.subcommand = name;
  manifest.parameters = detail::collect_parameters(*sub);
  manifest.seed = useed;
  manifest.timestamp = detail::utc_timestamp();
  const Json report{{"manifest", manifest}, {"result", outcome.result}};
  const std::string text = report.dump(2);

  try {
    if (!json_path.empty()) detail::write_file(json_path, [&](std::ostream& f) { f << text << "\n"; });
    if (!csv_path.empty()) {
      const CsvTable table = outcome.table ? *outcome.table : flatten_csv(outcome.result);
      detail::write_file(csv_path, [&](std::ostream& f) { write_csv(f, table); });
    }
    if (!plot_path.empty()) {
      const CsvTable table = outcome.plot    ? *outcome.plot
                             : outcome.table ? *outcome.table
                                             : flatten_csv(outcome.result);
      detail::write_file(plot_path, [&](std::ostream& f) { write_csv(f, table); });
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  out << text << "\n";
  if (expect_pass && !outcome.passed) {
    err << "expectation failed: " << outcome.failure << "\n";
    return 1;
  }
  return 0;
}

}  // namespace copies_lab::cli
