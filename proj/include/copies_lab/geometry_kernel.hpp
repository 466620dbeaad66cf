#pragma once

/**
 * @file geometry_kernel.hpp
 * @brief Sphere areas, the annulus-overlap kernel K_r^(d), overlap
 *        estimates for thin annuli and the Chebyshev deviation bound.
 *
 * For r > 0 and displacement v in R^d the kernel is
 *
 *     K(v) = 2 r^2 pi^((d-1)/2) (r^2 - |v|^2/4)^((d-3)/2) / (Gamma((d-1)/2) |v|)
 *
 * for 0 < |v| < 2r, zero beyond 2r and +infinity at v = 0 and |v| = 2r.
 * It is the limit of delta^-2 |A(0) cap A(v)| for annuli of inner radius r
 * and thickness delta, and integrates to the squared sphere area.
 */

#include "copies_lab/core.hpp"
#include "copies_lab/numeric.hpp"
#include "copies_lab/sampling.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace copies_lab {

/// Absolute tolerance on |v| when deciding the singular kernel cases.
inline constexpr double kSingularTolerance = 1e-12;
inline constexpr std::int64_t kMinOverlapSamples = 10000;

struct KernelSpec {
  int dimension = 2;
  double radius = 1.0;
};

inline void validate(const KernelSpec& spec) {
  require(spec.dimension >= 2, ErrorKind::InvalidArgument, "dimension must be at least 2");
  require(spec.radius > 0.0 && std::isfinite(spec.radius), ErrorKind::InvalidArgument,
          "radius must be positive");
}

struct AnnulusSpec {
  KernelSpec kernel;
  double thickness = 0.01;
  Point center;  ///< empty means the origin
};

inline void validate(const AnnulusSpec& spec) {
  validate(spec.kernel);
  require(spec.thickness > 0.0 && spec.thickness < spec.kernel.radius,
          ErrorKind::InvalidArgument, "annulus thickness must lie in (0, radius)");
  require(spec.center.size() == 0 || spec.center.size() == spec.kernel.dimension,
          ErrorKind::InvalidArgument, "annulus center has the wrong dimension");
}

/// pi^(d/2) / Gamma(d/2 + 1).
inline double unit_ball_volume(int d) { return std::pow(kPi, 0.5 * d) / gamma_half_integer(d + 2); }

inline double ball_volume(int d, double radius) { return unit_ball_volume(d) * std::pow(radius, d); }

/// (d-1)-dimensional area of the sphere of radius r in R^d.
inline double surface_area(const KernelSpec& spec) {
  validate(spec);
  const int d = spec.dimension;
  return d * std::pow(spec.radius, d - 1) * std::pow(kPi, 0.5 * d) / gamma_half_integer(d + 2);
}

/// Volume of B_{r+delta} \ B_r, free of cancellation for small delta.
inline double annulus_volume(int d, double radius, double thickness) {
  return ball_volume(d, radius) * std::expm1(d * std::log1p(thickness / radius));
}

/// Kernel as a function of |v| only.
inline ExtendedValue kernel_value_at_norm(const KernelSpec& spec, double norm) {
  validate(spec);
  const double r = spec.radius;
  const int d = spec.dimension;
  if (norm <= kSingularTolerance || std::abs(norm - 2.0 * r) <= kSingularTolerance) {
    return ExtendedValue::infinity();
  }
  if (norm > 2.0 * r) return ExtendedValue::finite(0.0);
  const double base = r * r - 0.25 * norm * norm;
  const double value = 2.0 * r * r * std::pow(kPi, 0.5 * (d - 1)) * std::pow(base, 0.5 * (d - 3)) /
                       (gamma_half_integer(d - 1) * norm);
  return ExtendedValue::finite(value);
}

inline ExtendedValue kernel_value(const KernelSpec& spec, const Point& v) {
  require(v.size() == spec.dimension, ErrorKind::InvalidArgument,
          "displacement has the wrong dimension");
  return kernel_value_at_norm(spec, v.norm());
}

namespace detail {

/// Integral of sin^k over [0, alpha], by the reduction formula.
inline double sine_power_integral(int k, double alpha) {
  const double s = std::sin(alpha);
  const double c = std::cos(alpha);
  double even = alpha;      // I_0
  double odd = 1.0 - c;     // I_1
  if (k == 0) return even;
  if (k == 1) return odd;
  double current = 0.0;
  for (int j = 2; j <= k; ++j) {
    double& prev = (j % 2 == 0) ? even : odd;
    current = -std::pow(s, j - 1) * c / j + (j - 1.0) / j * prev;
    prev = current;
  }
  return current;
}

/// Fraction of S^{d-1} whose polar angle from a fixed axis lies in [lo, hi].
inline double polar_cap_fraction(int d, double lo, double hi) {
  if (hi <= lo) return 0.0;
  if (d == 2) return (hi - lo) / kPi;
  const int k = d - 2;
  return (sine_power_integral(k, hi) - sine_power_integral(k, lo)) / sine_power_integral(k, kPi);
}

}  // namespace detail

struct OverlapEstimate {
  double value = 0.0;      ///< estimate of phi_delta(v)
  double std_error = 0.0;
  std::int64_t samples = 0;
};

/**
 * Estimates phi_delta(v) = delta^-2 |A_{r,r+delta}(0) cap A_{r,r+delta}(v)|.
 *
 * Points of the first annulus are drawn radius-first from its exact radial
 * law; membership of the second annulus depends only on the radius and the
 * polar angle to v, so the membership test is integrated over the angle in
 * closed form (a conditional Monte Carlo estimator, still unbiased). In
 * lattice-grid mode the radial quantiles are midpoints and std_error is the
 * random-sampling formula, an upper bound in practice.
 */
inline OverlapEstimate annulus_overlap(const AnnulusSpec& spec, const Point& v,
                                       const SamplerConfig& sampler) {
  validate(spec);
  validate(sampler, kMinOverlapSamples);
  const int d = spec.kernel.dimension;
  require(v.size() == d, ErrorKind::InvalidArgument, "displacement has the wrong dimension");

  const double r = spec.kernel.radius;
  const double delta = spec.thickness;
  const double outer = r + delta;
  const double s = v.norm();
  const double shell = annulus_volume(d, r, delta);
  const double scale = shell / (delta * delta);

  OverlapEstimate out;
  out.samples = sampler.samples;
  if (s > 2.0 * outer) return out;
  if (s == 0.0) {
    out.value = scale;
    return out;
  }

  const double growth = std::expm1(d * std::log1p(delta / r));
  auto fraction_at = [&](double u) {
    const double rho = r * std::exp(std::log1p(u * growth) / d);
    const double c_inner = (rho * rho + s * s - r * r) / (2.0 * rho * s);
    const double c_outer = (rho * rho + s * s - outer * outer) / (2.0 * rho * s);
    const double lo = std::acos(std::clamp(c_inner, -1.0, 1.0));
    const double hi = std::acos(std::clamp(c_outer, -1.0, 1.0));
    return detail::polar_cap_fraction(d, lo, hi);
  };

  struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  const std::int64_t n = sampler.samples;
  const bool lattice = sampler.mode == SamplingMode::LatticeGrid;
  auto chunks = run_chunks<Moments>(sampler.seed, n, [&](std::int64_t, std::int64_t begin,
                                                         std::int64_t end, Rng& rng) {
    CompensatedSum<double> sum;
    CompensatedSum<double> sum_sq;
    for (std::int64_t i = begin; i < end; ++i) {
      const double u = lattice ? (static_cast<double>(i) + 0.5) / static_cast<double>(n) : rng.uniform();
      const double f = fraction_at(u);
      sum += f;
      sum_sq += f * f;
    }
    return Moments{sum.value(), sum_sq.value()};
  });
  CompensatedSum<double> total;
  CompensatedSum<double> total_sq;
  for (const auto& c : chunks) {
    total += c.sum;
    total_sq += c.sum_sq;
  }
  const double mean = total.value() / static_cast<double>(n);
  const double var = std::max(0.0, total_sq.value() / static_cast<double>(n) - mean * mean);
  out.value = scale * mean;
  out.std_error = scale * std::sqrt(var / static_cast<double>(n));
  return out;
}

struct KernelIntegral {
  double value = 0.0;
  double expected = 0.0;  ///< surface_area^2
  double relative_error = 0.0;
  int refinement_levels = 0;
  int evaluations = 0;
};

/**
 * Integral of K over R^d, reduced to a radial integral and mapped onto [0, 1]
 * by rho = 2 r sqrt(t), which leaves the symmetric integrand
 * t^a (1 - t)^a with a = (d - 3)/2. Endpoint singularities (d = 2) are
 * handled by the double-exponential node clustering.
 */
inline KernelIntegral kernel_integral(const KernelSpec& spec, int quadrature_points) {
  validate(spec);
  require(quadrature_points >= 100, ErrorKind::InvalidArgument,
          "kernel_integral needs at least 100 quadrature points");
  const int d = spec.dimension;
  const double r = spec.radius;
  const double a = 0.5 * (d - 3);

  const auto radial = tanh_sinh_unit(
      [a](double t, double tc) { return std::pow(t, a) * std::pow(tc, a); }, quadrature_points);

  const double prefactor = 2.0 * r * r * std::pow(kPi, 0.5 * (d - 1)) / gamma_half_integer(d - 1);
  const double jacobian = std::pow(2.0, d - 2) * std::pow(r, 2 * d - 4);
  const double unit_area = surface_area(KernelSpec{d, 1.0});

  KernelIntegral out;
  out.value = prefactor * jacobian * radial.value * unit_area;
  const double area = surface_area(spec);
  out.expected = area * area;
  out.relative_error = std::abs(out.value - out.expected) / out.expected;
  out.refinement_levels = radial.levels;
  out.evaluations = radial.evaluations;
  return out;
}

struct ConvergenceRow {
  double delta = 0.0;
  double phi = 0.0;
  double phi_std_error = 0.0;
  double kernel = 0.0;
  double gap = 0.0;
  /// delta^-2 |A_{r,r+delta}|^2 - (A_r^d)^2 from exact ball volumes.
  double l1_gap = 0.0;
  double l1_gap_over_delta = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double fitted_order = 0.0;  ///< least-squares slope of log gap against log delta
};

/// Least-squares slope of log(y) against log(x).
inline double log_log_slope(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidArgument,
          "slope fit needs at least two points");
  double mx = 0.0;
  double my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

inline ConvergenceTable phi_convergence_table(const KernelSpec& spec, const Point& v,
                                              std::span<const double> deltas,
                                              const SamplerConfig& sampler) {
  validate(spec);
  const auto kernel = kernel_value(spec, v);
  require(kernel.is_finite() && v.norm() < 2.0 * spec.radius, ErrorKind::SingularPoint,
          "convergence table needs 0 < |v| < 2r");
  require(!deltas.empty(), ErrorKind::InvalidArgument, "no thickness values given");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    require(deltas[i] > 0.0 && deltas[i] < spec.radius, ErrorKind::InvalidArgument,
            "thickness values must lie in (0, radius)");
    require(i == 0 || deltas[i] < deltas[i - 1], ErrorKind::InvalidArgument,
            "thickness values must be strictly decreasing");
  }

  const double area = surface_area(spec);
  ConvergenceTable table;
  std::vector<double> xs;
  std::vector<double> gaps;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double delta = deltas[i];
    SamplerConfig local = sampler;
    local.seed = substream(sampler.seed, i);
    const auto phi = annulus_overlap(AnnulusSpec{spec, delta, {}}, v, local);

    ConvergenceRow row;
    row.delta = delta;
    row.phi = phi.value;
    row.phi_std_error = phi.std_error;
    row.kernel = kernel.value();
    row.gap = std::abs(phi.value - kernel.value());
    const double shell = annulus_volume(spec.dimension, spec.radius, delta);
    row.l1_gap = shell * shell / (delta * delta) - area * area;
    row.l1_gap_over_delta = row.l1_gap / delta;
    table.rows.push_back(row);
    xs.push_back(delta);
    gaps.push_back(row.gap);
  }
  bool positive = deltas.size() >= 2;
  for (double g : gaps) positive = positive && g > 0.0;
  table.fitted_order = positive ? log_log_slope(xs, gaps) : std::nan("");
  return table;
}

struct ChebyshevQuery {
  std::vector<double> sample_values;
  double domain_measure = 1.0;
  double theta = 1.0;
};

struct ChebyshevBound {
  double lhs_measure_estimate = 0.0;
  double rhs_bound = 0.0;
  double mean = 0.0;
  std::int64_t deviating = 0;
};

/**
 * Sample version of the mean-deviation bound: the measure of the part of D
 * where g deviates from its mean by at least theta * mean is at most
 * theta^-2 |D| (|D| int g^2 / (int g)^2 - 1). Integrals are sample-mean
 * quadratures, so the inequality holds exactly for the empirical measure.
 */
inline ChebyshevBound chebyshev_bound(const ChebyshevQuery& query) {
  require(!query.sample_values.empty(), ErrorKind::InvalidArgument, "no sample values");
  require(query.theta > 0.0, ErrorKind::InvalidArgument, "theta must be positive");
  require(query.domain_measure > 0.0, ErrorKind::InvalidArgument,
          "domain measure must be positive");
  CompensatedSum<double> sum;
  for (double g : query.sample_values) {
    require(g >= 0.0, ErrorKind::InvalidArgument, "sample values must be non-negative");
    sum += g;
  }
  require(sum.value() > 0.0, ErrorKind::ZeroMean, "sample values sum to zero");

  const double n = static_cast<double>(query.sample_values.size());
  const double mean = sum.value() / n;
  CompensatedSum<double> centered_sq;
  ChebyshevBound out;
  out.mean = mean;
  for (double g : query.sample_values) {
    const double dev = g - mean;
    centered_sq += dev * dev;
    if (std::abs(dev) >= query.theta * mean) ++out.deviating;
  }
  // |D| int g^2 / (int g)^2 - 1 equals the relative variance of the samples.
  const double relative_variance = centered_sq.value() / n / (mean * mean);
  out.lhs_measure_estimate = query.domain_measure * static_cast<double>(out.deviating) / n;
  out.rhs_bound = query.domain_measure * relative_variance / (query.theta * query.theta);
  return out;
}

}  // namespace copies_lab
