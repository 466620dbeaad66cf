#pragma once

/**
 * @file measure_estimation.hpp
 * @brief Monte Carlo densities, sphere coverages g_r(x)/A_r^d, the mean and
 *        mean-square identities for g_r, and the concentric-sphere scanner.
 */

#include "copies_lab/geometry_kernel.hpp"
#include "copies_lab/sampling.hpp"
#include "copies_lab/set_oracle.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace copies_lab {

/// Sphere directions drawn per outer point in the nested identity estimators.
inline constexpr std::int64_t kInnerSphereSamples = 32;

struct DensityEstimate {
  double fraction = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

namespace detail {

struct HitCount {
  std::int64_t hits = 0;
  std::int64_t total = 0;
};

inline DensityEstimate to_estimate(std::span<const HitCount> chunks) {
  HitCount sum;
  for (const auto& c : chunks) {
    sum.hits += c.hits;
    sum.total += c.total;
  }
  DensityEstimate out;
  out.samples = sum.total;
  if (sum.total > 0) {
    out.fraction = static_cast<double>(sum.hits) / static_cast<double>(sum.total);
    out.std_error = binomial_std_error(out.fraction, sum.total);
  }
  return out;
}

/// Midpoint lattice of the cube around `ball`, m points per axis, linear index -> point.
inline void lattice_point(const BallRegion& ball, std::int64_t m, std::int64_t index, Point& out) {
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    const std::int64_t digit = index % m;
    index /= m;
    out[k] = ball.center[k] + ball.radius * (-1.0 + 2.0 * (static_cast<double>(digit) + 0.5) /
                                                         static_cast<double>(m));
  }
}

}  // namespace detail

/**
 * Fraction of the ball occupied by the set. Monte Carlo mode draws uniform
 * points in the ball; lattice mode evaluates the cube midpoint lattice that
 * puts about `samples` nodes inside the ball.
 */
inline DensityEstimate ball_density(const SetOracle& oracle, const BallRegion& ball,
                                    const SamplerConfig& sampler) {
  validate(sampler);
  validate(ball);
  const int d = oracle.dimension();
  require(ball.center.size() == d, ErrorKind::InvalidArgument, "ball has the wrong dimension");

  if (sampler.mode == SamplingMode::LatticeGrid) {
    const double cube_share = unit_ball_volume(d) / std::pow(2.0, d);
    const auto m = static_cast<std::int64_t>(
        std::ceil(std::pow(static_cast<double>(sampler.samples) / cube_share, 1.0 / d)));
    std::int64_t nodes = 1;
    for (int k = 0; k < d; ++k) nodes *= m;
    const auto chunks = run_chunks<detail::HitCount>(
        sampler.seed, nodes, [&](std::int64_t, std::int64_t begin, std::int64_t end, Rng&) {
          detail::HitCount count;
          Point x(d);
          for (std::int64_t i = begin; i < end; ++i) {
            detail::lattice_point(ball, m, i, x);
            if (!contains(ball, x)) continue;
            ++count.total;
            if (oracle.contains(x)) ++count.hits;
          }
          return count;
        });
    return detail::to_estimate(chunks);
  }

  const auto chunks = run_chunks<detail::HitCount>(
      sampler.seed, sampler.samples,
      [&](std::int64_t, std::int64_t begin, std::int64_t end, Rng& rng) {
        detail::HitCount count;
        Point x(d);
        for (std::int64_t i = begin; i < end; ++i) {
          rng.in_ball(ball.center, ball.radius, x);
          ++count.total;
          if (oracle.contains(x)) ++count.hits;
        }
        return count;
      });
  return detail::to_estimate(chunks);
}

/// Centers region.center + step * k (k integer) inside the region, in
/// lexicographic order of k with the first coordinate most significant.
inline std::vector<Point> grid_points(const BallRegion& region, double step) {
  validate(region);
  require(step > 0.0 && std::isfinite(step), ErrorKind::InvalidArgument,
          "grid step must be positive");
  const auto d = region.center.size();
  const auto half = static_cast<std::int64_t>(std::floor(region.radius / step));
  std::vector<Point> points;
  std::vector<std::int64_t> index(static_cast<std::size_t>(d), -half);
  Point x(d);
  while (true) {
    for (Eigen::Index k = 0; k < d; ++k) {
      x[k] = region.center[k] + step * static_cast<double>(index[static_cast<std::size_t>(k)]);
    }
    if ((x - region.center).norm() <= region.radius) points.push_back(x);
    Eigen::Index k = d - 1;
    while (k >= 0 && index[static_cast<std::size_t>(k)] == half) {
      index[static_cast<std::size_t>(k)] = -half;
      --k;
    }
    if (k < 0) break;
    ++index[static_cast<std::size_t>(k)];
  }
  return points;
}

struct DenseBall {
  BallRegion ball;
  double density = 0.0;
  double std_error = 0.0;
  std::int64_t candidates = 0;
};

/**
 * Grid search for the center of the densest ball of the given radius.
 * Every candidate uses the same sample stream, so comparisons between
 * centers are not blurred by independent noise; ties keep the earliest
 * center in grid order.
 */
inline DenseBall densest_ball_scan(const SetOracle& oracle, double radius,
                                   const BallRegion& search_region, double grid_step,
                                   const SamplerConfig& sampler) {
  require(radius > 0.0, ErrorKind::InvalidArgument, "ball radius must be positive");
  require(grid_step > 0.0, ErrorKind::InvalidArgument, "grid step must be positive");
  const auto centers = grid_points(search_region, grid_step);
  require(!centers.empty(), ErrorKind::EmptyRegion, "search grid is empty");

  std::vector<DensityEstimate> estimates(centers.size());
  // Parallelism lives inside ball_density; the outer loop stays serial.
  for (std::size_t i = 0; i < centers.size(); ++i) {
    estimates[i] = ball_density(oracle, BallRegion{centers[i], radius}, sampler);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < centers.size(); ++i) {
    if (estimates[i].fraction > estimates[best].fraction) best = i;
  }
  return DenseBall{BallRegion{centers[best], radius}, estimates[best].fraction,
                   estimates[best].std_error, static_cast<std::int64_t>(centers.size())};
}

struct CoverageRecord {
  Point center;
  double radius = 0.0;
  double fraction = 0.0;  ///< estimate of g_r(x) / A_r^d
  double std_error = 0.0;
};

namespace detail {

/// i-th of n quasi-uniform directions (d = 2: equal angles; d = 3: Fibonacci spiral).
inline void lattice_direction(std::int64_t i, std::int64_t n, Point& out) {
  const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  if (out.size() == 2) {
    out << std::cos(2.0 * kPi * t), std::sin(2.0 * kPi * t);
    return;
  }
  const double z = 1.0 - 2.0 * t;
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = static_cast<double>(i) * kPi * (3.0 - std::sqrt(5.0));
  out << rho * std::cos(phi), rho * std::sin(phi), z;
}

}  // namespace detail

/// Fraction of the sphere S_radius(center) lying in the set.
inline CoverageRecord sphere_coverage(const SetOracle& oracle, const Point& center, double radius,
                                      const SamplerConfig& sampler) {
  validate(sampler);
  require(radius > 0.0, ErrorKind::InvalidArgument, "sphere radius must be positive");
  const int d = oracle.dimension();
  require(center.size() == d, ErrorKind::InvalidArgument, "center has the wrong dimension");
  const bool lattice = sampler.mode == SamplingMode::LatticeGrid;
  require(!lattice || d <= 3, ErrorKind::InvalidSampler,
          "lattice sphere sampling is available for d = 2, 3 only");

  const std::int64_t n = sampler.samples;
  const auto chunks = run_chunks<detail::HitCount>(
      sampler.seed, n, [&](std::int64_t, std::int64_t begin, std::int64_t end, Rng& rng) {
        detail::HitCount count;
        Point u(d);
        Point x(d);
        for (std::int64_t i = begin; i < end; ++i) {
          if (lattice) {
            detail::lattice_direction(i, n, u);
          } else {
            rng.unit_vector(u);
          }
          x = center + radius * u;
          ++count.total;
          if (oracle.contains(x)) ++count.hits;
        }
        return count;
      });
  const auto estimate = detail::to_estimate(chunks);
  return CoverageRecord{center, radius, estimate.fraction, estimate.std_error};
}

struct IdentityCheck {
  double lhs = 0.0;
  double lhs_std_error = 0.0;
  double rhs = 0.0;
  double rhs_std_error = 0.0;

  [[nodiscard]] double combined_std_error() const {
    return std::sqrt(lhs_std_error * lhs_std_error + rhs_std_error * rhs_std_error);
  }
};


namespace detail {

inline const BallRegion& require_bounded(const SetOracle& oracle, double radius,
                                         const BallRegion& region, const SamplerConfig& sampler) {
  require(oracle.is_bounded(), ErrorKind::UnboundedOracle,
          "identity checks need a bounded set, got '" + oracle.label() + "'");
  require(radius > 0.0, ErrorKind::InvalidArgument, "sphere radius must be positive");
  validate(region);
  validate(sampler, kInnerSphereSamples);
  require(sampler.mode == SamplingMode::UniformMonteCarlo, ErrorKind::InvalidSampler,
          "identity checks are Monte Carlo only");
  const auto& hint = *oracle.bound();
  const double reach = (hint.center - region.center).norm() + hint.radius + radius;
  require(reach <= region.radius * (1.0 + 1e-12), ErrorKind::InvalidArgument,
          "integration region must contain the bounding ball inflated by the sphere radius");
  return hint;
}

struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t count = 0;
};

inline void mean_and_error(std::span<const MeanAccumulator> chunks, double& mean,
                           double& std_error) {
  CompensatedSum<double> sum;
  CompensatedSum<double> sum_sq;
  std::int64_t count = 0;
  for (const auto& c : chunks) {
    sum += c.sum;
    sum_sq += c.sum_sq;
    count += c.count;
  }
  mean = count > 0 ? sum.value() / static_cast<double>(count) : 0.0;
  const double var =
      count > 0 ? std::max(0.0, sum_sq.value() / static_cast<double>(count) - mean * mean) : 0.0;
  std_error = count > 0 ? std::sqrt(var / static_cast<double>(count)) : 0.0;
}

/// Hits of kInnerSphereSamples random directions on S_radius(x).
inline std::int64_t sphere_hits(const SetOracle& oracle, const Point& x, double radius, Rng& rng,
                                Point& u, Point& y) {
  std::int64_t hits = 0;
  for (std::int64_t j = 0; j < kInnerSphereSamples; ++j) {
    rng.unit_vector(u);
    y = x + radius * u;
    if (oracle.contains(y)) ++hits;
  }
  return hits;
}

}  // namespace detail

/**
 * Checks int g_r(x) dx = A_r^d |E|. The left side nests sphere sampling
 * (kInnerSphereSamples directions) inside uniform outer points of the
 * integration region; the right side multiplies the sphere area by a Monte
 * Carlo volume of E over its bounding ball.
 */
inline IdentityCheck mean_identity_check(const SetOracle& oracle, double radius,
                                         const BallRegion& integration_region,
                                         const SamplerConfig& sampler) {
  const auto& hint = detail::require_bounded(oracle, radius, integration_region, sampler);
  const int d = oracle.dimension();
  const double area = surface_area(KernelSpec{d, radius});
  const double region_volume = ball_volume(d, integration_region.radius);
  const std::int64_t outer = sampler.samples / kInnerSphereSamples;

  const auto chunks = run_chunks<detail::MeanAccumulator>(
      substream(sampler.seed, 0), outer,
      [&](std::int64_t, std::int64_t begin, std::int64_t end, Rng& rng) {
        detail::MeanAccumulator acc;
        Point x(d);
        Point u(d);
        Point y(d);
        for (std::int64_t i = begin; i < end; ++i) {
          rng.in_ball(integration_region.center, integration_region.radius, x);
          double g = 0.0;
          if ((x - hint.center).norm() <= hint.radius + radius) {
            g = area * static_cast<double>(detail::sphere_hits(oracle, x, radius, rng, u, y)) /
                static_cast<double>(kInnerSphereSamples);
          }
          acc.sum += g;
          acc.sum_sq += g * g;
          ++acc.count;
        }
        return acc;
      });
  double mean = 0.0;
  double se = 0.0;
  detail::mean_and_error(chunks, mean, se);

  SamplerConfig volume_sampler = sampler;
  volume_sampler.seed = substream(sampler.seed, 1);
  const auto volume = ball_density(oracle, hint, volume_sampler);
  const double hint_volume = ball_volume(d, hint.radius);

  IdentityCheck out;
  out.lhs = region_volume * mean;
  out.lhs_std_error = region_volume * se;
  out.rhs = area * hint_volume * volume.fraction;
  out.rhs_std_error = area * hint_volume * volume.std_error;
  return out;
}

/**
 * Checks int g_r(x)^2 dx = iint_{E x E} K_r(y - z) dy dz.
 *
 * Left side: g_r(x)^2 is estimated without bias by the product of two
 * independent sphere-sampling estimates at each outer point. Right side:
 * `samples` independent pairs drawn uniformly from E by rejection from the
 * bounding ball, with |E| from the same rejection rate. Pairs whose
 * displacement hits a kernel singularity are redrawn.
 */
inline IdentityCheck meansq_identity_check(const SetOracle& oracle, double radius,
                                           const BallRegion& integration_region,
                                           const SamplerConfig& sampler) {
  const auto& hint = detail::require_bounded(oracle, radius, integration_region, sampler);
  const int d = oracle.dimension();
  const KernelSpec spec{d, radius};
  const double area = surface_area(spec);
  const double region_volume = ball_volume(d, integration_region.radius);
  const double hint_volume = ball_volume(d, hint.radius);
  const std::int64_t outer = sampler.samples / kInnerSphereSamples;

  const auto lhs_chunks = run_chunks<detail::MeanAccumulator>(
      substream(sampler.seed, 0), outer,
      [&](std::int64_t, std::int64_t begin, std::int64_t end, Rng& rng) {
        detail::MeanAccumulator acc;
        Point x(d);
        Point u(d);
        Point y(d);
        for (std::int64_t i = begin; i < end; ++i) {
          rng.in_ball(integration_region.center, integration_region.radius, x);
          double value = 0.0;
          if ((x - hint.center).norm() <= hint.radius + radius) {
            const double g1 = area * static_cast<double>(detail::sphere_hits(oracle, x, radius, rng, u, y)) /
                              static_cast<double>(kInnerSphereSamples);
            const double g2 = area * static_cast<double>(detail::sphere_hits(oracle, x, radius, rng, u, y)) /
                              static_cast<double>(kInnerSphereSamples);
            value = g1 * g2;
          }
          acc.sum += value;
          acc.sum_sq += value * value;
          ++acc.count;
        }
        return acc;
      });
  double lhs_mean = 0.0;
  double lhs_se = 0.0;
  detail::mean_and_error(lhs_chunks, lhs_mean, lhs_se);

  IdentityCheck out;
  out.lhs = region_volume * lhs_mean;
  out.lhs_std_error = region_volume * lhs_se;

  // A quick volume probe rules out sets too thin for rejection sampling.
  SamplerConfig probe = sampler;
  probe.seed = substream(sampler.seed, 1);
  probe.samples = std::min<std::int64_t>(sampler.samples, 100000);
  if (ball_density(oracle, hint, probe).fraction == 0.0) return out;

  struct PairAccumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t pairs = 0;
    std::int64_t proposals = 0;
    std::int64_t accepted = 0;
  };
  const auto rhs_chunks = run_chunks<PairAccumulator>(
      substream(sampler.seed, 2), sampler.samples,
      [&](std::int64_t, std::int64_t begin, std::int64_t end, Rng& rng) {
        PairAccumulator acc;
        Point y(d);
        Point z(d);
        auto draw = [&](Point& p) {
          do {
            rng.in_ball(hint.center, hint.radius, p);
            ++acc.proposals;
          } while (!oracle.contains(p));
          ++acc.accepted;
        };
        for (std::int64_t i = begin; i < end; ++i) {
          ExtendedValue k = ExtendedValue::infinity();
          while (k.is_infinite()) {
            draw(y);
            draw(z);
            k = kernel_value(spec, y - z);
          }
          acc.sum += k.value();
          acc.sum_sq += k.value() * k.value();
          ++acc.pairs;
        }
        return acc;
      });
  CompensatedSum<double> sum;
  CompensatedSum<double> sum_sq;
  std::int64_t pairs = 0;
  std::int64_t proposals = 0;
  std::int64_t accepted = 0;
  for (const auto& c : rhs_chunks) {
    sum += c.sum;
    sum_sq += c.sum_sq;
    pairs += c.pairs;
    proposals += c.proposals;
    accepted += c.accepted;
  }
  const double kernel_mean = sum.value() / static_cast<double>(pairs);
  const double kernel_var =
      std::max(0.0, sum_sq.value() / static_cast<double>(pairs) - kernel_mean * kernel_mean);
  const double acceptance = static_cast<double>(accepted) / static_cast<double>(proposals);
  const double volume = hint_volume * acceptance;
  const double volume_rel_se =
      std::sqrt((1.0 - acceptance) / (acceptance * static_cast<double>(proposals)));
  const double kernel_rel_se =
      std::sqrt(kernel_var / static_cast<double>(pairs)) / kernel_mean;

  out.rhs = volume * volume * kernel_mean;
  out.rhs_std_error = out.rhs * std::sqrt(4.0 * volume_rel_se * volume_rel_se +
                                          kernel_rel_se * kernel_rel_se);
  return out;
}

struct SphereScanReport {
  bool found = false;
  std::size_t index = 0;             ///< candidate index of the returned point
  Point point;
  std::vector<double> coverages;     ///< per radius, for the returned point
  std::size_t best_index = 0;        ///< best candidate seen (largest minimum coverage)
  double best_min_coverage = -1.0;
  std::size_t candidates_checked = 0;
};

/**
 * Returns the first candidate x (from index `start` on) that lies in E and
 * has sphere_coverage(x, r_i) > rho_prime for every radius. Coverage for
 * candidate c and radius j uses substream(seed, c * radii + j). Failure is a
 * report of the best candidate, not an error.
 */
inline SphereScanReport concentric_sphere_scan(const SetOracle& oracle,
                                               std::span<const Point> center_candidates,
                                               std::span<const double> radii, double rho_prime,
                                               const SamplerConfig& sampler,
                                               std::size_t start = 0) {
  require(!radii.empty(), ErrorKind::InvalidArgument, "need at least one radius");
  for (double r : radii) require(r > 0.0, ErrorKind::InvalidArgument, "radii must be positive");
  require(rho_prime >= 0.0 && rho_prime < 1.0, ErrorKind::InvalidArgument,
          "rho' must lie in [0, 1)");
  validate(sampler);

  SphereScanReport report;
  for (std::size_t c = start; c < center_candidates.size(); ++c) {
    const Point& x = center_candidates[c];
    ++report.candidates_checked;
    if (!oracle.contains(x)) continue;
    std::vector<double> coverages;
    double min_coverage = 1.0;
    for (std::size_t j = 0; j < radii.size(); ++j) {
      SamplerConfig local = sampler;
      local.seed = substream(sampler.seed, c * radii.size() + j);
      coverages.push_back(sphere_coverage(oracle, x, radii[j], local).fraction);
      min_coverage = std::min(min_coverage, coverages.back());
    }
    if (min_coverage > report.best_min_coverage) {
      report.best_min_coverage = min_coverage;
      report.best_index = c;
    }
    if (min_coverage > rho_prime) {
      report.found = true;
      report.index = c;
      report.point = x;
      report.coverages = std::move(coverages);
      return report;
    }
  }
  return report;
}

}  // namespace copies_lab
