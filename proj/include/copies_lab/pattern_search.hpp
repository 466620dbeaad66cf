#pragma once

/**
 * @file pattern_search.hpp
 * @brief Finite patterns, Haar rotations, the rotation union bound and
 *        constructive searches for translated and similar copies.
 *
 * Searches are Las Vegas: they return only witnesses whose transformed
 * points have all been re-checked against the oracle, and "none" means the
 * budget ran out, not that no copy exists.
 */

#include "copies_lab/constructions.hpp"
#include "copies_lab/core.hpp"
#include "copies_lab/measure_estimation.hpp"
#include "copies_lab/sampling.hpp"
#include "copies_lab/set_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace copies_lab {

/// At least two distinct points of R^d.
class Pattern {
 public:
  explicit Pattern(std::vector<Point> points) : points_(std::move(points)) {
    require(points_.size() >= 2, ErrorKind::DegeneratePattern, "a pattern needs two points");
    const auto d = points_.front().size();
    require(d >= 2, ErrorKind::InvalidArgument, "pattern dimension must be at least 2");
    sep_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points_.size(); ++i) {
      require(points_[i].size() == d, ErrorKind::InvalidArgument,
              "pattern points have mixed dimensions");
      for (std::size_t j = 0; j < i; ++j) {
        const double dist = (points_[i] - points_[j]).norm();
        sep_ = std::min(sep_, dist);
        diam_ = std::max(diam_, dist);
      }
    }
    require(sep_ > 0.0, ErrorKind::DegeneratePattern, "pattern has duplicate points");
  }

  [[nodiscard]] const std::vector<Point>& points() const noexcept { return points_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(points_.front().size()); }
  [[nodiscard]] double sep() const noexcept { return sep_; }
  [[nodiscard]] double diam() const noexcept { return diam_; }

  [[nodiscard]] Pattern scaled(double r) const {
    std::vector<Point> scaled_points;
    scaled_points.reserve(points_.size());
    for (const auto& p : points_) scaled_points.push_back(r * p);
    return Pattern(std::move(scaled_points));
  }

 private:
  std::vector<Point> points_;
  double sep_ = 0.0;
  double diam_ = 0.0;
};

struct PatternStats {
  double sep = 0.0;
  double diam = 0.0;
};

inline PatternStats pattern_stats(const Pattern& pattern) { return {pattern.sep(), pattern.diam()}; }

/// x -> scale * rotation * x + translation.
struct Placement {
  double scale = 1.0;
  Matrix rotation;
  Point translation;

  [[nodiscard]] Point apply(const Point& x) const { return scale * (rotation * x) + translation; }
};

inline bool is_rotation(const Matrix& q, double tolerance = 1e-10) {
  if (q.rows() != q.cols() || q.rows() < 1) return false;
  const Matrix gram = q.transpose() * q;
  const double orth = (gram - Matrix::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff();
  return orth <= tolerance && std::abs(q.determinant() - 1.0) <= tolerance;
}

/**
 * Haar-distributed element of SO(d): QR of a Gaussian matrix with the
 * signs of R's diagonal moved into Q (Haar on O(d)), then one column
 * flipped when the determinant is negative.
 */
inline Matrix random_rotation(int d, Rng& rng) {
  require(d >= 2, ErrorKind::InvalidArgument, "rotation dimension must be at least 2");
  Matrix g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (int i = 0; i < d; ++i) {
    if (r(i, i) < 0.0) q.col(i) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

inline Matrix random_rotation(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_rotation(d, rng);
}

struct RotationMeasure {
  double estimate = 0.0;  ///< Haar fraction of Q with Q(P - x0) + x0 inside E
  double std_error = 0.0;
  double lower_bound = 0.0;  ///< 1 - sum_i (1 - f_i)
  double lower_bound_std_error = 0.0;
  std::vector<double> coverages;  ///< f_i for each point other than x0
};

/**
 * Monte Carlo Haar measure of the rotations about x0 that carry every
 * pattern point into E, next to the union bound built from the sphere
 * coverages at radii |x_i - x0|.
 */
inline RotationMeasure rotation_success_measure(const SetOracle& oracle, const Point& x0,
                                                const Pattern& pattern, std::int64_t samples,
                                                std::uint64_t seed) {
  require(samples >= 1, ErrorKind::InvalidSampler, "need at least one rotation sample");
  require(x0.size() == oracle.dimension() && pattern.dimension() == oracle.dimension(),
          ErrorKind::InvalidArgument, "dimension mismatch");
  require(oracle.contains(x0), ErrorKind::PointNotInSet, "rotation center is not in the set");
  const int d = oracle.dimension();

  std::vector<Point> offsets;
  for (const auto& p : pattern.points()) {
    if ((p - x0).norm() > 0.0) offsets.push_back(p - x0);
  }

  RotationMeasure out;
  double variance_sum = 0.0;
  out.lower_bound = 1.0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const SamplerConfig sphere{substream(seed, 1 + i), samples, SamplingMode::UniformMonteCarlo};
    const auto coverage = sphere_coverage(oracle, x0, offsets[i].norm(), sphere);
    out.coverages.push_back(coverage.fraction);
    out.lower_bound -= 1.0 - coverage.fraction;
    variance_sum += coverage.std_error * coverage.std_error;
  }
  out.lower_bound_std_error = std::sqrt(variance_sum);

  struct Count {
    std::int64_t hits = 0;
    std::int64_t total = 0;
  };
  const auto chunks = run_chunks<Count>(
      substream(seed, 0), samples, [&](std::int64_t, std::int64_t begin, std::int64_t end, Rng& rng) {
        Count c;
        Point y(d);
        for (std::int64_t s = begin; s < end; ++s) {
          const Matrix q = random_rotation(d, rng);
          bool inside = true;
          for (const auto& off : offsets) {
            y = q * off + x0;
            if (!oracle.contains(y)) {
              inside = false;
              break;
            }
          }
          ++c.total;
          if (inside) ++c.hits;
        }
        return c;
      });
  std::int64_t hits = 0;
  for (const auto& c : chunks) hits += c.hits;
  out.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  out.std_error = binomial_std_error(out.estimate, samples);
  return out;
}

struct SearchConfig {
  std::int64_t rotation_samples = 10000;
  double translation_grid_step = 0.0;  ///< 0 selects r * sep / 10
  BallRegion candidate_region;
  std::uint64_t seed = 42;
  std::int64_t density_samples = 2048;
  std::int64_t coverage_samples = 2048;
};

/// True when every point of z + r P lies in E.
inline bool verify_translation(const SetOracle& oracle, const Pattern& pattern, double r,
                               const Point& z) {
  for (const auto& p : pattern.points()) {
    if (!oracle.contains(Point(z + r * p))) return false;
  }
  return true;
}

/// True when every transformed point lies in E and the rotation is proper.
inline bool verify_placement(const SetOracle& oracle, const Pattern& pattern,
                             const Placement& placement) {
  if (!is_rotation(placement.rotation)) return false;
  for (const auto& p : pattern.points()) {
    if (!oracle.contains(placement.apply(p))) return false;
  }
  return true;
}

namespace detail {

inline double effective_step(const SearchConfig& config, const Pattern& pattern, double r) {
  return config.translation_grid_step > 0.0 ? config.translation_grid_step : r * pattern.sep() / 10.0;
}

inline void validate_search(const SetOracle& oracle, const Pattern& pattern, double r,
                            const SearchConfig& config) {
  require(r > 0.0, ErrorKind::InvalidArgument, "scale must be positive");
  require(config.rotation_samples >= 1, ErrorKind::InvalidArgument,
          "rotation_samples must be at least 1");
  require(pattern.dimension() == oracle.dimension() &&
              config.candidate_region.center.size() == oracle.dimension(),
          ErrorKind::InvalidArgument, "dimension mismatch");
  validate(config.candidate_region);
}

}  // namespace detail

/**
 * Translated copy z + r P inside E. A dense ball B_{r'}(x) is located
 * first, with r' the scaled pattern radius; translates of the set by -rP
 * stay in B_{r' + r|P|}(x), so when the density there beats (n-1)/n they
 * share a point. Grid translations in the dense ball are tried first, then
 * the rest of the candidate region.
 */
inline std::optional<Point> find_translated_copy(const SetOracle& oracle, const Pattern& pattern,
                                                 double r, const SearchConfig& config) {
  detail::validate_search(oracle, pattern, r, config);
  const double step = detail::effective_step(config, pattern, r);
  double reach = 0.0;
  for (const auto& p : pattern.points()) reach = std::max(reach, r * p.norm());
  const double inner = std::max(reach, step);

  const SamplerConfig density{config.seed, config.density_samples,
                              SamplingMode::UniformMonteCarlo};
  const double scan_radius = inner + reach;
  const auto dense = densest_ball_scan(oracle, scan_radius, config.candidate_region,
                                       std::max(step, 0.5 * scan_radius), density);

  for (const auto& z : grid_points(BallRegion{dense.ball.center, inner}, step)) {
    if (verify_translation(oracle, pattern, r, z)) return z;
  }
  for (const auto& z : grid_points(config.candidate_region, step)) {
    if (verify_translation(oracle, pattern, r, z)) return z;
  }
  return std::nullopt;
}

/**
 * Similar copy r Q P + z inside E, following the concentric-sphere route:
 * with x0 the first pattern point, find a center c in E whose spheres of
 * radii r |x_i - x0| are covered beyond (n-2)/(n-1), then sample rotations
 * (identity first) until every point c + r Q (x_i - x0) is in E. Centers
 * come from a grid over the densest ball of radius r max_i |x_i - x0|.
 */
inline std::optional<Placement> find_similar_copy(const SetOracle& oracle, const Pattern& pattern,
                                                  double r, const SearchConfig& config) {
  detail::validate_search(oracle, pattern, r, config);
  const int d = oracle.dimension();
  const double step = detail::effective_step(config, pattern, r);
  const Point& x0 = pattern.points().front();
  const double n = static_cast<double>(pattern.size());
  const double rho_prime = (n - 2.0) / (n - 1.0);

  std::vector<double> radii;
  double reach = 0.0;
  for (std::size_t i = 1; i < pattern.size(); ++i) {
    radii.push_back(r * (pattern.points()[i] - x0).norm());
    reach = std::max(reach, radii.back());
  }

  const SamplerConfig density{config.seed, config.density_samples,
                              SamplingMode::UniformMonteCarlo};
  const auto dense = densest_ball_scan(oracle, reach, config.candidate_region,
                                       std::max(step, 0.5 * reach), density);
  const auto centers = grid_points(dense.ball, step);
  const SamplerConfig coverage{substream(config.seed, 1), config.coverage_samples,
                               SamplingMode::UniformMonteCarlo};

  std::size_t start = 0;
  while (start < centers.size()) {
    const auto scan = concentric_sphere_scan(oracle, centers, radii, rho_prime, coverage, start);
    if (!scan.found) break;
    const Point& c = scan.point;
    Rng rng(substream(config.seed, 2 + scan.index));
    for (std::int64_t attempt = 0; attempt < config.rotation_samples; ++attempt) {
      Placement placement;
      placement.scale = r;
      placement.rotation = attempt == 0 ? Matrix(Matrix::Identity(d, d)) : random_rotation(d, rng);
      placement.translation = c - r * (placement.rotation * x0);
      if (verify_placement(oracle, pattern, placement)) return placement;
    }
    start = scan.index + 1;
  }
  return std::nullopt;
}

struct RhoMinBounds {
  double lower = 0.0;  ///< max(0, 1 - 10 log n / n^(1/5))
  double upper = 0.0;  ///< 1 - 1/(n - 1)
};

inline RhoMinBounds rho_min_bounds(std::int64_t n) {
  require(n >= 2, ErrorKind::InvalidArgument, "n must be at least 2");
  RhoMinBounds out;
  out.lower = std::max(0.0, 1.0 - epsilon_of_n(n).value);
  out.upper = 1.0 - 1.0 / static_cast<double>(n - 1);
  return out;
}

}  // namespace copies_lab
