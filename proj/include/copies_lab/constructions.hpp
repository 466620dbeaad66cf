#pragma once

/**
 * @file constructions.hpp
 * @brief Annular sets, Bourgain's set, quadratic radial sequences and the
 *        golden-ratio admissible scales.
 *
 * If an isometric copy x_0, ..., x_{n-1} of {0, r, ..., (n-1) r} sits in
 * R^d, the squared norms a_k = |x_k|^2 satisfy a_{k+2} - 2 a_{k+1} + a_k =
 * 2 r^2 and so a_k = r^2 k^2 + A k + B. Membership of every x_k in the
 * annular set forces every a_k mod 1 to avoid the middle gap of length eps.
 */

#include "copies_lab/core.hpp"
#include "copies_lab/numeric.hpp"
#include "copies_lab/set_oracle.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace copies_lab {

/// {x : dist(|x|^2, Z) < (1 - gap)/2}; radial density 1 - gap.
struct AnnularSet {
  int dimension = 2;
  double gap = 0.2;
};

inline void validate(const AnnularSet& set) {
  require(set.dimension >= 2, ErrorKind::InvalidArgument, "dimension must be at least 2");
  require(set.gap > 0.0 && set.gap < 1.0, ErrorKind::InvalidArgument, "gap must lie in (0, 1)");
}

inline bool annular_membership(const AnnularSet& set, const Point& x) {
  return dist_to_integer(x.squaredNorm()) < 0.5 * (1.0 - set.gap);
}

inline SetOracle to_oracle(const AnnularSet& set) {
  validate(set);
  std::ostringstream label;
  label << "annular(eps=" << set.gap << ")";
  return SetOracle(
      set.dimension, [set](const Point& x) { return annular_membership(set, x); }, std::nullopt,
      label.str());
}

/// {x : |x|^2 mod 1 in [0, s]}, a union of annuli of density s.
struct BourgainSet {
  int dimension = 2;
  double s = 0.1;
};

inline void validate(const BourgainSet& set) {
  require(set.dimension >= 2, ErrorKind::InvalidArgument, "dimension must be at least 2");
  require(set.s > 0.0 && set.s < 0.25, ErrorKind::InvalidArgument, "s must lie in (0, 1/4)");
}

inline bool bourgain_membership(const BourgainSet& set, const Point& x) {
  return frac(x.squaredNorm()) <= set.s;
}

inline SetOracle to_oracle(const BourgainSet& set) {
  validate(set);
  std::ostringstream label;
  label << "bourgain(s=" << set.s << ")";
  return SetOracle(
      set.dimension, [set](const Point& x) { return bourgain_membership(set, x); }, std::nullopt,
      label.str());
}

struct EpsilonOfN {
  double value = 0.0;
  bool is_void = false;  ///< value >= 1: the density bound says nothing
};

/// 10 log(n) / n^(1/5) with the natural logarithm.
inline EpsilonOfN epsilon_of_n(std::int64_t n) {
  require(n >= 2, ErrorKind::InvalidArgument, "n must be at least 2");
  const double x = static_cast<double>(n);
  const double value = 10.0 * std::log(x) / std::pow(x, 0.2);
  return EpsilonOfN{value, value >= 1.0};
}

/// a_k = r^2 k^2 + A k + B for k = 0..n-1.
struct QuadraticSeq {
  DoubleDouble r_squared;
  double A = 0.0;
  double B = 0.0;
  std::int64_t n = 2;
};

/// Largest length for which k^2 stays an exact double.
inline constexpr std::int64_t kMaxSequenceLength = 94906265;

/**
 * Terms a_k mod 1. Each product r^2 k^2 and A k is formed exactly (error-free
 * transformations) before its integer part is discarded, so the reduced
 * terms keep ~1e-16 absolute accuracy however large k^2 r^2 gets.
 */
inline std::vector<double> quadratic_sequence(const QuadraticSeq& params) {
  require(params.n >= 1 && params.n <= kMaxSequenceLength, ErrorKind::InvalidArgument,
          "sequence length out of range");
  std::vector<double> terms(static_cast<std::size_t>(params.n));
  const double b = frac(params.B);
  for (std::int64_t k = 0; k < params.n; ++k) {
    const double kd = static_cast<double>(k);
    const double quadratic = frac_product(params.r_squared, kd * kd);
    const double linear = frac_product(params.A, kd);
    terms[static_cast<std::size_t>(k)] = frac(quadratic + linear + b);
  }
  return terms;
}

/// Residuals a_{k+2} - 2 a_{k+1} + a_k - 2 r^2 with a_k = |x_k|^2.
inline std::vector<double> verify_parallelogram_recurrence(std::span<const Point> points, double r) {
  require(points.size() >= 3, ErrorKind::InvalidArgument, "need at least three points");
  std::vector<double> residuals;
  residuals.reserve(points.size() - 2);
  for (std::size_t k = 0; k + 2 < points.size(); ++k) {
    const double a0 = points[k].squaredNorm();
    const double a1 = points[k + 1].squaredNorm();
    const double a2 = points[k + 2].squaredNorm();
    residuals.push_back(a2 - 2.0 * a1 + a0 - 2.0 * r * r);
  }
  return residuals;
}

/// r with r^2 = offset + z, z the golden ratio (sqrt(5) - 1)/2.
struct AdmissibleScale {
  std::int64_t offset = 0;
  DoubleDouble r_squared;
  double r = 0.0;
};

inline AdmissibleScale admissible_scale(std::int64_t m) {
  require(m >= 0, ErrorKind::InvalidArgument, "scale offset must be non-negative");
  AdmissibleScale scale;
  scale.offset = m;
  scale.r_squared = DoubleDouble{static_cast<double>(m)} + kGoldenRatio;
  scale.r = std::sqrt(scale.r_squared.value());
  return scale;
}

/// First index whose term falls in the closed middle gap [(1-eps)/2, (1+eps)/2].
inline std::optional<std::size_t> gap_hit_test(std::span<const double> seq, double eps) {
  require(eps > 0.0 && eps < 1.0, ErrorKind::InvalidArgument, "eps must lie in (0, 1)");
  const double lo = 0.5 * (1.0 - eps);
  const double hi = 0.5 * (1.0 + eps);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (seq[k] >= lo && seq[k] <= hi) return k;
  }
  return std::nullopt;
}

struct BourgainTripleSearch {
  std::int64_t grid_points = 0;
  std::int64_t solutions = 0;
  std::vector<std::pair<double, double>> examples;  ///< first few (A, B) solutions
};

/**
 * Grid search over (A, B) in [0, 1)^2 for A, B making all of B,
 * r^2 + A + B and 4 r^2 + 2A + B lie in [0, s] mod 1, i.e. a copy of
 * {0, r, 2r} inside Bourgain's set.
 */
inline BourgainTripleSearch bourgain_triple_search(const DoubleDouble& r_squared, double s,
                                                   double step) {
  require(s > 0.0 && s < 0.25, ErrorKind::InvalidArgument, "s must lie in (0, 1/4)");
  require(step > 0.0 && step < 1.0, ErrorKind::InvalidArgument, "step must lie in (0, 1)");
  const auto count = static_cast<std::int64_t>(std::ceil(1.0 / step));
  const double c1 = frac_product(r_squared, 1.0);
  const double c2 = frac_product(r_squared, 4.0);
  BourgainTripleSearch out;
  for (std::int64_t i = 0; i < count; ++i) {
    const double a = static_cast<double>(i) * step;
    for (std::int64_t j = 0; j < count; ++j) {
      const double b = static_cast<double>(j) * step;
      ++out.grid_points;
      if (frac(b) <= s && frac(c1 + a + b) <= s && frac(c2 + 2.0 * a + b) <= s) {
        ++out.solutions;
        if (out.examples.size() < 8) out.examples.emplace_back(a, b);
      }
    }
  }
  return out;
}

}  // namespace copies_lab
