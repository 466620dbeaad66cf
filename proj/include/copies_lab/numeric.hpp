#pragma once

/**
 * @file numeric.hpp
 * @brief Extended-precision helpers, compensated summation, half-integer
 *        gamma values and a double-exponential quadrature on [0, 1].
 */

#include "copies_lab/core.hpp"

#include <cmath>
#include <cstdint>

namespace copies_lab {

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double value) : hi(value) {}  // NOLINT: implicit on purpose
  constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

  [[nodiscard]] constexpr double value() const { return hi + lo; }
};

inline DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

inline DoubleDouble operator+(const DoubleDouble& a, const DoubleDouble& b) {
  DoubleDouble s = two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  return two_sum(s.hi, s.lo);
}

/// (sqrt(5) - 1) / 2 to ~32 significant digits.
inline constexpr DoubleDouble kGoldenRatio{0.6180339887498949, -5.432115203682506e-17};

/// frac(c * k) for an integer-valued k with |k| < 2^53; the product is
/// formed exactly before reduction so the result carries ~1e-16 absolute error.
inline double frac_product(const DoubleDouble& c, double k) {
  const double p = c.hi * k;
  const double e = std::fma(c.hi, k, -p);
  const double t = c.lo * k;
  const double fp = p - std::floor(p);
  return frac(fp + (e + t));
}

inline double frac_product(double c, double k) {
  return frac_product(DoubleDouble{c}, k);
}

/// Neumaier's variant of Kahan summation.
template <typename Value = double>
class CompensatedSum {
 public:
  void add(Value value) {
    const Value t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(Value value) {
    add(value);
    return *this;
  }

  [[nodiscard]] Value value() const { return sum_ + compensation_; }

 private:
  Value sum_{0};
  Value compensation_{0};
};

/// Gamma(twice / 2) for a positive integer `twice`, by the exact recursion
/// Gamma(x + 1) = x Gamma(x) seeded with Gamma(1/2) = sqrt(pi), Gamma(1) = 1.
inline double gamma_half_integer(int twice) {
  require(twice >= 1, ErrorKind::InvalidArgument, "gamma argument must be a positive half-integer");
  double value = (twice % 2 == 0) ? 1.0 : std::sqrt(kPi);
  for (int k = (twice % 2 == 0) ? 2 : 1; k + 2 <= twice; k += 2) {
    value *= 0.5 * k;
  }
  return value;
}

struct QuadratureResult {
  double value = 0.0;
  double last_change = 0.0;
  int levels = 0;
  int evaluations = 0;
};

/**
 * Tanh-sinh quadrature of f over [0, 1].
 *
 * The integrand is called as f(t, 1 - t) with both arguments computed
 * without cancellation, so integrable power singularities at either end are
 * resolved. Nodes cluster doubly exponentially at the endpoints; each level
 * halves the step until successive estimates agree to `rel_tol`.
 */
template <typename F>
QuadratureResult tanh_sinh_unit(F&& f, int initial_points, double rel_tol = 1e-13,
                                int max_levels = 12) {
  require(initial_points >= 2, ErrorKind::InvalidArgument, "need at least two quadrature points");
  constexpr double kUMax = 4.0;
  const double h0 = 2.0 * kUMax / initial_points;

  QuadratureResult result;
  auto node = [&](double u) -> double {
    const double y = 0.5 * kPi * std::sinh(u);
    const double ey = std::exp(-2.0 * std::abs(y));
    const double small = ey / (1.0 + ey);  // distance to the nearer endpoint
    const double large = 1.0 / (1.0 + ey);
    const double t = (y < 0) ? small : large;
    const double tc = (y < 0) ? large : small;
    if (t <= 0.0 || tc <= 0.0) return 0.0;
    const double ch = std::cosh(y);
    const double weight = 0.25 * kPi * std::cosh(u) / (ch * ch);
    ++result.evaluations;
    return weight * f(t, tc);
  };

  CompensatedSum<double> sum;
  const int half = initial_points / 2;
  for (int i = -half; i <= half; ++i) sum += node(i * h0);
  double h = h0;
  double estimate = h * sum.value();

  for (int level = 1; level <= max_levels; ++level) {
    h *= 0.5;
    const int count = static_cast<int>(std::ceil(kUMax / h));
    for (int i = 1; i <= count; i += 2) {
      sum += node(i * h);
      sum += node(-i * h);
    }
    const double refined = h * sum.value();
    result.last_change = std::abs(refined - estimate);
    result.levels = level;
    estimate = refined;
    if (result.last_change <= rel_tol * std::abs(refined)) {
      result.value = refined;
      return result;
    }
  }
  throw Error(ErrorKind::QuadratureFailure,
              "tanh-sinh refinement did not converge within " + std::to_string(max_levels) +
                  " levels");
}

}  // namespace copies_lab
