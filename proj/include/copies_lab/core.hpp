#pragma once

/**
 * @file core.hpp
 * @brief Shared vocabulary: points, error kinds, extended reals.
 */

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace copies_lab {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Point point(std::initializer_list<double> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) p[i++] = c;
  return p;
}

inline constexpr std::string_view kToolVersion = "0.3.1";

enum class ErrorKind {
  InvalidArgument,
  InvalidSampler,
  QuadratureFailure,
  SingularPoint,
  ZeroMean,
  EmptyRegion,
  UnboundedOracle,
  InsufficientTerms,
  BelowRange,
  GridTooCoarse,
  DegeneratePattern,
  PointNotInSet,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidSampler: return "invalid-sampler";
    case ErrorKind::QuadratureFailure: return "quadrature-failure";
    case ErrorKind::SingularPoint: return "singular-point";
    case ErrorKind::ZeroMean: return "zero-mean";
    case ErrorKind::EmptyRegion: return "empty-region";
    case ErrorKind::UnboundedOracle: return "unbounded-oracle";
    case ErrorKind::InsufficientTerms: return "insufficient-terms";
    case ErrorKind::BelowRange: return "below-range";
    case ErrorKind::GridTooCoarse: return "grid-too-coarse";
    case ErrorKind::DegeneratePattern: return "degenerate-pattern";
    case ErrorKind::PointNotInSet: return "x0-not-in-set";
  }
  return "unknown";
}

/// Every failure signalled by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

/// A non-negative real or +infinity (kernel values at singular displacements).
class ExtendedValue {
 public:
  static ExtendedValue finite(double value) { return ExtendedValue(false, value); }
  static ExtendedValue infinity() {
    return ExtendedValue(true, std::numeric_limits<double>::infinity());
  }

  [[nodiscard]] bool is_infinite() const noexcept { return infinite_; }
  [[nodiscard]] bool is_finite() const noexcept { return !infinite_; }
  /// +inf when infinite.
  [[nodiscard]] double value() const noexcept { return value_; }

  friend bool operator==(const ExtendedValue&, const ExtendedValue&) = default;

 private:
  ExtendedValue(bool infinite, double value) : infinite_(infinite), value_(value) {}

  bool infinite_;
  double value_;
};

inline constexpr double kPi = std::numbers::pi;

/// Distance from x to the nearest integer.
inline double dist_to_integer(double x) {
  const double f = x - std::floor(x);
  return std::min(f, 1.0 - f);
}

/// x mod 1 in [0, 1).
inline double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;
  return f;
}

}  // namespace copies_lab
