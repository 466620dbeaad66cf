#pragma once

/**
 * @file set_oracle.hpp
 * @brief Measurable sets given by a membership predicate, plus the small
 *        library of synthetic sets used by tests and the CLI.
 */

#include "copies_lab/core.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace copies_lab {

struct BallRegion {
  Point center;
  double radius = 1.0;
};

inline void validate(const BallRegion& ball) {
  require(ball.radius > 0.0 && std::isfinite(ball.radius), ErrorKind::InvalidArgument,
          "ball radius must be positive");
}

inline bool contains(const BallRegion& ball, const Point& x) {
  return (x - ball.center).norm() <= ball.radius;
}

/**
 * A subset E of R^d. The predicate must be deterministic and safe to call
 * from several threads at once. When `bound` is set, membership is false
 * outside that ball and the set counts as bounded.
 */
class SetOracle {
 public:
  using Predicate = std::function<bool(const Point&)>;

  SetOracle(int dimension, Predicate membership, std::optional<BallRegion> bound,
            std::string label)
      : dimension_(dimension),
        membership_(std::move(membership)),
        bound_(std::move(bound)),
        label_(std::move(label)) {
    require(dimension_ >= 2, ErrorKind::InvalidArgument, "oracle dimension must be at least 2");
    require(static_cast<bool>(membership_), ErrorKind::InvalidArgument, "missing predicate");
  }

  [[nodiscard]] int dimension() const noexcept { return dimension_; }
  [[nodiscard]] bool is_bounded() const noexcept { return bound_.has_value(); }
  [[nodiscard]] const std::optional<BallRegion>& bound() const noexcept { return bound_; }
  [[nodiscard]] const std::string& label() const noexcept { return label_; }

  [[nodiscard]] bool contains(const Point& x) const {
    if (bound_ && (x - bound_->center).norm() > bound_->radius) return false;
    return membership_(x);
  }
  bool operator()(const Point& x) const { return contains(x); }

 private:
  int dimension_;
  Predicate membership_;
  std::optional<BallRegion> bound_;
  std::string label_;
};

namespace oracles {

inline SetOracle everything(int d) {
  return SetOracle(d, [](const Point&) { return true; }, std::nullopt, "everything");
}

inline SetOracle empty(int d) {
  Point origin = Point::Zero(d);
  return SetOracle(d, [](const Point&) { return false; }, BallRegion{origin, 1.0}, "empty");
}

/// Closed ball B_radius(center).
inline SetOracle ball(const Point& center, double radius) {
  const int d = static_cast<int>(center.size());
  return SetOracle(
      d, [center, radius](const Point& x) { return (x - center).norm() <= radius; },
      BallRegion{center, radius}, "ball");
}

/// Closed half-space {x : <normal, x - point> >= 0}.
inline SetOracle half_space(const Point& point, const Point& normal) {
  const int d = static_cast<int>(point.size());
  return SetOracle(
      d, [point, normal](const Point& x) { return normal.dot(x - point) >= 0.0; }, std::nullopt,
      "half-space");
}

/// Intersection of closed half-spaces {x : <n_i, x> <= c_i} clipped to a bounding ball.
inline SetOracle polytope(std::vector<std::pair<Point, double>> faces, BallRegion bound) {
  const int d = static_cast<int>(bound.center.size());
  return SetOracle(
      d,
      [faces = std::move(faces)](const Point& x) {
        for (const auto& [normal, offset] : faces) {
          if (normal.dot(x) > offset) return false;
        }
        return true;
      },
      std::move(bound), "polytope");
}

/// Complement of a square hole [0, hole)^d repeated with unit period; density 1 - hole^d.
inline SetOracle periodic_cell_complement(int d, double hole) {
  return SetOracle(
      d,
      [hole](const Point& x) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          if (x[i] - std::floor(x[i]) >= hole) return true;
        }
        return false;
      },
      std::nullopt, "periodic-cell-complement");
}

inline SetOracle complement(const SetOracle& base) {
  return SetOracle(
      base.dimension(), [base](const Point& x) { return !base.contains(x); }, std::nullopt,
      "complement(" + base.label() + ")");
}

inline SetOracle set_union(const SetOracle& a, const SetOracle& b) {
  std::optional<BallRegion> bound;
  if (a.is_bounded() && b.is_bounded()) {
    const auto& ba = *a.bound();
    const auto& bb = *b.bound();
    const Point mid = 0.5 * (ba.center + bb.center);
    const double radius = std::max((ba.center - mid).norm() + ba.radius,
                                   (bb.center - mid).norm() + bb.radius);
    bound = BallRegion{mid, radius};
  }
  return SetOracle(
      a.dimension(), [a, b](const Point& x) { return a.contains(x) || b.contains(x); }, bound,
      "union(" + a.label() + "," + b.label() + ")");
}

inline SetOracle intersect(const SetOracle& base, const BallRegion& ball) {
  return SetOracle(
      base.dimension(), [base](const Point& x) { return base.contains(x); }, ball,
      base.label() + " within ball");
}

}  // namespace oracles

}  // namespace copies_lab
