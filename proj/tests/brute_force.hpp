#pragma once

// Exact O(n^2 log n) discrepancy of points k / 2^kBits, enumerating every
// interval whose ends are sample points or 0, 1. Results are returned as the
// integer numerator over n * 2^kBits so comparisons can be exact.

#include <algorithm>
#include <cstdint>
#include <vector>

namespace brute_force {

inline constexpr int kBits = 20;
inline constexpr std::int64_t kUnit = std::int64_t{1} << kBits;

struct Scaled {
  std::int64_t numerator = 0;
  std::int64_t n = 1;

  [[nodiscard]] double value() const {
    return static_cast<double>(numerator) / (static_cast<double>(n) * static_cast<double>(kUnit));
  }
};

namespace detail {

inline std::vector<std::int64_t> endpoints(std::vector<std::int64_t> sorted) {
  sorted.push_back(0);
  sorted.push_back(kUnit);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return sorted;
}

// Points in [a, b] and in (a, b).
inline std::int64_t count_closed(const std::vector<std::int64_t>& s, std::int64_t a, std::int64_t b) {
  return std::upper_bound(s.begin(), s.end(), b) - std::lower_bound(s.begin(), s.end(), a);
}
inline std::int64_t count_open(const std::vector<std::int64_t>& s, std::int64_t a, std::int64_t b) {
  if (b <= a) return 0;
  return std::lower_bound(s.begin(), s.end(), b) - std::upper_bound(s.begin(), s.end(), a);
}

}  // namespace detail

/// sup over intervals J in [0, 1) of |#(J)/n - |J||.
inline Scaled extreme(std::vector<std::int64_t> k) {
  std::sort(k.begin(), k.end());
  const auto n = static_cast<std::int64_t>(k.size());
  const auto ends = detail::endpoints(k);
  std::int64_t best = 0;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    for (std::size_t j = i; j < ends.size(); ++j) {
      const std::int64_t a = ends[i];
      const std::int64_t b = ends[j];
      // Closed intervals approximate excess from inside [0, 1); the point 1 never occurs.
      best = std::max(best, detail::count_closed(k, a, b) * kUnit - n * (b - a));
      best = std::max(best, n * (b - a) - detail::count_open(k, a, b) * kUnit);
    }
  }
  return {best, n};
}

/// sup over b of |#([0, b))/n - b|.
inline Scaled star(std::vector<std::int64_t> k) {
  std::sort(k.begin(), k.end());
  const auto n = static_cast<std::int64_t>(k.size());
  std::int64_t best = 0;
  for (std::int64_t b : detail::endpoints(k)) {
    const std::int64_t below = std::lower_bound(k.begin(), k.end(), b) - k.begin();
    const std::int64_t upto = std::upper_bound(k.begin(), k.end(), b) - k.begin();
    best = std::max(best, n * b - below * kUnit);
    best = std::max(best, upto * kUnit - n * b);
  }
  return {best, n};
}

}  // namespace brute_force
