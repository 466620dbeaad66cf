#pragma once

/**
 * @file discrepancy.hpp
 * @brief Exact discrepancy of finite sequences on the torus, exponential
 *        sums, the Erdos-Turan and van der Corput bounds, the Diophantine
 *        quality of the golden ratio and the closed-form discrepancy bound
 *        for golden quadratic sequences.
 *
 * Intervals are half-open [alpha, beta) in [0, 1). The extreme discrepancy
 * is computed as D+ + D- over sorted points, which equals the supremum over
 * all intervals and, by complementation, over all wrap-around arcs too. It
 * is therefore invariant under rotating every point by the same amount.
 */

#include "copies_lab/constructions.hpp"
#include "copies_lab/core.hpp"
#include "copies_lab/numeric.hpp"
#include "copies_lab/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace copies_lab {

/// Finite sequence of points in [0, 1).
class TorusSequence {
 public:
  TorusSequence() = default;
  explicit TorusSequence(std::vector<double> points) : points_(std::move(points)) {
    for (double p : points_) {
      require(p >= 0.0 && p < 1.0, ErrorKind::InvalidArgument,
              "torus points must lie in [0, 1)");
    }
  }

  [[nodiscard]] std::span<const double> points() const { return points_; }
  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return points_[i]; }

  /// Leading `count` points.
  [[nodiscard]] TorusSequence head(std::size_t count) const {
    return TorusSequence(std::vector<double>(points_.begin(),
                                             points_.begin() + static_cast<std::ptrdiff_t>(count)));
  }

 private:
  std::vector<double> points_;
};

inline TorusSequence make_sequence(const QuadraticSeq& params) {
  return TorusSequence(quadratic_sequence(params));
}

namespace detail {

inline std::vector<double> sorted_points(const TorusSequence& seq) {
  require(seq.size() >= 1, ErrorKind::InvalidArgument, "sequence is empty");
  std::vector<double> x(seq.points().begin(), seq.points().end());
  std::sort(x.begin(), x.end());
  return x;
}

// Both maxima are kept as multiples of 1/n: i - n x_(i) is exact whenever
// n x_(i) is, so a single final division keeps dyadic inputs exact.
struct OneSided {
  double plus = 0.0;   ///< n max_i (i/n - x_(i))
  double minus = 0.0;  ///< n max_i (x_(i) - (i-1)/n)
  double n = 1.0;
};

inline OneSided one_sided(std::span<const double> sorted) {
  OneSided out{-1.0, -1.0, static_cast<double>(sorted.size())};
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double scaled = out.n * sorted[i];
    out.plus = std::max(out.plus, static_cast<double>(i + 1) - scaled);
    out.minus = std::max(out.minus, scaled - static_cast<double>(i));
  }
  return out;
}

}  // namespace detail

/// sup over anchored intervals [0, beta) of |count/n - beta|.
inline double star_discrepancy_exact(const TorusSequence& seq) {
  const auto sorted = detail::sorted_points(seq);
  const auto sides = detail::one_sided(sorted);
  return std::max(sides.plus, sides.minus) / sides.n;
}

/// sup over all intervals [alpha, beta) of |count/n - (beta - alpha)|.
inline double extreme_discrepancy_exact(const TorusSequence& seq) {
  const auto sorted = detail::sorted_points(seq);
  const auto sides = detail::one_sided(sorted);
  return (sides.plus + sides.minus) / sides.n;
}

/// |n^-1 sum_k exp(2 pi i m a_k)| with compensated summation.
inline double exp_sum(const TorusSequence& seq, std::int64_t m) {
  require(m >= 1, ErrorKind::InvalidArgument, "frequency must be at least 1");
  require(seq.size() >= 1, ErrorKind::InvalidArgument, "sequence is empty");
  CompensatedSum<double> re;
  CompensatedSum<double> im;
  const double md = static_cast<double>(m);
  for (double a : seq.points()) {
    const double phase = 2.0 * kPi * frac_product(a, md);
    re += std::cos(phase);
    im += std::sin(phase);
  }
  const double n = static_cast<double>(seq.size());
  return std::hypot(re.value(), im.value()) / n;
}

/// 6/(M+1) + (4/pi) sum_{m<=M} |exp_sum(m)| / m.
inline double erdos_turan_bound(const TorusSequence& seq, std::int64_t M) {
  require(M >= 1, ErrorKind::InvalidArgument, "M must be at least 1");
  std::vector<double> sums(static_cast<std::size_t>(M));
  parallel_for(M, [&](std::int64_t i) { sums[static_cast<std::size_t>(i)] = exp_sum(seq, i + 1); });
  CompensatedSum<double> weighted;
  for (std::int64_t m = 1; m <= M; ++m) {
    weighted += sums[static_cast<std::size_t>(m - 1)] / static_cast<double>(m);
  }
  return 6.0 / static_cast<double>(M + 1) + 4.0 / kPi * weighted.value();
}

struct ShiftGap {
  double gap = 0.0;
  double bound = 0.0;  ///< 2H/n
};

/**
 * Distance between the exponential sum over the first n terms and its
 * average over shifts h = 1..H, where n = len - H. Always at most 2H/n.
 */
inline ShiftGap vdc_shift_gap(const TorusSequence& seq_extended, std::int64_t m, std::int64_t H) {
  require(m >= 1, ErrorKind::InvalidArgument, "frequency must be at least 1");
  require(H >= 1, ErrorKind::InvalidArgument, "H must be at least 1");
  const auto len = static_cast<std::int64_t>(seq_extended.size());
  require(len >= H + 1, ErrorKind::InsufficientTerms,
          "sequence needs at least H + 1 terms for the shifted sums");
  const std::int64_t n = len - H;
  const double md = static_cast<double>(m);

  std::vector<std::complex<double>> phase(static_cast<std::size_t>(len));
  for (std::int64_t k = 0; k < len; ++k) {
    const double t = 2.0 * kPi * frac_product(seq_extended[static_cast<std::size_t>(k)], md);
    phase[static_cast<std::size_t>(k)] = {std::cos(t), std::sin(t)};
  }
  CompensatedSum<double> plain_re;
  CompensatedSum<double> plain_im;
  CompensatedSum<double> shifted_re;
  CompensatedSum<double> shifted_im;
  for (std::int64_t k = 0; k < n; ++k) {
    plain_re += phase[static_cast<std::size_t>(k)].real();
    plain_im += phase[static_cast<std::size_t>(k)].imag();
  }
  // Term k + h with 1 <= h <= H appears once per admissible k; weight by multiplicity.
  for (std::int64_t j = 1; j < n + H; ++j) {
    const std::int64_t multiplicity = std::min({j, H, n + H - j, n});
    if (multiplicity <= 0) continue;
    const double w = static_cast<double>(multiplicity) / static_cast<double>(H);
    shifted_re += w * phase[static_cast<std::size_t>(j)].real();
    shifted_im += w * phase[static_cast<std::size_t>(j)].imag();
  }
  const double nd = static_cast<double>(n);
  const std::complex<double> plain{plain_re.value() / nd, plain_im.value() / nd};
  const std::complex<double> shifted{shifted_re.value() / nd, shifted_im.value() / nd};
  return ShiftGap{std::abs(plain - shifted), 2.0 * static_cast<double>(H) / nd};
}

/// 2H/n + sqrt(1/H + 3Hm/n): van der Corput plus the golden-ratio geometric-sum estimate.
inline double analytic_expsum_bound(std::int64_t n, std::int64_t m, std::int64_t H) {
  const double nd = static_cast<double>(n);
  const double hd = static_cast<double>(H);
  return 2.0 * hd / nd + std::sqrt(1.0 / hd + 3.0 * hd * static_cast<double>(m) / nd);
}

struct QuadraticExpSum {
  double exact = 0.0;
  double analytic = 0.0;
};

/// Exact |exp sum| of r^2 k^2 + A k (B only rotates, so it is set to 0) against the analytic bound.
inline QuadraticExpSum quadratic_expsum_bound(std::int64_t n, std::int64_t m, std::int64_t H,
                                              const AdmissibleScale& scale, double A) {
  require(H >= 1 && m >= 1, ErrorKind::InvalidArgument, "H and m must be at least 1");
  const auto seq = make_sequence(QuadraticSeq{scale.r_squared, A, 0.0, n});
  return QuadraticExpSum{exp_sum(seq, m), analytic_expsum_bound(n, m, H)};
}

struct DiophantineQuality {
  double z = 0.0;
  std::int64_t q_max = 0;
  double min_product = 0.0;  ///< min over 1 <= q <= q_max of q dist(qz, Z)
  std::int64_t witness_q = 0;
  /// Same minimum restricted to q >= ceil(sqrt(q_max)); approaches 1/sqrt(5).
  double tail_min_product = 0.0;
  std::int64_t tail_witness_q = 0;
};

inline DiophantineQuality golden_quality(std::int64_t q_max) {
  require(q_max >= 1, ErrorKind::InvalidArgument, "q_max must be at least 1");
  DiophantineQuality out;
  out.z = kGoldenRatio.value();
  out.q_max = q_max;
  out.min_product = std::numeric_limits<double>::infinity();
  out.tail_min_product = std::numeric_limits<double>::infinity();
  const auto tail_start =
      static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(q_max))));
  for (std::int64_t q = 1; q <= q_max; ++q) {
    const double qd = static_cast<double>(q);
    const double product = qd * dist_to_integer(frac_product(kGoldenRatio, qd));
    if (product < out.min_product) {
      out.min_product = product;
      out.witness_q = q;
    }
    if (q >= tail_start && product < out.tail_min_product) {
      out.tail_min_product = product;
      out.tail_witness_q = q;
    }
  }
  return out;
}

/// |p^2 + pq - q^2|, never zero for q != 0 because x^2 + x - 1 has irrational roots.
inline std::int64_t viete_identity(std::int64_t p, std::int64_t q) {
  require(q != 0, ErrorKind::InvalidArgument, "q must be non-zero");
  require(std::abs(p) < (std::int64_t{1} << 31) && std::abs(q) < (std::int64_t{1} << 31),
          ErrorKind::InvalidArgument, "|p|, |q| must be below 2^31");
  const __int128 value = static_cast<__int128>(p) * p + static_cast<__int128>(p) * q -
                         static_cast<__int128>(q) * q;
  return static_cast<std::int64_t>(value < 0 ? -value : value);
}

struct AnalyticBound {
  std::int64_t H = 0;
  std::int64_t M = 0;
  double value = 0.0;
};

namespace detail {

inline unsigned __int128 pow5(unsigned __int128 x) { return x * x * x * x * x; }

/// Largest integer h >= 0 with (c h)^5 <= target.
inline std::int64_t floor_fifth_root(unsigned __int128 target, std::int64_t c, double guess) {
  auto h = static_cast<std::int64_t>(std::max(0.0, std::floor(guess)));
  while (h > 0 && pow5(static_cast<unsigned __int128>(c) * h) > target) --h;
  while (pow5(static_cast<unsigned __int128>(c) * (h + 1)) <= target) ++h;
  return h;
}

}  // namespace detail

/// H = floor(n^(2/5)/25) and M = floor(4 n^(1/5)), computed in exact integer arithmetic.
inline std::pair<std::int64_t, std::int64_t> final_bound_parameters(std::int64_t n) {
  require(n >= 2 && n <= 1'000'000'000'000'000, ErrorKind::InvalidArgument,
          "n must lie in [2, 1e18]");
  const double nd = static_cast<double>(n);
  const auto n128 = static_cast<unsigned __int128>(n);
  // 25 H <= n^(2/5)  <=>  (25 H)^5 <= n^2.   M <= 4 n^(1/5)  <=>  M^5 <= 1024 n.
  const std::int64_t H = detail::floor_fifth_root(n128 * n128, 25, std::pow(nd, 0.4) / 25.0);
  const std::int64_t M = detail::floor_fifth_root(1024 * n128, 1, 4.0 * std::pow(nd, 0.2));
  return {H, M};
}

/**
 * 6/(M+1) + (4/pi)(1 + log M)(2H/n + H^-1/2) + (8 sqrt 3/pi)(HM/n)^1/2 at the
 * parameter choice above. Below n = 25^(5/2) the choice gives H = 0.
 */
inline AnalyticBound final_bound(std::int64_t n) {
  const auto [H, M] = final_bound_parameters(n);
  require(H >= 1, ErrorKind::BelowRange,
          "floor(n^(2/5)/25) is zero for n = " + std::to_string(n) + " (need n >= 3125)");
  const double nd = static_cast<double>(n);
  const double hd = static_cast<double>(H);
  const double md = static_cast<double>(M);
  AnalyticBound out;
  out.H = H;
  out.M = M;
  out.value = 6.0 / (md + 1.0) + 4.0 / kPi * (1.0 + std::log(md)) * (2.0 * hd / nd + 1.0 / std::sqrt(hd)) +
              8.0 * std::sqrt(3.0) / kPi * std::sqrt(hd * md / nd);
  return out;
}

inline double theorem_bound(std::int64_t n) { return epsilon_of_n(n).value; }

struct ExpSumRow {
  std::int64_t m = 0;
  double exact = 0.0;
  double analytic = 0.0;
};

struct DiscrepancyReport {
  std::int64_t n = 0;
  double exact_star = 0.0;
  double exact_extreme = 0.0;
  double et_bound = 0.0;
  std::int64_t M = 0;
  std::int64_t H = 0;
  double vdc_bound = 0.0;
  double final_bound = 0.0;
  double theorem_bound = 0.0;
  std::vector<ExpSumRow> rows;
};

/**
 * Exact discrepancies, the Erdos-Turan bound with exact exponential sums at
 * M = floor(4 n^(1/5)), the same bound with each sum replaced by its
 * analytic estimate (vdc_bound), the closed-form bound and 10 log n/n^(1/5).
 */
inline DiscrepancyReport full_report(const TorusSequence& seq) {
  const auto n = static_cast<std::int64_t>(seq.size());
  const auto analytic = final_bound(n);

  DiscrepancyReport report;
  report.n = n;
  report.M = analytic.M;
  report.H = analytic.H;
  report.exact_star = star_discrepancy_exact(seq);
  report.exact_extreme = extreme_discrepancy_exact(seq);
  report.final_bound = analytic.value;
  report.theorem_bound = theorem_bound(n);

  report.rows.resize(static_cast<std::size_t>(report.M));
  parallel_for(report.M, [&](std::int64_t i) {
    const std::int64_t m = i + 1;
    report.rows[static_cast<std::size_t>(i)] =
        ExpSumRow{m, exp_sum(seq, m), analytic_expsum_bound(n, m, report.H)};
  });
  CompensatedSum<double> exact_weighted;
  CompensatedSum<double> analytic_weighted;
  for (const auto& row : report.rows) {
    exact_weighted += row.exact / static_cast<double>(row.m);
    analytic_weighted += row.analytic / static_cast<double>(row.m);
  }
  const double head = 6.0 / static_cast<double>(report.M + 1);
  report.et_bound = head + 4.0 / kPi * exact_weighted.value();
  report.vdc_bound = head + 4.0 / kPi * analytic_weighted.value();
  return report;
}

inline DiscrepancyReport full_report(const QuadraticSeq& params) {
  return full_report(make_sequence(params));
}

}  // namespace copies_lab
