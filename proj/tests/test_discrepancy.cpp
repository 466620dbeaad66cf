#include "brute_force.hpp"

#include "copies_lab/discrepancy.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace copies_lab;

namespace {

constexpr double pi = std::numbers::pi;

TorusSequence from_ints(const std::vector<std::int64_t>& k) {
  std::vector<double> x;
  for (auto v : k) x.push_back(static_cast<double>(v) / static_cast<double>(brute_force::kUnit));
  return TorusSequence(std::move(x));
}

std::vector<std::int64_t> random_ints(Rng& rng, std::size_t n, std::int64_t range) {
  std::vector<std::int64_t> k(n);
  for (auto& v : k) v = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(range)) *
                        (brute_force::kUnit / range);
  return k;
}

TorusSequence grid(std::size_t n) {
  std::vector<double> x;
  for (std::size_t k = 0; k < n; ++k) x.push_back(static_cast<double>(k) / static_cast<double>(n));
  return TorusSequence(std::move(x));
}

}  // namespace

TEST(TorusSequence, RejectsPointsOutsideUnitInterval) {
  EXPECT_THROW(TorusSequence(std::vector<double>{0.2, 1.0}), Error);
  EXPECT_THROW(TorusSequence(std::vector<double>{-0.1}), Error);
}

TEST(StarDiscrepancy, Examples) {
  EXPECT_EQ(star_discrepancy_exact(TorusSequence({0.5})), 0.5);
  EXPECT_EQ(star_discrepancy_exact(TorusSequence({0.125, 0.375, 0.625, 0.875})), 0.125);
  EXPECT_EQ(star_discrepancy_exact(TorusSequence({0.0, 0.0, 0.0})), 1.0);
}

TEST(ExtremeDiscrepancy, Examples) {
  EXPECT_EQ(extreme_discrepancy_exact(TorusSequence({0.125, 0.375, 0.625, 0.875})), 0.25);
  EXPECT_EQ(extreme_discrepancy_exact(TorusSequence({0.0, 0.5})), 0.5);
  EXPECT_EQ(extreme_discrepancy_exact(TorusSequence({0.3, 0.3, 0.3, 0.3})), 1.0);
}

TEST(ExactDiscrepancy, MatchesBruteForce) {
  Rng rng(12345);
  for (int trial = 0; trial < 60; ++trial) {
    const bool pow2 = trial % 2 == 0;
    const std::size_t n = pow2 ? (std::size_t{1} << (trial % 10)) : 1 + static_cast<std::size_t>(rng.uniform() * 300);
    // Narrow value ranges force ties.
    const std::int64_t range = trial % 3 == 0 ? 16 : brute_force::kUnit;
    const auto ints = random_ints(rng, n, range);
    const auto seq = from_ints(ints);
    const auto bf_extreme = brute_force::extreme(ints).value();
    const auto bf_star = brute_force::star(ints).value();
    EXPECT_EQ(extreme_discrepancy_exact(seq), bf_extreme) << "n = " << n;
    EXPECT_EQ(star_discrepancy_exact(seq), bf_star) << "n = " << n;
  }
}

TEST(ExtremeDiscrepancy, RotationInvariant) {
  Rng rng(99);
  const auto ints = random_ints(rng, 200, brute_force::kUnit);
  const auto seq = from_ints(ints);
  const double base = extreme_discrepancy_exact(seq);
  for (int trial = 0; trial < 200; ++trial) {
    const double shift = rng.uniform();
    std::vector<double> rotated;
    for (double x : seq.points()) rotated.push_back(frac(x + shift));
    EXPECT_NEAR(extreme_discrepancy_exact(TorusSequence(rotated)), base, 1e-12);
  }
}

TEST(ExpSum, Examples) {
  for (std::int64_t m : {1, 2, 17}) EXPECT_NEAR(exp_sum(TorusSequence({0.3, 0.3, 0.3}), m), 1.0, 1e-15);
  EXPECT_NEAR(exp_sum(TorusSequence({0.0, 0.5}), 1), 0.0, 1e-15);
  EXPECT_NEAR(exp_sum(grid(100), 1), 0.0, 1e-12);
  EXPECT_NEAR(exp_sum(grid(100), 100), 1.0, 1e-12);
  EXPECT_THROW(exp_sum(grid(4), 0), Error);
}

TEST(ErdosTuran, Examples) {
  EXPECT_NEAR(erdos_turan_bound(TorusSequence({0.4, 0.4}), 1), 3.0 + 4.0 / pi, 1e-14);
  for (std::int64_t M : {1, 10, 99}) {
    EXPECT_NEAR(erdos_turan_bound(grid(100), M), 6.0 / static_cast<double>(M + 1), 1e-11);
  }
}

TEST(ErdosTuran, DominatesExtremeDiscrepancy) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = 1 + static_cast<std::size_t>(rng.uniform() * 400);
    const auto seq = from_ints(random_ints(rng, n, brute_force::kUnit));
    const double extreme = extreme_discrepancy_exact(seq);
    for (std::int64_t M = 1; M <= 100; ++M) {
      EXPECT_GE(erdos_turan_bound(seq, M), extreme) << "trial " << trial << " M " << M;
    }
  }
  const auto golden = make_sequence({admissible_scale(1).r_squared, 0.0, 0.0, 2000});
  EXPECT_GE(erdos_turan_bound(golden, 30), extreme_discrepancy_exact(golden));
}

TEST(ShiftGap, ConstantSequence) {
  const auto gap = vdc_shift_gap(TorusSequence(std::vector<double>(11, 0.7)), 3, 1);
  EXPECT_NEAR(gap.gap, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(gap.bound, 0.2);
}

TEST(ShiftGap, GoldenQuadratic) {
  const auto seq = make_sequence({admissible_scale(1).r_squared, 0.0, 0.0, 10025});
  const auto gap = vdc_shift_gap(seq, 1, 25);
  EXPECT_DOUBLE_EQ(gap.bound, 0.005);
  EXPECT_LE(gap.gap, 0.005);
}

TEST(ShiftGap, NeverExceedsBound) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 2 + static_cast<std::int64_t>(rng.uniform() * 300);
    const auto H = 1 + static_cast<std::int64_t>(rng.uniform() * 40);
    const auto m = 1 + static_cast<std::int64_t>(rng.uniform() * 20);
    std::vector<double> x(static_cast<std::size_t>(n + H));
    for (auto& v : x) v = rng.uniform();
    const auto gap = vdc_shift_gap(TorusSequence(x), m, H);
    EXPECT_LE(gap.gap, gap.bound + 1e-12);
    EXPECT_DOUBLE_EQ(gap.bound, 2.0 * static_cast<double>(H) / static_cast<double>(n));
  }
}

TEST(ShiftGap, NeedsEnoughTerms) {
  try {
    vdc_shift_gap(TorusSequence({0.1, 0.2}), 1, 2);
    FAIL() << "expected insufficient-terms";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientTerms);
  }
}

TEST(QuadraticExpSum, ExampleAndTrivialRegime) {
  const auto row = quadratic_expsum_bound(100000, 1, 4, admissible_scale(1), 0.0);
  EXPECT_NEAR(row.analytic, 8e-5 + std::sqrt(0.25 + 12e-5), 1e-15);
  EXPECT_NEAR(row.analytic, 0.50020, 1e-5);
  EXPECT_LE(row.exact, row.analytic);
  EXPECT_GT(analytic_expsum_bound(1000, 100, 4), 1.0);
}

TEST(QuadraticExpSum, ExactBelowAnalytic) {
  for (std::int64_t n : {10000, 100000}) {
    const auto [H, M] = final_bound_parameters(n);
    for (std::int64_t offset : {0, 1, 7}) {
      for (double A : {0.0, 0.3, 0.77}) {
        const auto seq = make_sequence({admissible_scale(offset).r_squared, A, 0.0, n});
        for (std::int64_t m = 1; m <= M; ++m) {
          EXPECT_LE(exp_sum(seq, m), analytic_expsum_bound(n, m, H))
              << "n " << n << " offset " << offset << " A " << A << " m " << m;
        }
      }
    }
  }
}

TEST(QuadraticExpSum, IndependentOfB) {
  const auto scale = admissible_scale(1);
  const double base = exp_sum(make_sequence({scale.r_squared, 0.3, 0.0, 5000}), 3);
  EXPECT_NEAR(exp_sum(make_sequence({scale.r_squared, 0.3, 0.61, 5000}), 3), base, 1e-12);
}

TEST(GoldenQuality, Examples) {
  const auto one = golden_quality(1);
  EXPECT_NEAR(one.min_product, 1.0 - one.z, 1e-16);
  EXPECT_NEAR(one.min_product, 0.38197, 1e-5);

  const auto big = golden_quality(1000000);
  EXPECT_GE(big.min_product, 1.0 / 3.0);
  EXPECT_EQ(big.witness_q, 1);
  EXPECT_NEAR(big.tail_min_product, 1.0 / std::sqrt(5.0), 1e-3);
  // Witnesses of the tail minimum are Fibonacci numbers.
  std::int64_t a = 1;
  std::int64_t b = 1;
  while (b < big.tail_witness_q) {
    const auto c = a + b;
    a = b;
    b = c;
  }
  EXPECT_EQ(b, big.tail_witness_q);
}

TEST(Viete, Examples) {
  EXPECT_EQ(viete_identity(1, 1), 1);
  // Consecutive Fibonacci numbers, smaller one first.
  std::int64_t p = 1;
  std::int64_t q = 1;
  for (int k = 1; k <= 30; ++k) {
    EXPECT_EQ(viete_identity(p, q), 1) << k;
    const auto next = p + q;
    p = q;
    q = next;
  }
  EXPECT_EQ(viete_identity(2, 1), 5);
  EXPECT_THROW(viete_identity(3, 0), Error);
}

TEST(Viete, NeverZeroOnSmallRange) {
  for (std::int64_t p = -300; p <= 300; ++p) {
    for (std::int64_t q = -300; q <= 300; ++q) {
      if (q == 0) continue;
      ASSERT_GE(viete_identity(p, q), 1) << p << " " << q;
    }
  }
}

TEST(FinalBound, Examples) {
  const auto a = final_bound(100000);
  EXPECT_EQ(a.H, 4);
  EXPECT_EQ(a.M, 40);
  const double expected = 6.0 / 41.0 + 4.0 / pi * (1.0 + std::log(40.0)) * (8e-5 + 0.5) +
                          8.0 * std::sqrt(3.0) / pi * std::sqrt(160.0 / 1e5);
  EXPECT_NEAR(a.value, expected, 1e-13);
  EXPECT_NEAR(a.value, 3.31, 0.01);
  EXPECT_LT(a.value, theorem_bound(100000));

  const auto b = final_bound(10'000'000'000);
  EXPECT_EQ(b.H, 400);
  EXPECT_EQ(b.M, 400);
  EXPECT_NEAR(b.value, 0.478, 0.001);
  EXPECT_LT(b.value, theorem_bound(10'000'000'000));

  try {
    final_bound(1000);
    FAIL() << "expected below-range";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BelowRange);
  }
}

TEST(FinalBound, ParametersAreExactFloors) {
  // Perfect fifth powers sit exactly on the floor boundaries.
  EXPECT_EQ(final_bound_parameters(3125).first, 1);   // 3125^(2/5) = 25
  EXPECT_EQ(final_bound_parameters(3124).first, 0);
  EXPECT_EQ(final_bound_parameters(32).second, 8);     // 4 * 2
  EXPECT_EQ(final_bound_parameters(31).second, 7);
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto n = static_cast<std::int64_t>(std::pow(10.0, 4.0 + 10.0 * rng.uniform()));
    const auto [H, M] = final_bound_parameters(n);
    const long double x = static_cast<long double>(n);
    EXPECT_LE(25.0L * H, std::pow(x, 0.4L) * (1 + 1e-15L));
    EXPECT_GT(25.0L * (H + 1), std::pow(x, 0.4L) * (1 - 1e-15L));
    EXPECT_LE(static_cast<long double>(M), 4.0L * std::pow(x, 0.2L) * (1 + 1e-15L));
    EXPECT_GT(static_cast<long double>(M + 1), 4.0L * std::pow(x, 0.2L) * (1 - 1e-15L));
  }
}

TEST(FullReport, ChainAtHundredThousand) {
  const auto report = full_report(QuadraticSeq{admissible_scale(1).r_squared, 0.0, 0.0, 100000});
  EXPECT_EQ(report.M, 40);
  EXPECT_EQ(report.H, 4);
  ASSERT_EQ(report.rows.size(), 40u);
  EXPECT_LE(report.exact_star, report.exact_extreme);
  EXPECT_LE(report.exact_extreme, report.et_bound);
  EXPECT_LE(report.et_bound, report.vdc_bound);
  for (const auto& row : report.rows) EXPECT_LE(row.exact, row.analytic) << row.m;
  EXPECT_NEAR(report.et_bound, erdos_turan_bound(make_sequence({admissible_scale(1).r_squared, 0.0, 0.0, 100000}), 40),
              1e-12);
  for (double v : {report.exact_star, report.exact_extreme, report.et_bound, report.vdc_bound,
                   report.final_bound, report.theorem_bound}) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
  }
  EXPECT_LT(report.final_bound, report.theorem_bound);
}
