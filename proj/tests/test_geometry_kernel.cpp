#include "copies_lab/geometry_kernel.hpp"
#include "copies_lab/pattern_search.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace copies_lab;

namespace {

constexpr double pi = std::numbers::pi;

Point axis_point(int d, double norm) {
  Point v = Point::Zero(d);
  v[0] = norm;
  return v;
}

// Independent sphere-area oracle through std::tgamma.
double area_oracle(int d, double r) {
  return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d) * std::pow(r, d - 1);
}

}  // namespace

TEST(SurfaceArea, Examples) {
  EXPECT_NEAR(surface_area({2, 1.0}), 2.0 * pi, 1e-14);
  EXPECT_NEAR(surface_area({3, 1.0}), 4.0 * pi, 1e-14);
  EXPECT_NEAR(surface_area({4, 1.0}), 2.0 * pi * pi, 1e-13);
}

TEST(SurfaceArea, AgainstTgammaOracle) {
  for (int d = 2; d <= 10; ++d) {
    for (double r : {0.3, 1.0, 2.5}) {
      EXPECT_NEAR(surface_area({d, r}) / area_oracle(d, r), 1.0, 1e-13) << d << " " << r;
    }
  }
}

TEST(SurfaceArea, ScalingLaw) {
  for (int d = 2; d <= 6; ++d) {
    for (double r : {0.1, 1.0, 10.0}) {
      EXPECT_NEAR(surface_area({d, r}), std::pow(r, d - 1) * surface_area({d, 1.0}),
                  1e-14 * surface_area({d, r}));
    }
  }
}

TEST(SurfaceArea, RejectsInvalidSpecs) {
  EXPECT_THROW(surface_area({1, 1.0}), Error);
  EXPECT_THROW(surface_area({2, 0.0}), Error);
  EXPECT_THROW(surface_area({2, -1.0}), Error);
}

TEST(KernelValue, Examples) {
  const KernelSpec plane{2, 1.0};
  EXPECT_EQ(kernel_value(plane, axis_point(2, 3.0)), ExtendedValue::finite(0.0));
  EXPECT_TRUE(kernel_value(plane, Point::Zero(2)).is_infinite());
  EXPECT_TRUE(kernel_value(plane, axis_point(2, 2.0)).is_infinite());
  EXPECT_TRUE(kernel_value(plane, axis_point(2, 2.0 + 5e-13)).is_infinite());
  EXPECT_FALSE(kernel_value(plane, axis_point(2, 2.0 - 1e-9)).is_infinite());
  EXPECT_NEAR(kernel_value({3, 1.0}, axis_point(3, 1.0)).value(), 2.0 * pi, 1e-14);
  EXPECT_NEAR(kernel_value(plane, axis_point(2, 1.0)).value(), 4.0 / std::sqrt(3.0), 1e-14);
}

TEST(KernelValue, ClosedFormInOddAndEvenDimensions) {
  // d = 4: 2 r^2 pi^(3/2) (r^2 - s^2/4)^(1/2) / (Gamma(3/2) s) = 4 pi r^2 sqrt(r^2 - s^2/4) / s
  const double r = 1.5;
  for (double s : {0.1, 1.0, 2.9}) {
    const double expected = 4.0 * pi * r * r * std::sqrt(r * r - 0.25 * s * s) / s;
    EXPECT_NEAR(kernel_value({4, r}, axis_point(4, s)).value() / expected, 1.0, 1e-13);
  }
}

TEST(KernelValue, DependsOnlyOnNorm) {
  const KernelSpec spec{2, 1.0};
  const Point v = point({0.3, 0.7});
  const auto base = kernel_value(spec, v);
  // Quarter turns and reflections through both axes move v exactly.
  for (const Point& w : {point({-0.7, 0.3}), point({-0.3, -0.7}), point({0.7, -0.3}),
                         point({0.7, 0.3}), point({-0.3, 0.7})}) {
    EXPECT_EQ(kernel_value(spec, w), base);
  }
  for (int d : {2, 3, 5}) {
    const KernelSpec s{d, 1.0};
    Point u = Point::Zero(d);
    u[0] = 0.4;
    u[1] = 0.9;
    const double reference = kernel_value(s, u).value();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Point w = random_rotation(d, seed) * u;
      EXPECT_NEAR(kernel_value(s, w).value(), reference, 1e-13 * reference);
    }
  }
}

TEST(AnnulusOverlap, DisjointAnnuli) {
  const AnnulusSpec spec{{2, 1.0}, 0.01, {}};
  const auto est = annulus_overlap(spec, axis_point(2, 3.0), {1, 100000, SamplingMode::UniformMonteCarlo});
  EXPECT_EQ(est.value, 0.0);
  EXPECT_EQ(est.std_error, 0.0);
}

TEST(AnnulusOverlap, FullOverlapIsExactAnnulusArea) {
  const AnnulusSpec spec{{2, 1.0}, 0.01, {}};
  const auto est = annulus_overlap(spec, Point::Zero(2), {1, 100000, SamplingMode::UniformMonteCarlo});
  const double exact = pi * (1.01 * 1.01 - 1.0) / 1e-4;
  EXPECT_NEAR(est.value, exact, 1e-9 * exact);
  EXPECT_NEAR(est.value, 631.46, 0.01);
}

TEST(AnnulusOverlap, ApproachesKernel) {
  const AnnulusSpec spec{{2, 1.0}, 0.001, {}};
  const auto est = annulus_overlap(spec, axis_point(2, 1.0), {5, 200000, SamplingMode::UniformMonteCarlo});
  const double k = 4.0 / std::sqrt(3.0);
  EXPECT_NEAR(est.value, k, 0.001 + 3.0 * est.std_error);
}

TEST(AnnulusOverlap, ThreeDimensionalKernelCrossCheck) {
  const AnnulusSpec spec{{3, 1.0}, 0.001, {}};
  const auto est = annulus_overlap(spec, axis_point(3, 1.0), {9, 200000, SamplingMode::UniformMonteCarlo});
  EXPECT_NEAR(est.value, 2.0 * pi, 0.01 + 3.0 * est.std_error);
}

// Exact d = 2 overlaps from a 50-digit lens-area computation (inclusion-exclusion
// of four circle-circle lens areas), stored as phi - K at |v| = 1, r = 1.
TEST(AnnulusOverlap, MatchesHighPrecisionLensAreas) {
  const double k = 4.0 / std::sqrt(3.0);
  const std::vector<std::pair<double, double>> exact_gaps{
      {1e-2, 0.007729953550585598}, {1e-3, 0.0007701209810969684}, {1e-4, 7.698324326517837e-05}};
  for (const auto& [delta, gap] : exact_gaps) {
    const AnnulusSpec spec{{2, 1.0}, delta, {}};
    const auto est = annulus_overlap(spec, axis_point(2, 1.0), {11, 1000000, SamplingMode::UniformMonteCarlo});
    EXPECT_NEAR(est.value - k, gap, 4.0 * est.std_error) << "delta = " << delta;
  }
}

// Independent estimator: uniform points in the bounding square, membership in both annuli.
TEST(AnnulusOverlap, AgreesWithNaiveMembershipSampling) {
  const double r = 1.0;
  const double delta = 0.2;
  const Point v = point({0.8, 0.6});
  Rng rng(2024);
  const int n = 2000000;
  int hits = 0;
  const double half = r + delta;
  for (int i = 0; i < n; ++i) {
    const Point x = point({rng.uniform(-half, half), rng.uniform(-half, half)});
    const double a = x.norm();
    const double b = (x - v).norm();
    if (a >= r && a <= r + delta && b >= r && b <= r + delta) ++hits;
  }
  const double box = 4.0 * half * half;
  const double p = static_cast<double>(hits) / n;
  const double naive = box * p / (delta * delta);
  const double naive_se = box * std::sqrt(p * (1.0 - p) / n) / (delta * delta);

  const auto est = annulus_overlap({{2, r}, delta, {}}, v, {3, 1000000, SamplingMode::UniformMonteCarlo});
  EXPECT_NEAR(est.value, naive, 4.0 * std::hypot(naive_se, est.std_error));
}

TEST(AnnulusOverlap, LatticeModeIsDeterministicAndClose) {
  const AnnulusSpec spec{{2, 1.0}, 0.01, {}};
  const SamplerConfig lattice{0, 100000, SamplingMode::LatticeGrid};
  const auto a = annulus_overlap(spec, axis_point(2, 1.0), lattice);
  const auto b = annulus_overlap(spec, axis_point(2, 1.0), SamplerConfig{99, 100000, SamplingMode::LatticeGrid});
  EXPECT_EQ(a.value, b.value);
  EXPECT_NEAR(a.value - 4.0 / std::sqrt(3.0), 0.007729953550585598, 1e-4);
}

TEST(AnnulusOverlap, SignalsSmallSampler) {
  const AnnulusSpec spec{{2, 1.0}, 0.01, {}};
  try {
    annulus_overlap(spec, axis_point(2, 1.0), {1, 9999, SamplingMode::UniformMonteCarlo});
    FAIL() << "expected invalid-sampler";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidSampler);
  }
}

TEST(AnnulusOverlap, SameSeedSameValue) {
  const AnnulusSpec spec{{3, 1.0}, 0.01, {}};
  const SamplerConfig sampler{77, 50000, SamplingMode::UniformMonteCarlo};
  EXPECT_EQ(annulus_overlap(spec, axis_point(3, 0.5), sampler).value,
            annulus_overlap(spec, axis_point(3, 0.5), sampler).value);
}

TEST(KernelIntegral, Examples) {
  EXPECT_NEAR(kernel_integral({2, 1.0}, 200).value, 4.0 * pi * pi, 1e-9);
  EXPECT_NEAR(kernel_integral({3, 2.0}, 200).value / std::pow(16.0 * pi, 2), 1.0, 1e-12);
  EXPECT_NEAR(kernel_integral({4, 1.0}, 200).value / std::pow(area_oracle(4, 1.0), 2), 1.0, 1e-12);
}

TEST(KernelIntegral, MatchesSquaredAreaOnGrid) {
  for (int d : {2, 3, 4}) {
    for (double r : {0.5, 1.0, 2.0}) {
      const auto k = kernel_integral({d, r}, 100);
      EXPECT_LE(k.relative_error, 1e-6) << d << " " << r;
      EXPECT_NEAR(k.expected, std::pow(area_oracle(d, r), 2), 1e-12 * k.expected);
    }
  }
}

TEST(KernelIntegral, HigherDimensions) {
  for (int d = 5; d <= 9; ++d) {
    EXPECT_LE(kernel_integral({d, 1.3}, 100).relative_error, 1e-10) << d;
  }
}

TEST(KernelIntegral, NeedsHundredPoints) {
  EXPECT_THROW(kernel_integral({2, 1.0}, 99), Error);
}

TEST(PhiConvergence, TableShapeAndAnalyticColumn) {
  const std::vector<double> deltas{1e-2, 1e-3, 1e-4};
  const auto table = phi_convergence_table({2, 1.0}, axis_point(2, 1.0), deltas,
                                           {42, 1000000, SamplingMode::UniformMonteCarlo});
  ASSERT_EQ(table.rows.size(), 3u);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double delta = deltas[i];
    // (pi (2 delta + delta^2))^2 / delta^2 - (2 pi)^2 = pi^2 (4 delta + delta^2)
    const double exact = pi * pi * (4.0 * delta + delta * delta);
    EXPECT_NEAR(table.rows[i].l1_gap / exact, 1.0, 1e-9);
    EXPECT_NEAR(table.rows[i].kernel, 4.0 / std::sqrt(3.0), 1e-14);
  }
  const double ratio = table.rows.front().l1_gap_over_delta / table.rows.back().l1_gap_over_delta;
  EXPECT_LT(ratio, 2.0);
  EXPECT_GT(ratio, 0.5);
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    EXPECT_LT(std::abs(table.rows[i].gap),
              std::abs(table.rows[i - 1].gap) + 3.0 * table.rows[i].phi_std_error);
  }
  EXPECT_GE(table.fitted_order, 0.9);
}

TEST(PhiConvergence, Errors) {
  const std::vector<double> deltas{1e-2, 1e-3};
  const SamplerConfig sampler{1, 10000, SamplingMode::UniformMonteCarlo};
  for (double s : {0.0, 2.0}) {
    try {
      phi_convergence_table({2, 1.0}, axis_point(2, s), deltas, sampler);
      FAIL() << "expected singular-point";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::SingularPoint);
    }
  }
  const std::vector<double> increasing{1e-3, 1e-2};
  EXPECT_THROW(phi_convergence_table({2, 1.0}, axis_point(2, 1.0), increasing, sampler), Error);
}

TEST(Chebyshev, ConstantSamples) {
  const auto b = chebyshev_bound({{5.0, 5.0, 5.0, 5.0}, 2.0, 0.3});
  EXPECT_EQ(b.lhs_measure_estimate, 0.0);
  EXPECT_NEAR(b.rhs_bound, 0.0, 1e-15);
}

TEST(Chebyshev, TwoPointExample) {
  const auto b = chebyshev_bound({{0.0, 2.0}, 1.0, 0.5});
  EXPECT_DOUBLE_EQ(b.mean, 1.0);
  EXPECT_DOUBLE_EQ(b.lhs_measure_estimate, 1.0);
  EXPECT_DOUBLE_EQ(b.rhs_bound, 4.0);
}

TEST(Chebyshev, LhsNeverExceedsRhs) {
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 50);
    std::vector<double> values(n);
    for (auto& v : values) v = rng.uniform() < 0.3 ? 0.0 : std::exp(3.0 * rng.normal());
    values[0] = 1.0 + rng.uniform();
    const double measure = 0.1 + 10.0 * rng.uniform();
    const double theta = 0.05 + 3.0 * rng.uniform();
    const auto b = chebyshev_bound({values, measure, theta});
    EXPECT_LE(b.lhs_measure_estimate, b.rhs_bound * (1.0 + 1e-12) + 1e-12) << trial;
  }
}

TEST(Chebyshev, ZeroMean) {
  try {
    chebyshev_bound({{0.0, 0.0}, 1.0, 1.0});
    FAIL() << "expected zero-mean";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroMean);
  }
}
