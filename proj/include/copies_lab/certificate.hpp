#pragma once

/**
 * @file certificate.hpp
 * @brief Finite certificate that an annular set contains no congruent copy
 *        of an n-term arithmetic progression with a given admissible step.
 *
 * Any copy of {0, r, ..., (n-1) r} in the annular set with gap eps0 yields a
 * quadratic sequence r^2 k^2 + A k + B whose first n terms miss an interval
 * of length eps0, so its extreme discrepancy is at least eps0. The
 * certificate shows the opposite for every (A, B):
 *
 *  - B only rotates the torus and extreme discrepancy is rotation invariant,
 *    so B = 0 suffices;
 *  - A matters mod 1; on a grid of step dA every A is within dA of a node,
 *    and moving A by dA moves term k by at most (n-1) dA, changing the
 *    discrepancy by at most 2 (n-1) dA.
 *
 * Hence max over the grid + 2 (n-1) dA < eps0 rules out every copy.
 */

#include "copies_lab/constructions.hpp"
#include "copies_lab/discrepancy.hpp"
#include "copies_lab/sampling.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace copies_lab {

struct AvoidanceCertificate {
  std::int64_t n = 0;
  AdmissibleScale scale;
  double eps0 = 0.0;
  double a_grid_step = 0.0;
  double max_discrepancy = 0.0;  ///< largest extreme discrepancy over the A grid
  double worst_A = 0.0;
  double slack = 0.0;            ///< 2 (n - 1) a_grid_step
  std::int64_t grid_points = 0;
  bool verdict = false;          ///< max_discrepancy + slack < eps0
};

inline double lipschitz_slack(std::int64_t n, double a_grid_step) {
  return 2.0 * static_cast<double>(n - 1) * a_grid_step;
}

struct GridSweep {
  double max_discrepancy = 0.0;
  double worst_A = 0.0;
  std::int64_t grid_points = 0;
};

/// Largest extreme discrepancy of the first n terms over A in {0, dA, 2 dA, ...} below 1.
inline GridSweep discrepancy_grid_sweep(std::int64_t n, const AdmissibleScale& scale,
                                        double a_grid_step) {
  require(n >= 2, ErrorKind::InvalidArgument, "n must be at least 2");
  require(a_grid_step > 0.0 && a_grid_step <= 1.0, ErrorKind::InvalidArgument,
          "A grid step must lie in (0, 1]");
  const auto count = static_cast<std::int64_t>(std::ceil(1.0 / a_grid_step));
  std::vector<double> values(static_cast<std::size_t>(count));
  parallel_for(count, [&](std::int64_t i) {
    const double A = static_cast<double>(i) * a_grid_step;
    values[static_cast<std::size_t>(i)] =
        extreme_discrepancy_exact(make_sequence(QuadraticSeq{scale.r_squared, A, 0.0, n}));
  });
  GridSweep sweep;
  sweep.grid_points = count;
  for (std::int64_t i = 0; i < count; ++i) {
    if (values[static_cast<std::size_t>(i)] > sweep.max_discrepancy) {
      sweep.max_discrepancy = values[static_cast<std::size_t>(i)];
      sweep.worst_A = static_cast<double>(i) * a_grid_step;
    }
  }
  return sweep;
}

inline AvoidanceCertificate ap_avoidance_certificate(std::int64_t n, const AdmissibleScale& scale,
                                                     double eps0, double a_grid_step) {
  require(eps0 > 0.0 && eps0 < 1.0, ErrorKind::InvalidArgument, "eps0 must lie in (0, 1)");
  require(a_grid_step > 0.0, ErrorKind::InvalidArgument, "A grid step must be positive");
  const double slack = lipschitz_slack(n, a_grid_step);
  require(slack < eps0, ErrorKind::GridTooCoarse,
          "2 (n - 1) dA >= eps0: the certificate cannot succeed at this grid step");

  const auto sweep = discrepancy_grid_sweep(n, scale, a_grid_step);
  AvoidanceCertificate cert;
  cert.n = n;
  cert.scale = scale;
  cert.eps0 = eps0;
  cert.a_grid_step = a_grid_step;
  cert.max_discrepancy = sweep.max_discrepancy;
  cert.worst_A = sweep.worst_A;
  cert.slack = slack;
  cert.grid_points = sweep.grid_points;
  cert.verdict = cert.max_discrepancy + cert.slack < eps0;
  return cert;
}

/// eps0 = factor * (max grid discrepancy + slack), kept strictly below 1.
inline double auto_eps0(std::int64_t n, const AdmissibleScale& scale, double a_grid_step,
                        double factor = 1.05) {
  const auto sweep = discrepancy_grid_sweep(n, scale, a_grid_step);
  const double eps0 = factor * (sweep.max_discrepancy + lipschitz_slack(n, a_grid_step));
  return std::min(eps0, std::nextafter(1.0, 0.0));
}

struct CertificateRecheck {
  std::int64_t trials = 0;
  std::int64_t hits = 0;  ///< trials whose first n terms land in the middle gap
  double first_miss_A = 0.0;
  double first_miss_B = 0.0;
};

/// Draws seeded random (A, B) in [0, 1)^2 and applies gap_hit_test to each sequence.
inline CertificateRecheck recheck_certificate(const AvoidanceCertificate& cert, std::int64_t trials,
                                              std::uint64_t seed) {
  struct Partial {
    std::int64_t trials = 0;
    std::int64_t hits = 0;
    bool missed = false;
    double A = 0.0;
    double B = 0.0;
  };
  const auto chunks = run_chunks<Partial>(
      seed, trials, [&](std::int64_t, std::int64_t begin, std::int64_t end, Rng& rng) {
        Partial p;
        for (std::int64_t i = begin; i < end; ++i) {
          const double A = rng.uniform();
          const double B = rng.uniform();
          const auto seq = quadratic_sequence(QuadraticSeq{cert.scale.r_squared, A, B, cert.n});
          ++p.trials;
          if (gap_hit_test(seq, cert.eps0)) {
            ++p.hits;
          } else if (!p.missed) {
            p.missed = true;
            p.A = A;
            p.B = B;
          }
        }
        return p;
      });
  CertificateRecheck out;
  bool missed = false;
  for (const auto& p : chunks) {
    out.trials += p.trials;
    out.hits += p.hits;
    if (p.missed && !missed) {
      missed = true;
      out.first_miss_A = p.A;
      out.first_miss_B = p.B;
    }
  }
  return out;
}

}  // namespace copies_lab
