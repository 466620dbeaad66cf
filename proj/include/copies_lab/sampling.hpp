#pragma once

/**
 * @file sampling.hpp
 * @brief Seeded random streams, uniform samplers on balls and spheres, and
 *        a deterministic chunked parallel loop.
 *
 * Every Monte Carlo routine splits its work into fixed-size chunks. Chunk i
 * draws from substream(seed, i), so results do not depend on the number of
 * worker threads.
 */

#include "copies_lab/core.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace copies_lab {

enum class SamplingMode { UniformMonteCarlo, LatticeGrid };

inline const char* to_string(SamplingMode mode) {
  return mode == SamplingMode::UniformMonteCarlo ? "uniform-monte-carlo" : "lattice-grid";
}

struct SamplerConfig {
  std::uint64_t seed = 42;
  std::int64_t samples = 100000;
  SamplingMode mode = SamplingMode::UniformMonteCarlo;
};

inline void validate(const SamplerConfig& config, std::int64_t minimum = 1) {
  require(config.samples >= minimum, ErrorKind::InvalidSampler,
          "sampler needs at least " + std::to_string(minimum) + " samples, got " +
              std::to_string(config.samples));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the index-th independent substream derived from `seed`.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(engine_); }
  std::mt19937_64& engine() { return engine_; }

  /// Uniform direction on the unit sphere S^{d-1}: a normalised Gaussian vector.
  void unit_vector(Point& out) {
    double norm2 = 0.0;
    do {
      for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal();
      norm2 = out.squaredNorm();
    } while (norm2 == 0.0);
    out /= std::sqrt(norm2);
  }

  /// Uniform point in the ball B_radius(center).
  void in_ball(const Point& center, double radius, Point& out) {
    unit_vector(out);
    const double d = static_cast<double>(out.size());
    out *= radius * std::pow(uniform(), 1.0 / d);
    out += center;
  }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline constexpr std::int64_t kChunkSize = 1 << 16;

namespace detail {
inline int& thread_override() {
  static int value = 0;
  return value;
}
}  // namespace detail

/// Caps worker threads; 0 restores the default (COPIES_LAB_THREADS, else hardware).
inline void set_thread_count(int threads) { detail::thread_override() = std::max(0, threads); }

inline int thread_count() {
  if (detail::thread_override() > 0) return detail::thread_override();
  if (const char* env = std::getenv("COPIES_LAB_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Runs task(i) for i in [0, count) on up to thread_count() workers. Tasks
/// must write only to their own output slot.
template <typename Task>
void parallel_for(std::int64_t count, Task&& task) {
  const int workers = static_cast<int>(std::min<std::int64_t>(thread_count(), count));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::int64_t i = next++; i < count; i = next++) task(i);
    });
  }
}

/// Splits `total` draws into chunks; chunk_fn(chunk_index, begin, end, rng)
/// returns a per-chunk result, collected in chunk order.
template <typename Result, typename ChunkFn>
std::vector<Result> run_chunks(std::uint64_t seed, std::int64_t total, ChunkFn&& chunk_fn) {
  const std::int64_t chunks = (total + kChunkSize - 1) / kChunkSize;
  std::vector<Result> results(static_cast<std::size_t>(chunks));
  parallel_for(chunks, [&](std::int64_t c) {
    Rng rng(substream(seed, static_cast<std::uint64_t>(c)));
    const std::int64_t begin = c * kChunkSize;
    const std::int64_t end = std::min(total, begin + kChunkSize);
    results[static_cast<std::size_t>(c)] = chunk_fn(c, begin, end, rng);
  });
  return results;
}

/// Binomial standard error of a proportion estimated from n draws.
inline double binomial_std_error(double p, std::int64_t n) {
  if (n <= 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

}  // namespace copies_lab
