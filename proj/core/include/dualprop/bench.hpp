#pragma once

// CPU timing of the three gradient engines on single-layer perceptrons of
// increasing width.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dualprop/trainer.hpp"

namespace dualprop {

struct BenchConfig {
  std::vector<std::size_t> widths{8, 16, 32, 64, 128, 256};
  std::vector<Engine> engines{Engine::Paper, Engine::Seeded, Engine::Backprop};
  std::size_t reps = 10;
  std::size_t warmup = 3;
  std::uint64_t seed = 0;
  /// Each repetition times a batch of gradients lasting at least this long.
  double min_batch_ns = 1'000'000.0;
};

/// Minimum repetitions accepted by run_bench.
inline constexpr std::size_t kMinBenchReps = 10;

struct BenchResult {
  Engine engine = Engine::Seeded;
  std::size_t width = 0;
  std::size_t params = 0;      // P: number of weights (= width)
  std::size_t samples = 0;     // gradients per timed repetition
  double median_ns = 0.0;      // median over repetitions of ns per gradient
  std::uint64_t passes = 0;    // forward passes per gradient, counted
  std::size_t reps = 0;
};

/// Throws ConfigError for empty lists, zero widths or reps < kMinBenchReps.
void validate(const BenchConfig& cfg);

/// Results sorted by (engine, P).
std::vector<BenchResult> run_bench(const BenchConfig& cfg);

/// Perceptron with weights in [-2, 2] and |sum(w)| >= 1e-3, plus a sample
/// with x in [-1, 1] and y in [0, 1].
Perceptron guarded_perceptron(std::size_t width, Activation act, SplitMix64& rng);
Sample random_sample(std::size_t width, SplitMix64& rng);

/// engine,width,P,passes,median_ns
std::string bench_csv(std::span<const BenchResult> results);
std::string bench_table(std::span<const BenchResult> results);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace dualprop
