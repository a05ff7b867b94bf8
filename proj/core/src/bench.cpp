#include "dualprop/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "dualprop/errors.hpp"
#include "dualprop/instrument.hpp"

namespace dualprop {

namespace {

using clock = std::chrono::steady_clock;

volatile double benchmark_sink = 0.0;

double time_batch_ns(Engine engine, const Model& model, const Sample& sample, std::size_t count, double& sink) {
  const auto start = clock::now();
  for (std::size_t i = 0; i < count; ++i) sink += compute_gradient(engine, model, sample).db();
  return std::chrono::duration<double, std::nano>(clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

void validate(const BenchConfig& cfg) {
  if (cfg.widths.empty()) throw ConfigError("bench: width list is empty");
  if (cfg.engines.empty()) throw ConfigError("bench: engine list is empty");
  for (std::size_t w : cfg.widths) {
    if (w == 0) throw ConfigError("bench: widths must be at least 1");
  }
  if (cfg.reps < kMinBenchReps) {
    throw ConfigError("bench: reps must be at least " + std::to_string(kMinBenchReps));
  }
}

Perceptron guarded_perceptron(std::size_t width, Activation act, SplitMix64& rng) {
  for (;;) {
    std::vector<double> w(width);
    double sum = 0.0;
    for (double& v : w) {
      v = rng.uniform(-2.0, 2.0);
      sum += v;
    }
    const double b = rng.uniform(-2.0, 2.0);
    if (std::fabs(sum) >= 1e-3) return Perceptron(std::move(w), b, act);
  }
}

Sample random_sample(std::size_t width, SplitMix64& rng) {
  Sample s;
  s.x.resize(width);
  for (double& v : s.x) v = rng.uniform(-1.0, 1.0);
  s.y = rng.uniform01();
  return s;
}

std::vector<BenchResult> run_bench(const BenchConfig& cfg) {
  validate(cfg);
  std::vector<BenchResult> results;
  double sink = 0.0;
  for (Engine engine : cfg.engines) {
    for (std::size_t width : cfg.widths) {
      // Same model for every engine at a given width.
      SplitMix64 rng(cfg.seed ^ (0x9E3779B97F4A7C15ULL * (width + 1)));
      const Model model = guarded_perceptron(width, Activation::Sigmoid, rng);
      const Sample sample = random_sample(width, rng);

      instrument::reset_passes();
      sink += compute_gradient(engine, model, sample).db();
      const std::uint64_t passes = instrument::passes();

      std::size_t batch = 1;
      while (time_batch_ns(engine, model, sample, batch, sink) < cfg.min_batch_ns && batch < (std::size_t{1} << 24)) {
        batch *= 2;
      }
      for (std::size_t i = 0; i < cfg.warmup; ++i) time_batch_ns(engine, model, sample, batch, sink);

      std::vector<double> per_gradient;
      per_gradient.reserve(cfg.reps);
      for (std::size_t r = 0; r < cfg.reps; ++r) {
        per_gradient.push_back(time_batch_ns(engine, model, sample, batch, sink) / static_cast<double>(batch));
      }
      results.push_back({engine, width, width, batch, median(std::move(per_gradient)), passes, cfg.reps});
    }
  }
  std::sort(results.begin(), results.end(), [](const BenchResult& a, const BenchResult& b) {
    if (a.engine != b.engine) return a.engine < b.engine;
    return a.params < b.params;
  });
  benchmark_sink = sink;
  return results;
}

std::string bench_csv(std::span<const BenchResult> results) {
  std::string out = "engine,width,P,passes,median_ns\n";
  char buf[64];
  for (const auto& r : results) {
    const auto end = std::to_chars(buf, buf + sizeof buf, r.median_ns).ptr;
    out += std::string(to_string(r.engine)) + "," + std::to_string(r.width) + "," + std::to_string(r.params) + "," +
           std::to_string(r.passes) + "," + std::string(buf, end) + "\n";
  }
  return out;
}

std::string bench_table(std::span<const BenchResult> results) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %8s %8s %8s %14s %10s\n", "engine", "width", "P", "passes", "median ns/grad",
                "batch");
  out += line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-10s %8zu %8zu %8llu %14.1f %10zu\n", std::string(to_string(r.engine)).c_str(),
                  r.width, r.params, static_cast<unsigned long long>(r.passes), r.median_ns, r.samples);
    out += line;
  }
  return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ShapeError("fit_line: need two equally long series of length >= 2");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace dualprop
