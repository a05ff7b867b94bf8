#include <benchmark/benchmark.h>

#include "dualprop/bench.hpp"
#include "dualprop/oracle.hpp"

namespace {

struct Fixture {
  dualprop::Perceptron model;
  dualprop::Sample sample;
};

Fixture make_fixture(std::size_t width) {
  dualprop::SplitMix64 rng(width);
  auto model = dualprop::guarded_perceptron(width, dualprop::Activation::Sigmoid, rng);
  auto sample = dualprop::random_sample(width, rng);
  return {std::move(model), std::move(sample)};
}

void BM_GradPaper(benchmark::State& state) {
  const auto f = make_fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dualprop::grad_paper(f.model, f.sample));
  state.SetComplexityN(state.range(0));
}

void BM_GradSeeded(benchmark::State& state) {
  const auto f = make_fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dualprop::grad_forward_seeded(f.model, f.sample));
  state.SetComplexityN(state.range(0));
}

void BM_GradBackprop(benchmark::State& state) {
  const auto f = make_fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dualprop::grad_backprop_analytic(f.model, f.sample));
  state.SetComplexityN(state.range(0));
}

void BM_DualMulAdd(benchmark::State& state) {
  dualprop::Dual acc = dualprop::Dual::variable(0.5);
  const dualprop::Dual step(1.0000001, 0.25);
  for (auto _ : state) {
    acc = acc * step + 1e-9;
    benchmark::DoNotOptimize(acc);
  }
}

}  // namespace

BENCHMARK(BM_GradPaper)->RangeMultiplier(2)->Range(8, 256)->Complexity();
BENCHMARK(BM_GradSeeded)->RangeMultiplier(2)->Range(8, 256)->Complexity();
BENCHMARK(BM_GradBackprop)->RangeMultiplier(2)->Range(8, 256)->Complexity();
BENCHMARK(BM_DualMulAdd);

BENCHMARK_MAIN();
