// Serial reference against OpenMP kernels, plus one full solver step.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "bck/kernels.hpp"
#include "bck/nonlinear.hpp"

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bck::Exec exec_of(const benchmark::State& state) {
  return state.range(1) ? bck::Exec::parallel : bck::Exec::serial;
}

void BM_ContractAxis(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t m = 3 * n / 2;
  const auto mat = random_vector(m * n, 1);
  const auto in = random_vector(n * n, 2);
  std::vector<double> out(m * n);
  for (auto _ : state) {
    bck::kernels::contract_axis(exec_of(state), {mat.data(), m, n}, in, {n, n}, 1, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Multiply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_vector(n * n, 3);
  const auto b = random_vector(n * n, 4);
  std::vector<double> out(n * n);
  for (auto _ : state) {
    bck::kernels::multiply(exec_of(state), a, b, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ApplyBlocks(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto raw = random_vector(12 * n * n, 5);
  std::vector<std::array<double, 9>> blocks(n * n);
  std::vector<std::array<double, 3>> in(n * n);
  std::vector<std::array<double, 3>> out(n * n);
  for (std::size_t i = 0; i < n * n; ++i) {
    for (int j = 0; j < 9; ++j) blocks[i][static_cast<std::size_t>(j)] = raw[12 * i + static_cast<std::size_t>(j)];
    for (int j = 0; j < 3; ++j) in[i][static_cast<std::size_t>(j)] = raw[12 * i + 9 + static_cast<std::size_t>(j)];
  }
  for (auto _ : state) {
    bck::kernels::apply_blocks(exec_of(state), blocks, in, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_SolverStep(benchmark::State& state) {
  bck::DomainSpec d;
  d.dimension = 2;
  d.modes = static_cast<int>(state.range(0));
  const auto basis = bck::Basis::create(d, exec_of(state));
  bck::ModelParams p;
  p.k = 0.2;
  p.s = 1;
  const auto data = bck::CompatibilityData::make(bck::SpectralField::single_mode(basis, 1e-3, 1, 1),
                                                 bck::SpectralField(basis), bck::SpectralField(basis), p);
  const bck::Stepper stepper(basis, p, 1e-3);
  const auto st = data.state();
  for (auto _ : state) {
    auto r = stepper.advance(st, data.uttt0);
    benchmark::DoNotOptimize(r.state.u.coeffs().data());
  }
}

void kernel_args(benchmark::internal::Benchmark* b) {
  for (int n : {32, 128, 512})
    for (int par : {0, 1}) b->Args({n, par});
  b->ArgNames({"N", "parallel"});
}

void step_args(benchmark::internal::Benchmark* b) {
  for (int n : {16, 32})
    for (int par : {0, 1}) b->Args({n, par});
  b->ArgNames({"N", "parallel"});
}

}  // namespace

BENCHMARK(BM_ContractAxis)->Apply(kernel_args);
BENCHMARK(BM_Multiply)->Apply(kernel_args);
BENCHMARK(BM_ApplyBlocks)->Apply(kernel_args);
BENCHMARK(BM_SolverStep)->Apply(step_args);

BENCHMARK_MAIN();
