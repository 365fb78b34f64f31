#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "delaysl/charfn.hpp"
#include "delaysl/w_transform.hpp"

using namespace delaysl;
using std::numbers::pi;

namespace {

PiecewisePotential b1(double a) {
  const BuiltinPairs b = builtin_pairs(a);
  const KernelOperator op = KernelOperator::physical(a, b.h1);
  return build_family(1, cplx(3, 4), op, make_pair(op, b.e1, -1.0));
}

void BM_sym_eig(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) m.set(i, j, std::cos(0.37 * double(i * j + 1)) / double(1 + i + j));
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(m));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_sym_eig)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond)->Complexity();

void BM_char_fn_ode(benchmark::State& state) {
  const ProblemSpec spec(1, 0, b1(0.35 * pi));
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(char_fn_ode(spec, lambda));
}
BENCHMARK(BM_char_fn_ode)->Arg(1)->Arg(25)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_char_fn_repr(benchmark::State& state) {
  const ProblemSpec spec(1, 0, b1(0.35 * pi));
  const RepresentationEvaluator eval(spec);
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eval(lambda));
}
BENCHMARK(BM_char_fn_repr)->Arg(1)->Arg(25)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_compute_w(benchmark::State& state) {
  const PiecewisePotential q = b1(0.35 * pi);
  const int nu = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_w(nu, q));
}
BENCHMARK(BM_compute_w)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
