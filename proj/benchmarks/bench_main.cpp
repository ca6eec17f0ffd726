#include <benchmark/benchmark.h>

#include <cmath>

#include "papevo/field.hpp"
#include "papevo/mild.hpp"
#include "papevo/semigroup.hpp"

namespace {

using namespace papevo;

Backend backend_of(int64_t i) { return i == 0 ? Backend::kernel : Backend::fourier; }

void BM_SemigroupApply(benchmark::State& state) {
  const GridSpec g(3, static_cast<int>(state.range(1)), 8.0);
  const Semigroup sg(SemigroupSpec(Coefficient::constant(1.0, 0.5), backend_of(state.range(0)), g));
  const Field u = tensor_bump(g, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(sg.apply(0.3, u));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_SemigroupApply)->ArgsProduct({{0, 1}, {16, 32, 48}})->Unit(benchmark::kMillisecond);

void BM_LorentzNorm(benchmark::State& state) {
  const GridSpec g(3, static_cast<int>(state.range(0)), 8.0);
  const Field u = tensor_bump(g, {0.3, 0.0, -0.2}, {1.0, 2.0, 0.5});
  const LorentzExponents e(9.0 / 7.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(lorentz_norm(u, e));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_LorentzNorm)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_SolveLinear(benchmark::State& state) {
  const GridSpec g(3, 16, 4.0);
  const Semigroup sg(SemigroupSpec(Coefficient::constant(1.0, 0.5), Backend::fourier, g));
  const Field phi = tensor_bump(g, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  const double H = static_cast<double>(state.range(0));
  const TimeGrid fg(-H, 4.0, static_cast<int>(10 * (H + 4.0)));
  const auto f = Trajectory::separable(fg, phi, [](double t) { return cplx{std::cos(t), 0.0}; },
                                       LorentzExponents::weak(9.0 / 8.0));
  const TimeGrid window(0.0, 4.0, 8);
  for (auto _ : state) benchmark::DoNotOptimize(solve_linear(sg, f, HistoryQuadrature(H, 0.85, 1e-3), window));
}
BENCHMARK(BM_SolveLinear)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
