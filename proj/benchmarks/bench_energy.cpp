#include <benchmark/benchmark.h>

#include <cmath>

#include "morrey/aronsson.hpp"
#include "morrey/grid.hpp"
#include "morrey/solver.hpp"

namespace {

morrey::ScalarField make_field(std::size_t cells_per_octave) {
  const auto spec = morrey::GridSpec::per_octave(1.0 / 64, 4096, cells_per_octave, 65);
  return morrey::initial_guess(morrey::LogPolarGrid(spec), 4.0, 1.0);
}

void BM_Energy(benchmark::State& state) {
  const auto u = make_field(static_cast<std::size_t>(state.range(0)));
  const morrey::EnergyParams prm{4.0, 1e-4};
  for (auto _ : state) benchmark::DoNotOptimize(morrey::energy(u, prm));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(u.grid().size()));
}
BENCHMARK(BM_Energy)->Arg(8)->Arg(32);

void BM_Gradient(benchmark::State& state) {
  const auto u = make_field(static_cast<std::size_t>(state.range(0)));
  const morrey::EnergyParams prm{4.0, 1e-4};
  for (auto _ : state) benchmark::DoNotOptimize(morrey::energy_gradient(u, prm));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(u.grid().size()));
}
BENCHMARK(BM_Gradient)->Arg(8)->Arg(32);

void BM_Hessian(benchmark::State& state) {
  const auto u = make_field(static_cast<std::size_t>(state.range(0)));
  const morrey::EnergyParams prm{4.0, 1e-4};
  for (auto _ : state) benchmark::DoNotOptimize(morrey::energy_hessian(u, prm));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(u.grid().size()));
}
BENCHMARK(BM_Hessian)->Arg(8)->Arg(32);

void BM_AngularProfile(benchmark::State& state) {
  const double kappa = morrey::beta_p(4.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(morrey::angular_profile(kappa, 4.0, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_AngularProfile)->Arg(1001);

void BM_SolveCoarse(benchmark::State& state) {
  morrey::SolverConfig cfg;
  cfg.eps_schedule = {1e-2, 1e-3};
  cfg.grad_tol = 1e-7;
  const auto spec = morrey::GridSpec::per_octave(1.0 / 8, 64, 8, 33);
  for (auto _ : state) benchmark::DoNotOptimize(morrey::solve_extremal(spec, 4.0, cfg).energy);
}
BENCHMARK(BM_SolveCoarse)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
