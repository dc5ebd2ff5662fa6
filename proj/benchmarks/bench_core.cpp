#include <memory>

#include <benchmark/benchmark.h>

#include "mqcsim/evolve.hpp"
#include "mqcsim/geometry.hpp"
#include "mqcsim/hilbert.hpp"
#include "mqcsim/mqc.hpp"

using namespace mqcsim;

namespace {

CouplingTable table_for(int n) {
  const SiteSet sites = build_fcc(1.0, static_cast<std::size_t>(n), 19);
  return couplings(sites, {0.4, 1.1, 2.0}, prefactor_for_nearest_neighbor(sites, 1.0));
}

void BM_BuildH0(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CouplingTable table = table_for(n);
  const HilbertSpace space(n);
  for (auto _ : state) benchmark::DoNotOptimize(build_h0(table, space));
}
BENCHMARK(BM_BuildH0)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_BuildHdd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CouplingTable table = table_for(n);
  const HilbertSpace space(n);
  for (auto _ : state) benchmark::DoNotOptimize(build_hdd(table, space));
}
BENCHMARK(BM_BuildHdd)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_Decomposition(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const HilbertSpace space(n);
  const Operator h = build_heff(table_for(n), 0.3, space);
  for (auto _ : state) benchmark::DoNotOptimize(SpectralDecomposition::of_hamiltonian(h));
}
BENCHMARK(BM_Decomposition)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_FloquetDecomposition(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const HilbertSpace space(n);
  const CouplingTable table = table_for(n);
  const Operator h0 = build_h0(table, space);
  const Operator hdd = build_hdd(table, space);
  const Operator* ops[] = {&h0, &hdd};
  const SectorBasis basis = SectorBasis::build(space, ops);
  const CycleSpec cycle = CycleSpec::from_period(0.1, 0.3, CycleMode::pulsed);
  for (auto _ : state) benchmark::DoNotOptimize(cycle_decomposition(cycle, h0, hdd, nullptr, basis));
}
BENCHMARK(BM_FloquetDecomposition)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_StateAt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const HilbertSpace space(n);
  const auto dec = std::make_shared<SpectralDecomposition>(
      SpectralDecomposition::of_hamiltonian(build_heff(table_for(n), 0.3, space)));
  const Trajectory traj(dec, thermal_state(space));
  double t = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(traj.matrix_at(t += 0.1));
}
BENCHMARK(BM_StateAt)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_SpectrumDirect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const HilbertSpace space(n);
  const DensityOperator rho = evolve(thermal_state(space), propagator(build_h0(table_for(n), space), 1.5));
  for (auto _ : state) benchmark::DoNotOptimize(spectrum_direct(rho.matrix(), rho.matrix(), space));
}
BENCHMARK(BM_SpectrumDirect)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_PhaseProtocol(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const HilbertSpace space(n);
  const Operator h0 = build_h0(table_for(n), space);
  const DensityOperator rho = evolve(thermal_state(space), propagator(h0, 1.5));
  const Propagator back = propagator(h0, -1.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectrum_from_signal(phase_encoded_signal(rho, back, default_phase_grid(n)), n));
  }
}
BENCHMARK(BM_PhaseProtocol)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
