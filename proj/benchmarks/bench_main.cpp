#include <benchmark/benchmark.h>

#include "redmash/bath.hpp"
#include "redmash/config.hpp"
#include "redmash/ensemble.hpp"
#include "redmash/hybrid.hpp"
#include "redmash/mash.hpp"
#include "redmash/models.hpp"
#include "redmash/spin_propagator.hpp"

using namespace redmash;

static void BM_SpinPropagatorRotation(benchmark::State& state) {
  const SpinGenerator g{1.3, 0.4, 0.0};
  double h = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(spin_propagator(g, h));
    h += 1e-9;
  }
}
BENCHMARK(BM_SpinPropagatorRotation);

static void BM_SpinPropagatorDamped(benchmark::State& state) {
  const SpinGenerator g{1.3, 0.4, 0.2};
  double h = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(spin_propagator(g, h));
    h += 1e-9;
  }
}
BENCHMARK(BM_SpinPropagatorDamped);

static void BM_GammaImagQuadrature(benchmark::State& state) {
  const DebyeBath bath{0.5, 10.0, 0.25};
  double w = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_imag(bath, w));
    w += 1e-6;
  }
}
BENCHMARK(BM_GammaImagQuadrature);

static void BM_GammaImagTable(benchmark::State& state) {
  const DebyeCorrelation corr(DebyeBath{0.5, 10.0, 0.25}, 60.0, 2001);
  double w = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(corr.im(w));
    w += 1e-6;
  }
}
BENCHMARK(BM_GammaImagTable);

static void BM_MashStepSpinBoson(benchmark::State& state) {
  SpinBosonConfig cfg;
  cfg.classical.n_modes = static_cast<std::size_t>(state.range(0));
  const TrajectorySetup setup = spin_boson_setup(cfg, Method::mash);
  RandomStream rng(1, 0);
  auto [q, p] = setup.sample_nuclei(rng);
  MashState s = make_mash_state(*setup.model, q, p, sample_sphere(rng, Hemisphere::full));
  for (auto _ : state) s = mash_step(std::move(s), *setup.model, 0.0005);
  benchmark::DoNotOptimize(s.spin);
}
BENCHMARK(BM_MashStepSpinBoson)->Arg(200)->Arg(400);

static void BM_HybridStepSpinBoson(benchmark::State& state) {
  const SpinBosonConfig cfg;
  const TrajectorySetup setup = spin_boson_setup(cfg, Method::hybrid);
  RandomStream init(1, 0);
  RandomStream jumps(1, 0, RandomStream::Purpose::jumps);
  auto [q, p] = setup.sample_nuclei(init);
  HybridState s = make_hybrid_state(*setup.model, *setup.dissipator, q, p, sample_sphere(init, Hemisphere::full));
  for (auto _ : state) s = hybrid_step(std::move(s), *setup.model, *setup.dissipator, 0.01, jumps);
  benchmark::DoNotOptimize(s.spin);
}
BENCHMARK(BM_HybridStepSpinBoson);

static void BM_HybridStepCavity(benchmark::State& state) {
  const CavityConfig cfg;
  const TrajectorySetup setup = cavity_setup(cfg, Method::hybrid);
  RandomStream init(1, 0);
  RandomStream jumps(1, 0, RandomStream::Purpose::jumps);
  auto [q, p] = setup.sample_nuclei(init);
  HybridState s = make_hybrid_state(*setup.model, *setup.dissipator, q, p, sample_sphere(init, Hemisphere::upper));
  for (auto _ : state) s = hybrid_step(std::move(s), *setup.model, *setup.dissipator, 10.0, jumps);
  benchmark::DoNotOptimize(s.spin);
}
BENCHMARK(BM_HybridStepCavity);

static void BM_CavityEnsemble(benchmark::State& state) {
  Config cfg;
  cfg.model = ModelKind::cavity;
  cfg.run.method = Method::hybrid;
  cfg.run.n_traj = static_cast<std::size_t>(state.range(0));
  cfg.run.n_output = 100;
  for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(cfg, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CavityEnsemble)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
