#include <benchmark/benchmark.h>

#include <cmath>

#include "slipfsi/harness.hpp"
#include "slipfsi/momentum.hpp"
#include "slipfsi/transport.hpp"

using namespace slipfsi;

namespace {

// Solenoidal swirl from a node stream function, zero normal flow at the walls.
VelocityField swirl(const Grid& g) {
  GridField psi(g, Stagger::node);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const Vec2 x = psi.position(i, j);
      psi(i, j) = std::pow(std::sin(M_PI * x.x) * std::sin(M_PI * x.y), 2) / M_PI;
    }
  VelocityField u(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) u.u(i, j) = (psi(i, j + 1) - psi(i, j)) / g.h;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u.v(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.h;
  return u;
}

SignedDistanceField disk_sdf(const Grid& g) {
  Disk disk{{0.5, 0.6}, 0.15};
  return sample_signed_distance(g, disk, Isometry::at_rest(disk.center));
}

void BM_Mollify(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid g(n, n, 1.0 / n);
  const VelocityField u = swirl(g);
  for (auto _ : state) benchmark::DoNotOptimize(mollify(u, 4 * g.h));
}
BENCHMARK(BM_Mollify)->Arg(64)->Arg(128);

void BM_AdvectLevelset(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid g(n, n, 1.0 / n);
  const MollifiedVelocity m = mollify(swirl(g), 4 * g.h);
  const SignedDistanceField d = disk_sdf(g);
  for (auto _ : state) benchmark::DoNotOptimize(advect_levelset(d, m, 0.2 * g.h));
}
BENCHMARK(BM_AdvectLevelset)->Arg(64)->Arg(128);

void BM_Reinitialize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid g(n, n, 1.0 / n);
  const SignedDistanceField d = disk_sdf(g);
  for (auto _ : state) benchmark::DoNotOptimize(reinitialize(d));
}
BENCHMARK(BM_Reinitialize)->Arg(64)->Arg(128);

void BM_AdvectDensity(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid g(n, n, 1.0 / n);
  const VelocityField u = swirl(g);
  GridField rho(g, Stagger::cell, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(advect_density(rho, u, 0.2 * g.h));
}
BENCHMARK(BM_AdvectDensity)->Arg(64)->Arg(128);

void BM_Project(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid g(n, n, 1.0 / n);
  VelocityField u = swirl(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) u.u(i, j) += 0.1 * std::cos(3.0 * i * g.h);
  GridField rho(g, Stagger::cell, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(project(u, rho, 1e-3));
}
BENCHMARK(BM_Project)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

// One step of the default falling-disk scenario.
void BM_FallingDiskStep(benchmark::State& state) {
  SimConfig c;
  c.cells = static_cast<int>(state.range(0));
  c.params.delta = 4.0 / c.cells;
  c.validate();
  Simulation sim = build_simulation(c);
  for (auto _ : state) benchmark::DoNotOptimize(sim.step(c.stepper.dt_max));
}
BENCHMARK(BM_FallingDiskStep)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
