#include <benchmark/benchmark.h>

#include "chds/assembly.hpp"
#include "chds/discretization.hpp"
#include "chds/operators.hpp"
#include "chds/scheme.hpp"

using namespace chds;

namespace {

void BM_CrossedMesh(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(build_crossed_mesh({}, n));
}
BENCHMARK(BM_CrossedMesh)->Arg(16)->Arg(64);

void BM_Discretization(benchmark::State& st) {
  const MeshPtr mesh = build_crossed_mesh({}, static_cast<int>(st.range(0)));
  for (auto _ : st) {
    Discretization disc(mesh);
    benchmark::DoNotOptimize(disc.mass().nonZeros());
  }
}
BENCHMARK(BM_Discretization)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ConvectionAssembly(benchmark::State& st) {
  const Discretization disc(build_crossed_mesh({}, static_cast<int>(st.range(0))));
  const FeFunction phi = interpolate(disc.scalar_space(), spinodal_initial_phi({}).value);
  for (auto _ : st)
    benchmark::DoNotOptimize(assemble_matrix(MatrixForm::convection(phi), *disc.velocity_space(), *disc.scalar_space()));
}
BENCHMARK(BM_ConvectionAssembly)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_NegNorm(benchmark::State& st) {
  const Discretization disc(build_crossed_mesh({}, static_cast<int>(st.range(0))));
  Vector z = interpolate(disc.scalar_space(), spinodal_initial_phi({}).value).coefficients;
  z.array() -= disc.ones_mass().dot(z) / disc.area();
  for (auto _ : st) benchmark::DoNotOptimize(disc.neg_norm_workspace().norm(z));
}
BENCHMARK(BM_NegNorm)->Arg(16)->Arg(64);

void BM_Step(benchmark::State& st) {
  const Discretization disc(build_crossed_mesh({}, static_cast<int>(st.range(0))));
  Params params;
  params.theta = static_cast<double>(st.range(1));
  const State s0 = initialize(disc, InitialData{spinodal_initial_phi({}), std::nullopt, InitMode::Interpolate}, params);
  Stepper stepper(disc, params);
  State s = s0;
  for (auto _ : st) s = stepper.step(s);
}
BENCHMARK(BM_Step)->Args({16, 0})->Args({32, 0})->Args({32, 100})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
