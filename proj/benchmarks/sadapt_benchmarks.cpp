#include "sadapt/alignment.hpp"
#include "sadapt/kernel.hpp"
#include "sadapt/kernel_da.hpp"
#include "sadapt/knn.hpp"
#include "sadapt/rng.hpp"
#include "sadapt/simulator.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace sadapt;

Matrix gaussian_rows(Eigen::Index n, Eigen::Index d, Seed seed) {
  Engine engine(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = g(engine);
  }
  return x;
}

void BM_RbfKernel(benchmark::State& state) {
  const Matrix x = gaussian_rows(state.range(0), 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(rbf_kernel(x, x, 1.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RbfKernel)->RangeMultiplier(2)->Range(128, 1024)->Complexity(benchmark::oNSquared);

void BM_TcaFit(benchmark::State& state) {
  const Matrix xs = gaussian_rows(state.range(0), 3, 2);
  const Matrix xt = gaussian_rows(state.range(0) / 2, 3, 3).array() + 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(tca_fit(xs, xt));
}
BENCHMARK(BM_TcaFit)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_DampedFrequencies(benchmark::State& state) {
  StructureSpec spec = StructureSpec::heterogeneous_target();
  spec.storeys = static_cast<int>(state.range(0));
  SampleDraw draw{spec.elastic_modulus.mean, spec.density.mean, spec.damping.shape * spec.damping.scale, std::nullopt};
  const StructuralSystem sys = build_system(spec, draw);
  for (auto _ : state) benchmark::DoNotOptimize(damped_frequencies(sys.mass, sys.damping, sys.stiffness, 3));
}
BENCHMARK(BM_DampedFrequencies)->Arg(3)->Arg(7)->Arg(20);

void BM_KnnPredict(benchmark::State& state) {
  const Matrix train = gaussian_rows(state.range(0), 3, 4);
  std::vector<ClassId> labels(static_cast<std::size_t>(train.rows()));
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<ClassId>(i % 4);
  const Matrix test = gaussian_rows(400, 3, 5);
  const KnnModel model(train, labels, 1);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(test));
}
BENCHMARK(BM_KnnPredict)->Arg(800)->Arg(3200);

void BM_Ncoral(benchmark::State& state) {
  const Matrix xs = gaussian_rows(800, 3, 6);
  const Matrix xt = gaussian_rows(400, 3, 7) * 2.0;
  RowIndices ns(200), nt(100);
  for (std::size_t i = 0; i < ns.size(); ++i) ns[i] = i;
  for (std::size_t i = 0; i < nt.size(); ++i) nt[i] = i;
  for (auto _ : state) benchmark::DoNotOptimize(ncoral(xs, xt, ns, nt));
}
BENCHMARK(BM_Ncoral);

}  // namespace

BENCHMARK_MAIN();
