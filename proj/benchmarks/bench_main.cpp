#include <benchmark/benchmark.h>

#include <cmath>

#include "responsekit/kernels.hpp"
#include "responsekit/paths.hpp"
#include "responsekit/random.hpp"
#include "responsekit/signature.hpp"
#include "responsekit/srnn.hpp"
#include "responsekit/volterra.hpp"

using namespace responsekit;

namespace {

void BM_Signature(benchmark::State& state) {
  Stream rng(1, 0);
  const Path p = random_walk_path(rng, 3, static_cast<std::size_t>(state.range(0)), 1.0);
  const int level = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(signature(p, level));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Signature)->Args({20, 4})->Args({100, 4})->Args({20, 6});

void BM_Gram(benchmark::State& state) {
  const KernelSpec spec = KernelSpec::piecewise(0.0, 1.0, 10, 3);
  Stream rng(2, 0);
  std::vector<Path> prepared;
  for (int i = 0; i < state.range(0); ++i)
    prepared.push_back(prepare_path(random_walk_path(rng, 2, 20, 1.0), spec));
  for (auto _ : state) benchmark::DoNotOptimize(gram(prepared, spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Gram)->Arg(50)->Arg(200)->Complexity(benchmark::oNSquared);

void BM_EulerStep(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  SrnnParams p;
  p.gamma = Eigen::MatrixXd::Identity(n, n);
  p.W = Eigen::MatrixXd::Constant(n, n, 0.1);
  p.b = Eigen::VectorXd::Zero(n);
  p.C = Eigen::MatrixXd::Ones(n, 1);
  p.sigma = 0.1 * Eigen::MatrixXd::Identity(n, n);
  p.activation = Activation("tanh");
  const DiscreteRnn map = discretize(p, 0.01);
  DiscreteRnn::Workspace work;
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n), out(n), u = Eigen::VectorXd::Ones(1);
  Stream rng(3, 0);
  Eigen::VectorXd xi(n);
  for (auto _ : state) {
    for (Eigen::Index i = 0; i < n; ++i) xi(i) = rng.normal();
    map.step(h, u, xi, out, work);
    std::swap(h, out);
    benchmark::DoNotOptimize(h.data());
  }
}
BENCHMARK(BM_EulerStep)->Arg(8)->Arg(32);

void BM_Compose(benchmark::State& state) {
  const auto grid = uniform_grid(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
  const auto kernels = VolterraKernels::tabulate(grid, 2, [](int order, double t, std::span<const double> s) {
    double sum = 0.0;
    for (double x : s) sum += t - x;
    return std::exp(-sum) / order;
  });
  for (auto _ : state) benchmark::DoNotOptimize(compose_kernels(kernels, kernels));
}
BENCHMARK(BM_Compose)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
