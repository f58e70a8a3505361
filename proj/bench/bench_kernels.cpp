// Serial reference against the OpenMP path for each hot kernel. The second
// benchmark argument selects the path: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include "specgeo/capacitor.hpp"
#include "specgeo/grassmann.hpp"
#include "specgeo/kernels.hpp"
#include "specgeo/rng.hpp"
#include "specgeo/shapes.hpp"
#include "specgeo/stabbing.hpp"

using namespace specgeo;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(1) ? "parallel" : "serial"); }

void BM_ElementData(benchmark::State& state) {
  const auto c = make_icosphere(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::element_data(c, exec_of(state)));
  label(state);
}

void BM_BallMasses(benchmark::State& state) {
  const auto x = to_mm_space(make_icosphere(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::ball_masses(x, 0.3, exec_of(state)));
  label(state);
}

void BM_CoverSizes(benchmark::State& state) {
  const auto x = to_mm_space(make_icosphere(static_cast<int>(state.range(0))));
  std::vector<std::size_t> centers;
  for (std::size_t i = 0; i < x.size(); i += 8) centers.push_back(i);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::cover_sizes(x, centers, 0.8, 4.0, exec_of(state)));
  label(state);
}

void BM_StabCounts(benchmark::State& state) {
  const auto c = make_torus(2, 0.5, static_cast<int>(state.range(0)));
  const auto h = sample_haar(2, 1, 7);
  const ProjectedComplex pc(c, h.basis);
  Rng rng(3);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  Eigen::MatrixXd pts(2, 4096);
  for (Eigen::Index j = 0; j < pts.cols(); ++j) pts.col(j) << u(rng), u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::stab_counts(pc, pts, exec_of(state)));
  label(state);
}

void BM_CroftonSamples(benchmark::State& state) {
  const Eigen::MatrixXd frame = Eigen::MatrixXd::Identity(3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::crofton_samples(frame, 1, state.range(0), 5, exec_of(state)));
  label(state);
}

void BM_BallGrowth(benchmark::State& state) {
  const auto c = make_icosphere(static_cast<int>(state.range(0)));
  const auto radii = growth_radii(c, 6);
  for (auto _ : state) benchmark::DoNotOptimize(ball_growth_constant(c, radii, 64, exec_of(state)));
  label(state);
}

}  // namespace

BENCHMARK(BM_ElementData)->ArgsProduct({{4, 5}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BallMasses)->ArgsProduct({{3, 4}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverSizes)->ArgsProduct({{3}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StabCounts)->ArgsProduct({{32, 64}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CroftonSamples)->ArgsProduct({{20000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BallGrowth)->ArgsProduct({{3}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
