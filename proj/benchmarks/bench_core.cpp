#include <benchmark/benchmark.h>

#include "plateau/complex.hpp"
#include "plateau/ff_projection.hpp"
#include "plateau/grassmannian.hpp"
#include "plateau/lipschitz.hpp"
#include "plateau/sampled_set.hpp"
#include "plateau/schedule.hpp"
#include "plateau/set_measure.hpp"

using namespace plateau;

namespace {

Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

void BM_PlaneDistance(benchmark::State& state) {
  Rng rng(1);
  const int n = static_cast<int>(state.range(0));
  LinearPlane v = haar_sample(n / 2, n, rng), w = haar_sample(n / 2, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(plane_distance(v, w));
}
BENCHMARK(BM_PlaneDistance)->Arg(2)->Arg(4)->Arg(8);

void BM_HaarSample(benchmark::State& state) {
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(haar_sample(2, 4, rng));
}
BENCHMARK(BM_HaarSample);

void BM_Whitney(benchmark::State& state) {
  auto dom = DomainOracle::open_box(Box{pt(0, 0), pt(1, 1)});
  for (auto _ : state) benchmark::DoNotOptimize(whitney_decompose(dom, static_cast<int>(state.range(0))).size());
}
BENCHMARK(BM_Whitney)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_ZetaGauge(benchmark::State& state) {
  Rng rng(3);
  auto seg = sample_segment(pt(0, 0), pt(1, 0), 0.001);
  for (auto _ : state) benchmark::DoNotOptimize(zeta_gauge(seg, state.range(0), 0.01, rng).value);
}
BENCHMARK(BM_ZetaGauge)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_HausdorffEstimate(benchmark::State& state) {
  auto c = cantor_four_corner(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff_estimate(c));
}
BENCHMARK(BM_HausdorffEstimate)->Arg(3)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_McShane(benchmark::State& state) {
  Rng rng(4);
  SampledFunction f;
  for (int i = 0; i < state.range(0); ++i) {
    Point p = pt(rng.uniform(), rng.uniform());
    f.domain_points.push_back(p);
    f.values.push_back(p);
  }
  const Point x = pt(0.3, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(mcshane_extend(f, 1.0, x));
}
BENCHMARK(BM_McShane)->Arg(100)->Arg(10000);

void BM_FFProject(benchmark::State& state) {
  Complex k = grid_complex(pt(0, 0), pt(1, 1), static_cast<int>(state.range(0)));
  std::vector<Point> pts;
  for (int i = 0; i < 1000; ++i) pts.push_back(pt((i + 0.5) / 1000, (i + 0.5) / 1000));
  SampledSet e(1, 2, pts, std::vector<double>(pts.size(), 1e-3), 0.001);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(seed++);
    benchmark::DoNotOptimize(ff_project(k, 1, e, FFOptions{}, rng).global_ratio);
  }
}
BENCHMARK(BM_FFProject)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_QSchedule(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(q_schedule(0.9, 50));
}
BENCHMARK(BM_QSchedule);

}  // namespace

BENCHMARK_MAIN();
