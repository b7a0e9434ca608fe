#include <benchmark/benchmark.h>

#include <cmath>

#include "wcurv/assemble.hpp"
#include "wcurv/expr.hpp"
#include "wcurv/linearize.hpp"
#include "wcurv/profile.hpp"
#include "wcurv/random_fields.hpp"
#include "wcurv/warp.hpp"
#include "wcurv/weighted.hpp"

namespace {

const double kPi = 3.14159265358979323846;

wcurv::MetricMeasureSpace make_space(int n, int N) {
  using namespace wcurv;
  std::vector<int> sizes(n, N);
  std::vector<double> extents(n, 2 * kPi);
  auto chart = make_chart(Chart::torus(sizes, extents, 4));
  TrigFieldGenerator gen(7, 2, 0.1);
  return gen.space(chart, 2.0);
}

void BM_SpaceGeometry_T3(benchmark::State& state) {
  auto s = make_space(3, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto geo = wcurv::SpaceGeometry::compute(s);
    benchmark::DoNotOptimize(geo.r_phi.data());
  }
}
BENCHMARK(BM_SpaceGeometry_T3)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_WeightedScalar_T2(benchmark::State& state) {
  auto s = make_space(2, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = wcurv::weighted_scalar(s);
    benchmark::DoNotOptimize(r.data());
  }
}
BENCHMARK(BM_WeightedScalar_T2)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_BianchiDefect_T3(benchmark::State& state) {
  auto s = make_space(3, 16);
  auto geo = wcurv::SpaceGeometry::compute(s);
  for (auto _ : state) {
    auto d = wcurv::bianchi_defect(geo);
    benchmark::DoNotOptimize(d.data());
  }
}
BENCHMARK(BM_BianchiDefect_T3)->Unit(benchmark::kMillisecond);

void BM_DRStar_T3(benchmark::State& state) {
  auto s = make_space(3, 16);
  auto geo = wcurv::SpaceGeometry::compute(s);
  wcurv::TrigFieldGenerator gen(13, 2, 0.1);
  auto f = gen.scalar(s.chart);
  for (auto _ : state) {
    auto img = wcurv::DR_star(geo, f);
    benchmark::DoNotOptimize(img.s.data());
  }
}
BENCHMARK(BM_DRStar_T3)->Unit(benchmark::kMillisecond);

void BM_AssembleDRDRstar_T3N8(benchmark::State& state) {
  auto s = make_space(3, 8);
  for (auto _ : state) {
    auto op = wcurv::assemble(s, wcurv::OperatorKind::dr_dr_star);
    benchmark::DoNotOptimize(op.matrix.data());
  }
}
BENCHMARK(BM_AssembleDRDRstar_T3N8)->Unit(benchmark::kMillisecond);

void BM_KernelDetect_T3N8(benchmark::State& state) {
  auto s = make_space(3, 8);
  auto op = wcurv::assemble(s, wcurv::OperatorKind::dr_dr_star);
  for (auto _ : state) {
    auto kr = wcurv::kernel_detect(op);
    benchmark::DoNotOptimize(kr.dim);
  }
}
BENCHMARK(BM_KernelDetect_T3N8)->Unit(benchmark::kMillisecond);

void BM_FiberWarp_T2(benchmark::State& state) {
  using namespace wcurv;
  auto chart = make_chart(Chart::torus({16, 16}, {2 * kPi, 2 * kPi}, 4));
  ScalarField phi(chart);
  for_each_node(*chart, [&](std::size_t f, const std::array<int, kMaxDim>& i) {
    phi[f] = 0.3 * std::sin(chart->coord(0, i[0]));
  });
  MetricMeasureSpace s = flat_space(chart, phi, 2.0);
  for (auto _ : state) {
    auto r = riemannian_fiber_warp(s, 8);
    benchmark::DoNotOptimize(r.sup_defect);
  }
}
BENCHMARK(BM_FiberWarp_T2)->Unit(benchmark::kMillisecond);

void BM_ExprEval(benchmark::State& state) {
  auto e = wcurv::parse_expr("exp(-x0/m) * (1 + 0.1*sin(x0)*cos(x1)) - x1^2");
  wcurv::EvalEnv env;
  env.x[0] = 0.37;
  env.x[1] = 1.21;
  env.m = 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(e.eval(env));
}
BENCHMARK(BM_ExprEval);

void BM_ProfileIntegrate(benchmark::State& state) {
  wcurv::ProfileState init{0.0, 1.0, -1.0, 0.0, 1.0};
  for (auto _ : state) {
    auto t = wcurv::integrate_profile(init, 1.0, 1.0, 1e-3);
    benchmark::DoNotOptimize(t.states.back().f);
  }
}
BENCHMARK(BM_ProfileIntegrate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
