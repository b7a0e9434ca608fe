#include <doctest.h>

#include <cmath>

#include "wcurv/random_fields.hpp"
#include "wcurv/warp.hpp"
#include "wcurv/weighted.hpp"

using namespace wcurv;

namespace {
const double kPi = 3.14159265358979323846;

ScalarField from_fn(const ChartPtr& chart,
                    const std::function<double(const std::array<double, kMaxDim>&)>& fn) {
  ScalarField out(chart);
  std::array<double, kMaxDim> x{};
  for_each_node(*chart, [&](std::size_t f, const std::array<int, kMaxDim>& i) {
    for (int a = 0; a < chart->dim(); ++a) x[a] = chart->coord(a, i[a]);
    out[f] = fn(x);
  });
  return out;
}
}  // namespace

TEST_CASE("fiber warp: constant phi gives a metric product, defect ~ 0") {
  auto chart = make_chart(Chart::torus({16, 16}, {2 * kPi, 2 * kPi}, 4));
  ScalarField phi(chart);
  for (std::size_t i = 0; i < phi.value_count(); ++i) phi[i] = 0.4;
  MetricMeasureSpace s = flat_space(chart, phi, 2.0);
  FiberWarpResult r = riemannian_fiber_warp(s);
  CHECK(r.sup_defect <= 1e-12);
  CHECK(r.fiber_independence <= 1e-13);
  CHECK(r.product.dim() == 4);
}

TEST_CASE("fiber warp: T^2, phi = 0.3 sin x0, m = 2 matches the closed form") {
  // p = 4 leaves ~3e-4 of truncation at N = 32; the 1e-4 bound wants p = 6
  auto chart = make_chart(Chart::torus({32, 32}, {2 * kPi, 2 * kPi}, 6));
  ScalarField phi = from_fn(chart, [](const auto& x) {
    return 0.3 * std::sin(x[0]);
  });
  MetricMeasureSpace s = flat_space(chart, phi, 2.0);
  FiberWarpResult r = riemannian_fiber_warp(s, /*fiber_nodes=*/8);
  CHECK(r.sup_defect <= 1e-4);
  // and the product scalar curvature itself matches
  //   R_phi = 2 Dphi - (3/2)|dphi|^2 = -0.6 sin x0 - 0.135 cos^2 x0
  SpaceGeometry geo = SpaceGeometry::compute(s);
  double worst = 0.0;
  for_each_node(*chart, [&](std::size_t p, const std::array<int, kMaxDim>& i) {
    const double x0 = chart->coord(0, i[0]);
    const double expect = -0.6 * std::sin(x0) -
                          1.5 * 0.09 * std::cos(x0) * std::cos(x0);
    worst = std::max(worst, std::fabs(geo.r_phi[p] - expect));
  });
  CHECK(worst <= 1e-4);
}

TEST_CASE("fiber warp on the LCF family refines at order >= p-1") {
  std::vector<double> hs, ds;
  for (int N : {16, 24, 32}) {
    auto chart = make_chart(Chart::torus({N, N}, {2 * kPi, 2 * kPi}, 4));
    ScalarField u = from_fn(chart, [](const auto& x) {
      return 0.1 * std::sin(x[0]);
    });
    MetricMeasureSpace s = lcf_construct(chart, u, 1.0);
    FiberWarpResult r = riemannian_fiber_warp(s, /*fiber_nodes=*/8);
    hs.push_back(chart->spacing(0));
    ds.push_back(r.sup_defect);
  }
  CHECK(ds.back() <= 1e-4);
  CHECK(fit_order(hs, ds) >= 3.0);
}

TEST_CASE("fiber warp preconditions") {
  auto chart = make_chart(Chart::torus({16, 16}, {2 * kPi, 2 * kPi}, 4));
  MetricMeasureSpace s = flat_space(chart, 1.5);  // non-integer m
  CHECK_THROWS_AS(riemannian_fiber_warp(s), PreconditionError);
  MetricMeasureSpace s4 = flat_space(chart, 4.0);  // 2 + 4 > 5
  CHECK_THROWS_AS(riemannian_fiber_warp(s4), PreconditionError);
}

TEST_CASE("static warp: f = 1 on flat data gives a flat product, k = 0") {
  auto chart = make_chart(Chart::torus({16, 16}, {2 * kPi, 2 * kPi}, 4));
  MetricMeasureSpace s = flat_space(chart, 1.0);
  ScalarField f(chart);
  for (std::size_t i = 0; i < f.value_count(); ++i) f[i] = 1.0;
  LorentzianWarpResult r = lorentzian_static_warp(s, f);
  CHECK(r.einstein_defect <= 1e-12);
  CHECK(std::fabs(r.fitted_k) <= 1e-13);
  CHECK(r.block_base_defect <= 1e-12);
  CHECK(r.block_mixed_defect <= 1e-12);
  CHECK(r.block_fiber_defect <= 1e-12);
}

TEST_CASE("static warp of the 1-d profile family is weighted-Einstein") {
  // base R^1 with (f, phi) = (e^{-x}, x), m = 1: R_phi = -2 and the warp
  // is Einstein with k = R_phi/(n+m-1) = -2
  auto chart = make_chart(Chart::box({101}, {1.0}, 6));
  ScalarField phi = from_fn(chart, [](const auto& x) { return x[0]; });
  MetricMeasureSpace s = flat_space(chart, phi, 1.0);
  ScalarField f = from_fn(chart, [](const auto& x) {
    return std::exp(-x[0]);
  });
  LorentzianWarpResult r = lorentzian_static_warp(s, f);
  CHECK(r.einstein_defect <= 1e-6);
  CHECK(r.fitted_k == doctest::Approx(-2.0).epsilon(1e-8));
  CHECK(r.time_independence <= 1e-12);
}

TEST_CASE("static warp of the 3-d translation family is NOT Einstein") {
  // tangential directions break the static system for n >= 2, so the
  // warp has an O(1) Einstein defect no matter which k is fitted
  auto chart = make_chart(Chart::box({20, 40, 20}, {0.2, 0.4, 0.2}, 4));
  ScalarField phi = from_fn(chart, [](const auto& x) { return x[1]; });
  MetricMeasureSpace s = flat_space(chart, phi, 1.0);
  ScalarField f = from_fn(chart, [](const auto& x) {
    return std::exp(-x[1]);
  });
  LorentzianWarpResult r = lorentzian_static_warp(s, f);
  CHECK(r.einstein_defect >= 0.5);
}

TEST_CASE("non-static control input keeps a defect bounded away from zero") {
  double prev = 0.0;
  for (int N : {16, 32}) {
    auto chart = make_chart(Chart::torus({N, N}, {2 * kPi, 2 * kPi}, 4));
    MetricMeasureSpace s = flat_space(chart, 1.0);
    ScalarField f = from_fn(chart, [](const auto& x) {
      return 1.0 + 0.1 * std::sin(x[0]);
    });
    LorentzianWarpResult r = lorentzian_static_warp(s, f);
    CHECK(r.einstein_defect >= 1e-2);
    if (prev > 0.0)
      CHECK(std::fabs(r.einstein_defect - prev) <= 0.2 * prev);
    prev = r.einstein_defect;
  }
}

TEST_CASE("warped-product Ricci block identities refine to zero") {
  std::vector<double> hs, d1, d2, d3;
  for (int N : {24, 32, 48}) {
    auto chart = make_chart(Chart::torus({N, N}, {2 * kPi, 2 * kPi}, 4));
    Sym2Field g(chart);
    for_each_node(*chart,
                  [&](std::size_t p, const std::array<int, kMaxDim>& i) {
                    const double c =
                        std::exp(0.2 * std::sin(chart->coord(0, i[0])));
                    g.at(p, 0, 0) = c;
                    g.at(p, 1, 1) = c;
                  });
    ScalarField phi(chart);
    MetricMeasureSpace s(chart, std::move(g), std::move(phi), 1.0);
    ScalarField f = from_fn(chart, [](const auto& x) {
      return 1.5 + 0.2 * std::cos(x[1]);
    });
    LorentzianWarpResult r = lorentzian_static_warp(s, f);
    hs.push_back(chart->spacing(0));
    d1.push_back(r.block_base_defect);
    d2.push_back(r.block_mixed_defect);
    d3.push_back(r.block_fiber_defect);
  }
  CHECK(d1.back() <= 1e-3);
  CHECK(d3.back() <= 1e-3);
  CHECK(fit_order(hs, d1) >= 2.5);
  CHECK(fit_order(hs, d3) >= 2.5);
  // the mixed block is exactly zero by the block structure
  CHECK(d2.back() <= 1e-12);
}

TEST_CASE("static warp rejects vanishing f") {
  auto chart = make_chart(Chart::torus({16, 16}, {2 * kPi, 2 * kPi}, 4));
  MetricMeasureSpace s = flat_space(chart, 1.0);
  ScalarField f = from_fn(chart, [](const auto& x) { return std::sin(x[0]); });
  CHECK_THROWS_AS(lorentzian_static_warp(s, f), PreconditionError);
}
