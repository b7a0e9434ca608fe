#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "wcurv/linearize.hpp"
#include "wcurv/profile.hpp"

using namespace wcurv;

namespace {

ScalarField sample_1d(const ChartPtr& chart, double (*fn)(double)) {
  ScalarField out(chart);
  for_each_node(*chart, [&](std::size_t f, const std::array<int, kMaxDim>& i) {
    out[f] = fn(chart->coord(0, i[0]));
  });
  return out;
}

double id_fn(double x) { return x; }

}  // namespace

TEST_CASE("profile residuals of the closed-form family are tiny") {
  // h = 1e-3 over [0, 1]
  auto chart = make_chart(Chart::box({1001}, {1.0}, 4));
  for (double m : {1.0, 3.0}) {
    ScalarField phi = sample_1d(chart, id_fn);
    ScalarField f(chart);
    for_each_node(*chart,
                  [&](std::size_t p, const std::array<int, kMaxDim>& i) {
                    f[p] = std::exp(-chart->coord(0, i[0]) / m);
                  });
    ProfileResiduals r = profile_ode_residuals(f, phi, m);
    CHECK(sup_abs(r.res1) <= 1e-9);
    CHECK(sup_abs(r.res2) <= 1e-9);
  }
}

TEST_CASE("profile residuals vanish exactly on constants") {
  auto chart = make_chart(Chart::box({64}, {1.0}, 4));
  ScalarField f(chart), phi(chart);
  for (std::size_t i = 0; i < f.value_count(); ++i) {
    f[i] = 2.0;
    phi[i] = -1.0;
  }
  ProfileResiduals r = profile_ode_residuals(f, phi, 2.0);
  CHECK(sup_abs(r.res1) == 0.0);
  CHECK(sup_abs(r.res2) == 0.0);
}

TEST_CASE("profile residuals reject 2-d charts") {
  auto chart = make_chart(Chart::box({16, 16}, {1, 1}, 4));
  ScalarField f(chart), phi(chart);
  CHECK_THROWS_AS(profile_ode_residuals(f, phi, 1.0), PreconditionError);
}

TEST_CASE("integration reproduces the closed form to 1e-8") {
  ProfileState init{0.0, 1.0, -1.0, 0.0, 1.0};
  Trajectory traj = integrate_profile(init, 1.0, 1.0, 1e-3);
  REQUIRE(traj.stop == Trajectory::Stop::completed);
  double worst = 0.0;
  for (const ProfileState& s : traj.states) {
    worst = std::max(worst, std::fabs(s.f - std::exp(-s.x)));
    worst = std::max(worst, std::fabs(s.fp + std::exp(-s.x)));
    worst = std::max(worst, std::fabs(s.phi - s.x));
    worst = std::max(worst, std::fabs(s.phip - 1.0));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("zero-slope initial data stays constant") {
  ProfileState init{0.0, 2.0, 0.0, 1.0, 0.0};
  Trajectory traj = integrate_profile(init, 2.0, 1.0, 1e-2);
  REQUIRE(traj.stop == Trajectory::Stop::completed);
  for (const ProfileState& s : traj.states) {
    CHECK(s.f == 2.0);
    CHECK(s.fp == 0.0);
    CHECK(s.phi == 1.0);
    CHECK(s.phip == 0.0);
  }
}

TEST_CASE("classical 4th-order step convergence (error ratio ~ 16)") {
  // at step 1e-3 the error sits at round-off, so the ratio is measured at
  // steps where truncation still dominates
  ProfileState init{0.0, 1.0, -1.0, 0.0, 1.0};
  auto err_at = [&](double step) {
    Trajectory t = integrate_profile(init, 1.0, 1.0, step);
    const ProfileState& s = t.states.back();
    return std::fabs(s.f - std::exp(-s.x));
  };
  const double e1 = err_at(4e-2);
  const double e2 = err_at(2e-2);
  CHECK(e1 / e2 >= 12.0);
  CHECK(e1 / e2 <= 20.0);
}

TEST_CASE("f-floor stops the trajectory with a located report") {
  // m = 2 with phi' = 0 freezes both second derivatives, so f marches
  // linearly into the floor near x = 0.1
  ProfileState init{0.0, 0.1, -1.0, 0.0, 0.0};
  Trajectory traj = integrate_profile(init, 2.0, 1.0, 1e-3);
  CHECK(traj.stop == Trajectory::Stop::f_floor);
  CHECK(traj.stop_x > 0.0);
  CHECK(traj.stop_x < 0.3);
  CHECK(traj.message.find("static-horizon") != std::string::npos);
  CHECK(!traj.states.empty());
}

TEST_CASE("warp rate formula") {
  CHECK(warp_rate(3.0, 2.0, 0.0, 0.0, 3, 1.0) == 0.0);
  // f = e^{-x}: f''/f' = -1, f/f' = -1, R_phi = -2, n = 3, m = 1
  CHECK(std::fabs(warp_rate(1.0, -1.0, 1.0, -2.0, 3, 1.0) - 1.0 / 9.0) <=
        1e-12);
  // invariance under f -> c f
  const double a = warp_rate(0.37, -0.21, 0.11, -2.0, 4, 2.0);
  const double b = warp_rate(7 * 0.37, 7 * -0.21, 7 * 0.11, -2.0, 4, 2.0);
  CHECK(a == doctest::Approx(b).epsilon(1e-14));
  CHECK_THROWS_AS(warp_rate(1.0, 0.0, 1.0, 0.0, 3, 1.0), PreconditionError);
}

TEST_CASE("level-set sectional curvature formula") {
  CHECK(levelset_sectional(0.0, 0.0, -1.0, 3, 1.0) == 0.0);
  // n = 3, m = 1, Rc_rr = -1, R_phi = -2, f/f' = -1:
  // (-2+2)/6 + 1/9 = 1/9
  CHECK(std::fabs(levelset_sectional(-1.0, -2.0, -1.0, 3, 1.0) - 1.0 / 9.0) <=
        1e-12);
  // homogeneity: (c Rc, c R, f/f'/c) scales the first term by c and fixes
  // the second
  const double c = 3.0;
  const double rc = -0.7, r = -1.1, q = -2.0;
  const int n = 4;
  const double m = 2.0;
  const double d1 = (r - 2 * rc) / ((n + m - 1) * (n + m - 2));
  const double t2 = (q * rc) * (q * rc) / ((n + m - 1) * (n + m - 1));
  const double scaled = levelset_sectional(c * rc, c * r, q / c, n, m);
  CHECK(scaled == doctest::Approx(c * d1 + t2).epsilon(1e-13));
}

TEST_CASE("embedded 1-d trajectory satisfies the full static system") {
  // sample the trajectory onto a 1-d box chart and evaluate the full
  // machinery; the profile system is the 1-d reduction of it
  ProfileState init{0.0, 1.0, -1.0, 0.0, 1.0};
  Trajectory traj = integrate_profile(init, 1.0, 1.0, 1e-3);
  REQUIRE(traj.states.size() == 1001);

  auto chart = make_chart(Chart::box({1001}, {1.0}, 4));
  ScalarField f(chart), phi(chart);
  for (std::size_t i = 0; i < 1001; ++i) {
    f[i] = traj.states[i].f;
    phi[i] = traj.states[i].phi;
  }
  ProfileResiduals pr = profile_ode_residuals(f, phi, 1.0);
  REQUIRE(sup_abs(pr.res1) <= 1e-8);
  REQUIRE(sup_abs(pr.res2) <= 1e-8);

  MetricMeasureSpace s = flat_space(chart, phi, 1.0);
  SpaceGeometry geo = SpaceGeometry::compute(s);
  StaticResiduals sr = static_residuals(geo, f);
  CHECK(sup_abs(sr.eq1) <= 1e-6);
  CHECK(sup_abs(sr.eq2) <= 1e-6);
  CHECK(sup_abs(sr.trace_form) <= 1e-6);
  CHECK(sup_abs(sr.hess_form) <= 1e-6);

  // R_phi along the trajectory is the constant -(m+1)/m = -2
  double worst = 0.0;
  for_each_valid_node(*chart, geo.r_phi.margin(),
                      [&](std::size_t p, const std::array<int, kMaxDim>&) {
                        worst = std::max(worst, std::fabs(geo.r_phi[p] + 2.0));
                      });
  CHECK(worst <= 1e-6);
}

TEST_CASE("trajectory CSV export has the documented columns") {
  ProfileState init{0.0, 1.0, -1.0, 0.0, 1.0};
  Trajectory traj = integrate_profile(init, 1.0, 0.01, 1e-3);
  const std::string path = "traj_test.csv";
  write_trajectory_csv(traj, path);
  std::ifstream in(path);
  REQUIRE(static_cast<bool>(in));
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,f,f_prime,phi,phi_prime");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == traj.states.size());
  std::remove(path.c_str());
}
