#include "wcurv/profile.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "wcurv/errors.hpp"
#include "wcurv/fd.hpp"

namespace wcurv {

ProfileResiduals profile_ode_residuals(const ScalarField& f,
                                       const ScalarField& phi, double m) {
  require_same_chart(f, phi);
  const Chart& chart = f.chart();
  if (chart.dim() != 1 || chart.periodic(0))
    throw PreconditionError("profile residuals need a 1-d box chart");

  ScalarField fp = partial(f, 0);
  ScalarField fpp = partial2(f, 0);
  ScalarField pp = partial(phi, 0);
  ScalarField ppp = partial2(phi, 0);

  const int margin = std::max({fp.margin(), fpp.margin(), pp.margin(),
                               ppp.margin()});
  ProfileResiduals out{ScalarField(f.chart_ptr(), margin),
                       ScalarField(f.chart_ptr(), margin)};
  for_each_valid_node(chart, margin,
                      [&](std::size_t p, const std::array<int, kMaxDim>&) {
                        out.res1[p] = pp[p] * fp[p] - f[p] * ppp[p] +
                                      f[p] * pp[p] * pp[p] / m;
                        out.res2[p] = fpp[p] - (m - 1.0) / m * pp[p] * fp[p] +
                                      f[p] * ppp[p] / m -
                                      f[p] * pp[p] * pp[p] / m;
                      });
  return out;
}

namespace {

struct Deriv {
  double f, fp, phi, phip;  // first derivatives of the state
};

Deriv rhs(const ProfileState& y, double m) {
  Deriv d;
  d.f = y.fp;
  d.phi = y.phip;
  d.phip = y.phip * y.fp / y.f + y.phip * y.phip / m;
  d.fp = (m - 2.0) / m * y.phip * y.fp +
         (m - 1.0) / (m * m) * y.f * y.phip * y.phip;
  return d;
}

ProfileState advance(const ProfileState& y, const Deriv& d, double h) {
  ProfileState z;
  z.x = y.x + h;
  z.f = y.f + h * d.f;
  z.fp = y.fp + h * d.fp;
  z.phi = y.phi + h * d.phi;
  z.phip = y.phip + h * d.phip;
  return z;
}

bool state_ok(const ProfileState& y, double f_floor) {
  return std::isfinite(y.f) && std::isfinite(y.fp) && std::isfinite(y.phi) &&
         std::isfinite(y.phip) && std::fabs(y.f) >= f_floor;
}

}  // namespace

Trajectory integrate_profile(const ProfileState& init, double m, double x_end,
                             double step, double f_floor) {
  if (!(step > 0.0)) throw PreconditionError("step must be positive");
  if (!(m > 0.0)) throw PreconditionError("m must be positive");

  Trajectory traj;
  ProfileState y = init;
  traj.states.push_back(y);
  if (!state_ok(y, f_floor)) {
    traj.stop = Trajectory::Stop::f_floor;
    traj.stop_x = y.x;
    traj.message = "initial state below the f floor";
    return traj;
  }

  while (y.x < x_end - 0.5 * step) {
    const double h = std::min(step, x_end - y.x);
    const Deriv k1 = rhs(y, m);
    const ProfileState y2 = advance(y, k1, 0.5 * h);
    if (!state_ok(y2, f_floor)) {
      traj.stop = std::isfinite(y2.f) ? Trajectory::Stop::f_floor
                                      : Trajectory::Stop::nonfinite;
      traj.stop_x = y2.x;
      break;
    }
    const Deriv k2 = rhs(y2, m);
    const ProfileState y3 = advance(y, k2, 0.5 * h);
    if (!state_ok(y3, f_floor)) {
      traj.stop = std::isfinite(y3.f) ? Trajectory::Stop::f_floor
                                      : Trajectory::Stop::nonfinite;
      traj.stop_x = y3.x;
      break;
    }
    const Deriv k3 = rhs(y3, m);
    const ProfileState y4 = advance(y, k3, h);
    if (!state_ok(y4, f_floor)) {
      traj.stop = std::isfinite(y4.f) ? Trajectory::Stop::f_floor
                                      : Trajectory::Stop::nonfinite;
      traj.stop_x = y4.x;
      break;
    }
    const Deriv k4 = rhs(y4, m);

    ProfileState z;
    z.x = y.x + h;
    z.f = y.f + h / 6.0 * (k1.f + 2 * k2.f + 2 * k3.f + k4.f);
    z.fp = y.fp + h / 6.0 * (k1.fp + 2 * k2.fp + 2 * k3.fp + k4.fp);
    z.phi = y.phi + h / 6.0 * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi);
    z.phip = y.phip + h / 6.0 * (k1.phip + 2 * k2.phip + 2 * k3.phip + k4.phip);
    if (!state_ok(z, f_floor)) {
      traj.stop = std::isfinite(z.f) ? Trajectory::Stop::f_floor
                                     : Trajectory::Stop::nonfinite;
      traj.stop_x = z.x;
      break;
    }
    y = z;
    traj.states.push_back(y);
  }

  if (traj.stop == Trajectory::Stop::f_floor) {
    char buf[120];
    std::snprintf(buf, sizeof buf,
                  "|f| fell below %.1e near x = %.6g (static-horizon "
                  "candidate); trajectory truncated",
                  f_floor, traj.stop_x);
    traj.message = buf;
  } else if (traj.stop == Trajectory::Stop::nonfinite) {
    traj.message = "state became non-finite; trajectory truncated";
  }
  return traj;
}

double warp_rate(double f, double fp, double fpp, double r_phi, int n,
                 double m) {
  if (fp == 0.0) throw PreconditionError("warp_rate needs f' != 0");
  const double d = n + m - 1.0;
  return -fpp / fp / d - r_phi * (f / fp) / (d * d);
}

double levelset_sectional(double rc_rr, double r_phi, double f_over_fp, int n,
                          double m) {
  const double d1 = n + m - 1.0;
  const double d2 = n + m - 2.0;
  if (!(d2 > 0.0))
    throw PreconditionError("levelset_sectional needs n + m > 2");
  const double t = f_over_fp * rc_rr;
  return (r_phi - 2.0 * rc_rr) / (d1 * d2) + t * t / (d1 * d1);
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "x,f,f_prime,phi,phi_prime\n";
  char buf[200];
  for (const ProfileState& s : traj.states) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.x, s.f,
                  s.fp, s.phi, s.phip);
    out << buf;
  }
}

}  // namespace wcurv
