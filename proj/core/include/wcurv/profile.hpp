#ifndef WCURV_PROFILE_HPP
#define WCURV_PROFILE_HPP

#include <string>
#include <vector>

#include "wcurv/field.hpp"

namespace wcurv {

// State of the translation-invariant profile (f(x), phi(x)).
struct ProfileState {
  double x = 0.0;
  double f = 0.0;
  double fp = 0.0;
  double phi = 0.0;
  double phip = 0.0;
};

// Residuals of the two profile ODEs on a 1-d box chart:
//   res1 = phi' f' - f phi'' + (1/m) f (phi')^2
//   res2 = f'' - ((m-1)/m) phi' f' + (1/m) f phi'' - (1/m) f (phi')^2
struct ProfileResiduals {
  ScalarField res1;
  ScalarField res2;
};
ProfileResiduals profile_ode_residuals(const ScalarField& f,
                                       const ScalarField& phi, double m);

struct Trajectory {
  std::vector<ProfileState> states;
  enum class Stop { completed, f_floor, nonfinite } stop = Stop::completed;
  double stop_x = 0.0;
  std::string message;
};

// Classical 4th-order one-step integration of the profile system solved
// for the highest derivatives:
//   phi'' = phi' f'/f + (phi')^2/m
//   f''   = ((m-2)/m) phi' f' + ((m-1)/m^2) f (phi')^2
// Aborts cleanly (Stop::f_floor) when |f| < f_floor: the system is
// singular there and the location is a static-horizon candidate.
Trajectory integrate_profile(const ProfileState& init, double m, double x_end,
                             double step, double f_floor = 1e-6);

// w'/w = -(f''/f')/(n+m-1) - R_phi (f/f')/(n+m-1)^2
double warp_rate(double f, double fp, double fpp, double r_phi, int n,
                 double m);

// (R_phi - 2 Rc_rr)/((n+m-1)(n+m-2)) + ((f/f') Rc_rr)^2/(n+m-1)^2
double levelset_sectional(double rc_rr, double r_phi, double f_over_fp, int n,
                          double m);

// CSV columns: x, f, f_prime, phi, phi_prime.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace wcurv

#endif
