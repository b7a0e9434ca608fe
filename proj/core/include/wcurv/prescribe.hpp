#ifndef WCURV_PRESCRIBE_HPP
#define WCURV_PRESCRIBE_HPP

#include <string>
#include <vector>

#include "wcurv/assemble.hpp"

namespace wcurv {

// (c^-1 g, phi, m): multiplies the weighted scalar curvature by c.
MetricMeasureSpace scale_space(const MetricMeasureSpace& s, double c);

struct NewtonOptions {
  double tol = 1e-6;       // L2_phi residual target (base-point Gram)
  int max_iter = 10;
  int cap = 4096;          // dense-assembly unknown cap
  double kernel_tol = 1e-8;
  double metric_floor = 1e-6;  // per-node eigenvalue floor for g
  int max_halvings = 20;
};

struct ScalingAttempt {
  double c = 1.0;
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> residual_trace;
};

struct PrescribeResult {
  MetricMeasureSpace space;  // final (g, phi)
  ScalarField u;             // solution potential at the base point
  ScalarField residual;      // weighted_scalar(space) - target, recomputed
  double residual_l2 = 0.0;
  int iterations = 0;
  int halvings = 0;
  bool converged = false;
  double applied_c = 1.0;
  std::vector<double> residual_trace;
  std::vector<ScalingAttempt> attempts;  // populated by the scaling sweep
  std::string message;
  // diagnostic: does c0 min(target) < R_phi0 < c0 max(target) admit a c0
  bool minmax_hypothesis = false;
};

// Frozen-operator iteration: solve DRDR*(space0) du = target - S(u) in the
// base-point Gram geometry, with S(u) = weighted_scalar((g0,phi0) + DR*(u)).
// Throws SolverError when the base point is static (DRDR* has a kernel);
// non-convergence within max_iter is reported, not thrown.
PrescribeResult newton_prescribe(const MetricMeasureSpace& space0,
                                 const ScalarField& target,
                                 const NewtonOptions& opts = {});

// Sweeps c over c_grid (ascending), solving for target = K/c and unscaling
// the first success via scale_space, so the returned space has weighted
// scalar curvature K. Reports every attempt.
PrescribeResult prescribe_with_scaling(const MetricMeasureSpace& space0,
                                       const ScalarField& K,
                                       const std::vector<double>& c_grid,
                                       const NewtonOptions& opts = {});

}  // namespace wcurv

#endif
