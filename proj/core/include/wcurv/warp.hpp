#ifndef WCURV_WARP_HPP
#define WCURV_WARP_HPP

#include "wcurv/geometry.hpp"

namespace wcurv {

// Product of the base with a flat m-torus fiber, metric g (+) e^{-2phi/m} h.
// The scalar curvature of the product is compared pointwise against the
// weighted scalar curvature of the base.
struct FiberWarpResult {
  MetricMeasureSpace product;  // block metric, pulled-back phi, same m
  int base_dim = 0;
  ScalarField base_defect;     // |R(product) - R_phi(base)|, base chart
  double sup_defect = 0.0;
  double fiber_independence = 0.0;  // sup over fiber slices
};

FiberWarpResult riemannian_fiber_warp(const MetricMeasureSpace& base,
                                      int fiber_nodes = 8, int dim_cap = 5);

// Static warp gbar = -f^2 dt^2 + g with phi pulled back; reports how far
// Rc_phi(gbar) is from k gbar with the best-fit constant k, plus the
// standard warped-product Ricci block identities.
struct LorentzianWarpResult {
  MetricMeasureSpace product;
  double fitted_k = 0.0;
  double einstein_defect = 0.0;  // sup |Rc_phi(gbar) - k gbar|
  double block_base_defect = 0.0;  // Rc(X,Y) vs Rc_g - Hess f / f
  double block_mixed_defect = 0.0; // Rc(X,V) vs 0
  double block_fiber_defect = 0.0; // Rc(V,W) vs -(Delta f / f) gbar
  double time_independence = 0.0;
};

LorentzianWarpResult lorentzian_static_warp(const MetricMeasureSpace& base,
                                            const ScalarField& f,
                                            int time_nodes = 8);

}  // namespace wcurv

#endif
