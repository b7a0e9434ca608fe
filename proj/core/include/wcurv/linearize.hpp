#ifndef WCURV_LINEARIZE_HPP
#define WCURV_LINEARIZE_HPP

#include <string>

#include "wcurv/geometry.hpp"

namespace wcurv {

// Deformation direction of a metric-measure structure: a symmetric
// 2-tensor h for the metric and a scalar psi for the measure potential.
struct Deformation {
  Sym2Field h;
  ScalarField psi;
};

// Image of the adjoint linearization: (T, s) with
//   T = -(Delta_phi f) g + Hess f - f Rc_phi,
//   s = 2 Delta_phi f + (2/m)(<df, dphi> + f Delta_phi phi).
struct AdjointImage {
  Sym2Field T;
  ScalarField s;
};

// Residuals of the static system plus its two algebraic reductions:
//   eq1        = -(Delta_phi f) g + Hess f - f Rc_phi
//   eq2        = Delta_phi f + (1/m)(<df, dphi> + f Delta_phi phi)
//   trace_form = Delta_phi f + f R_phi/(n+m-1)
//   hess_form  = Hess f - f (Rc_phi - R_phi g/(n+m-1))
// Algebraically trace_form = (m eq2 - tr eq1)/(n+m-1) and
// hess_form = eq1 + trace_form * g, so the reductions vanish whenever the
// system does.
struct StaticResiduals {
  Sym2Field eq1;
  ScalarField eq2;
  ScalarField trace_form;
  Sym2Field hess_form;
  std::string warning;  // set when f is near-identically zero
};

// Linearization of the weighted scalar curvature map at geo, in the
// direction d:
//   DR(h, psi) = div_phi div_phi h - <h, Rc_phi> - Delta_phi(tr h)
//                + 2(Delta_phi psi - (1/m)<dphi, dpsi>).
ScalarField DR(const SpaceGeometry& geo, const Deformation& d);
ScalarField DR(const MetricMeasureSpace& s, const Deformation& d);

AdjointImage DR_star(const SpaceGeometry& geo, const ScalarField& f);
AdjointImage DR_star(const MetricMeasureSpace& s, const ScalarField& f);

// Pair inner product <(T,s),(h,psi)> = <T,h>_g + s psi, integrated with
// the weighted measure (torus charts only).
double inner_phi_pair(const SpaceGeometry& geo, const AdjointImage& a,
                      const Deformation& d);
double inner_phi_pair(const SpaceGeometry& geo, const Deformation& a,
                      const Deformation& b);

// |<f, DR(d)>_phi - <DR*(f), d>| / (1 + |<f, DR(d)>_phi|)
double adjoint_defect(const MetricMeasureSpace& s, const Deformation& d,
                      const ScalarField& f);

StaticResiduals static_residuals(const MetricMeasureSpace& s,
                                 const ScalarField& f);
StaticResiduals static_residuals(const SpaceGeometry& geo,
                                 const ScalarField& f);

// Hess f - f (Rc - R g/(n-1)): the unweighted static equation.
Sym2Field classical_static_residual(const Sym2Field& g, const ScalarField& f);

// Delta_phi phi - ((m-1)/(m+n-1)) R_phi - R/(n-1): vanishes when a space
// is static in both the weighted and unweighted senses with one f.
ScalarField static_consistency_scalar(const SpaceGeometry& geo);

// Principal-symbol check on a flat torus with constant phi, for a lattice
// frequency eps (integer multiples of 2 pi / L per axis) and the matching
// Fourier mode f.
struct SymbolCheckResult {
  double first_slot_defect;   // vs (|eps|^2 g - eps (x) eps) f
  double second_slot_defect;  // vs -2 |eps|^2 f
  // sup |second slot| / sup |(2/m)|eps|^2 f|: reported, not asserted
  double second_slot_ratio_to_weighted;
};
SymbolCheckResult symbol_check(const MetricMeasureSpace& s,
                               const std::vector<double>& eps_freq,
                               const ScalarField& f_mode);

}  // namespace wcurv

#endif
