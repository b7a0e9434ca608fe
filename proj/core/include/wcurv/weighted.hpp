#ifndef WCURV_WEIGHTED_HPP
#define WCURV_WEIGHTED_HPP

#include "wcurv/geometry.hpp"

namespace wcurv {

// Rc_phi^m = Rc + Hess phi - (1/m) dphi (x) dphi
Sym2Field bakry_emery_ricci(const MetricMeasureSpace& s);

// R_phi^m = R + 2 Delta phi - ((m+1)/m) |grad phi|^2
ScalarField weighted_scalar(const MetricMeasureSpace& s);

struct WeightedCurvaturePackage {
  Sym2Field rc_phi;
  ScalarField r_phi;
  Sym2Field p_phi;      // Rc_phi - R_phi/(2(m+n-1)) g
  Riemann4Field a_phi;  // Rm - (P owedge g)/(m+n-2)
  // The A = 0 characterization is stated for n >= 3, m+n != 3; smaller
  // charts still compute, flagged out of range.
  bool characterization_in_range = false;
};

// Throws PreconditionError when m + n = 3 (the a_phi scaling degenerates).
WeightedCurvaturePackage schouten_weyl(const MetricMeasureSpace& s);
WeightedCurvaturePackage schouten_weyl(const SpaceGeometry& geo);

// (P owedge g)_ijkl = P_ik g_jl + P_jl g_ik - P_il g_jk - P_jk g_il
Riemann4Field kulkarni_nomizu(const Sym2Field& p, const Sym2Field& g);

// Pointwise covector norm of div_phi Rc_phi - dR_phi/2 + (1/m)(Delta_phi phi) dphi.
ScalarField bianchi_defect(const SpaceGeometry& geo);
ScalarField bianchi_defect(const MetricMeasureSpace& s);

// The three divergence identities for (Delta_phi f) g, Hess f, f Rc_phi;
// each field is the pointwise covector norm of lhs - rhs.
struct DivergenceIdentityDefects {
  ScalarField lap_term;
  ScalarField hess_term;
  ScalarField ricci_term;
};
DivergenceIdentityDefects divergence_identities(const SpaceGeometry& geo,
                                                const ScalarField& f);

// The unique metric-measure structure conformally flat with factor u:
// (e^{-2u} delta, m u, m).
MetricMeasureSpace lcf_construct(const ChartPtr& chart, const ScalarField& u,
                                 double m);

// R_phi - tr_g Rc_phi - Delta_phi phi, pointwise.
ScalarField trace_identity_defect(const SpaceGeometry& geo);

// Pointwise max |grad_i P_jk - grad_j P_ik| (Codazzi defect).
ScalarField codazzi_defect(const SpaceGeometry& geo, const Sym2Field& p_phi);

// Pointwise max over (i,j,k) of the defect of the contracted A = 0
// identity applied to grad f.
ScalarField contracted_identity_defect(const SpaceGeometry& geo,
                                       const ScalarField& f);

}  // namespace wcurv

#endif
