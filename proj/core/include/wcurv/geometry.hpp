#ifndef WCURV_GEOMETRY_HPP
#define WCURV_GEOMETRY_HPP

#include "wcurv/space.hpp"

namespace wcurv {

// Determinant floor: a node is singular when |det g| < 1e-12 * scale^n,
// scale = max |g_ij| at the node.
inline constexpr double kDetFloor = 1e-12;

struct MetricInverse {
  Sym2Field inv;
  ScalarField det;
  ScalarField sqrt_abs_det;
};

// Ordinary per-node inversion; signature-blind. Throws
// SingularMetricError at the first node below the determinant floor.
MetricInverse invert_metric(const Sym2Field& g);

// Levi-Civita symbols Gamma^k_ij = g^kl (d_i g_jl + d_j g_il - d_l g_ij)/2.
Ten3Field christoffel(const Sym2Field& g);
Ten3Field christoffel(const Sym2Field& g, const Sym2Field& ginv);

struct CurvatureSet {
  Riemann4Field rm;  // sign pinned by R_ijkl grad^l f = [grad_i, grad_j] grad_k f
  Sym2Field rc;
  ScalarField r;
};

// Full curvature of g. `want_rm` = false skips materializing the (0,4)
// tensor (Ricci and scalar only), which matters on product charts.
CurvatureSet curvature(const Sym2Field& g, bool want_rm = true);
CurvatureSet curvature(const Sym2Field& g, const Sym2Field& ginv,
                       const Ten3Field& gamma, bool want_rm);

// Precomputed per-space geometry shared by the weighted operators.
struct SpaceGeometry {
  MetricMeasureSpace space;
  Sym2Field ginv;
  ScalarField det;
  ScalarField sqrt_abs_det;
  Ten3Field gamma;
  Sym2Field rc;
  ScalarField r;
  VecField dphi;        // covariant
  VecField grad_phi;    // contravariant
  Sym2Field hess_phi;
  ScalarField lap_phi;        // Delta phi (unweighted)
  ScalarField normsq_dphi;    // |grad phi|^2
  ScalarField lapw_phi_phi;   // Delta_phi phi
  Sym2Field rc_phi;           // Bakry-Emery Ricci
  ScalarField r_phi;          // weighted scalar curvature

  static SpaceGeometry compute(const MetricMeasureSpace& s);
};

// --- first/second derivatives against a metric ---

VecField differential(const ScalarField& f);                    // df (covariant)
VecField raise(const Sym2Field& ginv, const VecField& omega);   // index up
VecField lower(const Sym2Field& g, const VecField& v);          // index down

Sym2Field hessian(const SpaceGeometry& geo, const ScalarField& f);
Sym2Field hessian(const Ten3Field& gamma, const ScalarField& f);
VecField grad(const SpaceGeometry& geo, const ScalarField& f);
ScalarField laplacian(const SpaceGeometry& geo, const ScalarField& f);
ScalarField laplacian_phi(const SpaceGeometry& geo, const ScalarField& f);

// Convenience overloads that build the geometry internally.
Sym2Field hessian(const MetricMeasureSpace& s, const ScalarField& f);
VecField grad(const MetricMeasureSpace& s, const ScalarField& f);
ScalarField laplacian_phi(const MetricMeasureSpace& s, const ScalarField& f);

// --- covariant derivatives ---

Ten2Field covariant_derivative(const Ten3Field& gamma, const VecField& omega);
Ten3Field covariant_derivative(const Ten3Field& gamma, const Sym2Field& T);

// --- weighted divergence ---

ScalarField div_phi(const SpaceGeometry& geo, const VecField& omega);
VecField div_phi(const SpaceGeometry& geo, const Sym2Field& T);
ScalarField div_phi(const MetricMeasureSpace& s, const VecField& omega);
VecField div_phi(const MetricMeasureSpace& s, const Sym2Field& T);

// --- pointwise contractions and norms ---

ScalarField contract_full(const SpaceGeometry& geo, const Sym2Field& A,
                          const Sym2Field& B);  // g^ik g^jl A_ij B_kl
ScalarField trace(const SpaceGeometry& geo, const Sym2Field& A);
ScalarField vec_norm(const SpaceGeometry& geo, const VecField& omega);
ScalarField sym2_norm(const SpaceGeometry& geo, const Sym2Field& T);
ScalarField riemann_norm(const SpaceGeometry& geo, const Riemann4Field& R);

// --- integration (closed charts only) ---

double integrate_phi(const SpaceGeometry& geo, const ScalarField& f);
double inner_phi(const SpaceGeometry& geo, const ScalarField& a,
                 const ScalarField& b);
double inner_phi(const SpaceGeometry& geo, const VecField& a,
                 const VecField& b);
double inner_phi(const SpaceGeometry& geo, const Sym2Field& a,
                 const Sym2Field& b);
double integrate_phi(const MetricMeasureSpace& s, const ScalarField& f);

// L2_phi norm restricted to the valid region (torus: the whole grid).
double l2_phi_norm(const SpaceGeometry& geo, const ScalarField& f);

// --- diagnostics used by invariants ---

// sup |grad g| with g's own symbols (metric compatibility defect).
double metric_compatibility_defect(const SpaceGeometry& geo);
// sup |R_i[jkl]| (first Bianchi defect) of a curvature tensor.
double first_bianchi_defect(const Riemann4Field& rm);
// sup of |R_ijkl grad^l f - (grad_i grad_j - grad_j grad_i) grad_k f|.
double commutator_anchor_defect(const SpaceGeometry& geo,
                                const ScalarField& f);

}  // namespace wcurv

#endif
