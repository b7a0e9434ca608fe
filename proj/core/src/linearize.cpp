#include "wcurv/linearize.hpp"

#include <cmath>

#include "wcurv/fd.hpp"

namespace wcurv {

ScalarField DR(const SpaceGeometry& geo, const Deformation& d) {
  const MetricMeasureSpace& s = geo.space;
  require_same_chart(s.g, d.h);
  require_same_chart(s.g, d.psi);
  const Chart& chart = *s.chart;
  const int n = chart.dim();
  const double m = s.m;

  ScalarField divdiv = div_phi(geo, div_phi(geo, d.h));

  ScalarField h_dot_rc = contract_full(geo, d.h, geo.rc_phi);
  ScalarField tr_h = trace(geo, d.h);
  ScalarField lap_tr = laplacian_phi(geo, tr_h);
  ScalarField lap_psi = laplacian_phi(geo, d.psi);
  VecField dpsi = differential(d.psi);

  const int margin =
      std::max({divdiv.margin(), h_dot_rc.margin(), lap_tr.margin(),
                lap_psi.margin(), dpsi.margin(), geo.grad_phi.margin()});
  ScalarField out(s.chart, margin);
  for_each_valid_node(chart, margin,
                      [&](std::size_t p, const std::array<int, kMaxDim>&) {
                        double dphi_dpsi = 0.0;
                        for (int i = 0; i < n; ++i)
                          dphi_dpsi += geo.grad_phi.at(p, i) * dpsi.at(p, i);
                        out[p] = divdiv[p] - h_dot_rc[p] - lap_tr[p] +
                                 2.0 * (lap_psi[p] - dphi_dpsi / m);
                      });
  return out;
}

ScalarField DR(const MetricMeasureSpace& s, const Deformation& d) {
  return DR(SpaceGeometry::compute(s), d);
}

AdjointImage DR_star(const SpaceGeometry& geo, const ScalarField& f) {
  const MetricMeasureSpace& s = geo.space;
  require_same_chart(s.g, f);
  const Chart& chart = *s.chart;
  const int n = chart.dim();
  const double m = s.m;

  Sym2Field H = hessian(geo, f);
  ScalarField lap_f = laplacian_phi(geo, f);
  VecField df = differential(f);

  AdjointImage out;
  const int tmargin =
      std::max({H.margin(), lap_f.margin(), geo.rc_phi.margin()});
  out.T = Sym2Field(s.chart, tmargin);
  for_each_valid_node(chart, tmargin,
                      [&](std::size_t p, const std::array<int, kMaxDim>&) {
                        for (int i = 0; i < n; ++i)
                          for (int j = i; j < n; ++j)
                            out.T.at(p, i, j) =
                                -lap_f[p] * s.g.at(p, i, j) + H.at(p, i, j) -
                                f[p] * geo.rc_phi.at(p, i, j);
                      });

  const int smargin = std::max({lap_f.margin(), df.margin(),
                                geo.grad_phi.margin(),
                                geo.lapw_phi_phi.margin()});
  out.s = ScalarField(s.chart, smargin);
  for_each_valid_node(chart, smargin,
                      [&](std::size_t p, const std::array<int, kMaxDim>&) {
                        double df_dphi = 0.0;
                        for (int i = 0; i < n; ++i)
                          df_dphi += geo.grad_phi.at(p, i) * df.at(p, i);
                        out.s[p] = 2.0 * lap_f[p] +
                                   (2.0 / m) * (df_dphi +
                                                f[p] * geo.lapw_phi_phi[p]);
                      });
  return out;
}

AdjointImage DR_star(const MetricMeasureSpace& s, const ScalarField& f) {
  return DR_star(SpaceGeometry::compute(s), f);
}

double inner_phi_pair(const SpaceGeometry& geo, const AdjointImage& a,
                      const Deformation& d) {
  return inner_phi(geo, a.T, d.h) + inner_phi(geo, a.s, d.psi);
}

double inner_phi_pair(const SpaceGeometry& geo, const Deformation& a,
                      const Deformation& b) {
  return inner_phi(geo, a.h, b.h) + inner_phi(geo, a.psi, b.psi);
}

double adjoint_defect(const MetricMeasureSpace& s, const Deformation& d,
                      const ScalarField& f) {
  if (!s.chart->all_periodic())
    throw PreconditionError("adjoint_defect requires a closed (torus) chart");
  SpaceGeometry geo = SpaceGeometry::compute(s);
  const double lhs = inner_phi(geo, f, DR(geo, d));
  const double rhs = inner_phi_pair(geo, DR_star(geo, f), d);
  return std::fabs(lhs - rhs) / (1.0 + std::fabs(lhs));
}

StaticResiduals static_residuals(const MetricMeasureSpace& s,
                                 const ScalarField& f) {
  return static_residuals(SpaceGeometry::compute(s), f);
}

StaticResiduals static_residuals(const SpaceGeometry& geo,
                                 const ScalarField& f) {
  const MetricMeasureSpace& s = geo.space;
  require_same_chart(s.g, f);
  const Chart& chart = *s.chart;
  const int n = chart.dim();
  const double m = s.m;

  StaticResiduals out;
  if (sup_abs(f) < 1e-12)
    out.warning = "potential f is identically zero to round-off";

  AdjointImage img = DR_star(geo, f);
  out.eq1 = img.T;

  ScalarField lap_f = laplacian_phi(geo, f);
  VecField df = differential(f);
  const int e2margin = std::max({lap_f.margin(), df.margin(),
                                 geo.grad_phi.margin(),
                                 geo.lapw_phi_phi.margin()});
  out.eq2 = ScalarField(s.chart, e2margin);
  for_each_valid_node(chart, e2margin,
                      [&](std::size_t p, const std::array<int, kMaxDim>&) {
                        double df_dphi = 0.0;
                        for (int i = 0; i < n; ++i)
                          df_dphi += geo.grad_phi.at(p, i) * df.at(p, i);
                        out.eq2[p] = lap_f[p] + (df_dphi +
                                                 f[p] * geo.lapw_phi_phi[p]) / m;
                      });

  const double denom = n + m - 1.0;
  const int tmargin = std::max(lap_f.margin(), geo.r_phi.margin());
  out.trace_form = ScalarField(s.chart, tmargin);
  for_each_valid_node(chart, tmargin,
                      [&](std::size_t p, const std::array<int, kMaxDim>&) {
                        out.trace_form[p] =
                            lap_f[p] + f[p] * geo.r_phi[p] / denom;
                      });

  Sym2Field H = hessian(geo, f);
  const int hmargin = std::max({H.margin(), geo.rc_phi.margin(),
                                geo.r_phi.margin()});
  out.hess_form = Sym2Field(s.chart, hmargin);
  for_each_valid_node(
      chart, hmargin, [&](std::size_t p, const std::array<int, kMaxDim>&) {
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j)
            out.hess_form.at(p, i, j) =
                H.at(p, i, j) -
                f[p] * (geo.rc_phi.at(p, i, j) -
                        geo.r_phi[p] * s.g.at(p, i, j) / denom);
      });
  return out;
}

Sym2Field classical_static_residual(const Sym2Field& g, const ScalarField& f) {
  require_same_chart(g, f);
  const Chart& chart = g.chart();
  const int n = chart.dim();
  if (n < 2)
    throw PreconditionError(
        "classical static residual needs dimension >= 2 (divides by n-1)");
  MetricInverse mi = invert_metric(g);
  Ten3Field gamma = christoffel(g, mi.inv);
  CurvatureSet cs = curvature(g, mi.inv, gamma, /*want_rm=*/false);
  Sym2Field H = hessian(gamma, f);
  const int margin = std::max({H.margin(), cs.rc.margin(), cs.r.margin()});
  Sym2Field out(g.chart_ptr(), margin);
  for_each_valid_node(chart, margin,
                      [&](std::size_t p, const std::array<int, kMaxDim>&) {
                        for (int i = 0; i < n; ++i)
                          for (int j = i; j < n; ++j)
                            out.at(p, i, j) =
                                H.at(p, i, j) -
                                f[p] * (cs.rc.at(p, i, j) -
                                        cs.r[p] * g.at(p, i, j) / (n - 1.0));
                      });
  return out;
}

ScalarField static_consistency_scalar(const SpaceGeometry& geo) {
  const MetricMeasureSpace& s = geo.space;
  const Chart& chart = *s.chart;
  const int n = chart.dim();
  if (n < 2)
    throw PreconditionError("consistency scalar needs dimension >= 2");
  const double m = s.m;
  const int margin = std::max({geo.lapw_phi_phi.margin(),
                               geo.r_phi.margin(), geo.r.margin()});
  ScalarField out(s.chart, margin);
  for_each_valid_node(chart, margin,
                      [&](std::size_t p, const std::array<int, kMaxDim>&) {
                        out[p] = geo.lapw_phi_phi[p] -
                                 (m - 1.0) / (m + n - 1.0) * geo.r_phi[p] -
                                 geo.r[p] / (n - 1.0);
                      });
  return out;
}

SymbolCheckResult symbol_check(const MetricMeasureSpace& s,
                               const std::vector<double>& eps_freq,
                               const ScalarField& f_mode) {
  const Chart& chart = *s.chart;
  const int n = chart.dim();
  if (!chart.all_periodic())
    throw PreconditionError("symbol_check requires a torus chart");
  if (static_cast<int>(eps_freq.size()) != n)
    throw PreconditionError("eps frequency needs one entry per axis");
  for (double k : eps_freq)
    if (k != std::floor(k))
      throw PreconditionError("eps must be a lattice frequency (integers)");
  // verify flatness and constant phi
  SpaceGeometry geo = SpaceGeometry::compute(s);
  if (sup_abs(geo.rc) > 1e-10 || sup_abs(geo.dphi) > 1e-10)
    throw PreconditionError("symbol_check requires flat g and constant phi");

  // covector eps_i = k_i * 2 pi / L_i
  std::vector<double> eps(n);
  double eps_norm2 = 0.0;  // flat metric: euclidean norm
  for (int i = 0; i < n; ++i) {
    eps[i] = eps_freq[i] * 2.0 * 3.14159265358979323846 / chart.extent(i);
    eps_norm2 += eps[i] * eps[i];
  }

  AdjointImage img = DR_star(geo, f_mode);
  SymbolCheckResult res{0.0, 0.0, 0.0};
  double sup_second = 0.0, sup_mode = 0.0;
  for_each_valid_node(
      chart, std::max(img.T.margin(), img.s.margin()),
      [&](std::size_t p, const std::array<int, kMaxDim>&) {
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            const double symbol =
                (eps_norm2 * s.g.at(p, i, j) - eps[i] * eps[j]) * f_mode[p];
            res.first_slot_defect =
                std::max(res.first_slot_defect,
                         std::fabs(img.T.at(p, i, j) - symbol));
          }
        res.second_slot_defect =
            std::max(res.second_slot_defect,
                     std::fabs(img.s[p] + 2.0 * eps_norm2 * f_mode[p]));
        sup_second = std::max(sup_second, std::fabs(img.s[p]));
        sup_mode = std::max(sup_mode, std::fabs(f_mode[p]));
      });
  const double weighted_symbol_sup = (2.0 / s.m) * eps_norm2 * sup_mode;
  res.second_slot_ratio_to_weighted =
      weighted_symbol_sup > 0.0 ? sup_second / weighted_symbol_sup : 0.0;
  return res;
}

}  // namespace wcurv
