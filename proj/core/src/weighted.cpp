#include "wcurv/weighted.hpp"

#include <cmath>

#include "wcurv/fd.hpp"

namespace wcurv {

Sym2Field bakry_emery_ricci(const MetricMeasureSpace& s) {
  return SpaceGeometry::compute(s).rc_phi;
}

ScalarField weighted_scalar(const MetricMeasureSpace& s) {
  return SpaceGeometry::compute(s).r_phi;
}

Riemann4Field kulkarni_nomizu(const Sym2Field& p, const Sym2Field& g) {
  require_same_chart(p, g);
  const Chart& chart = p.chart();
  const int n = chart.dim();
  const int margin = std::max(p.margin(), g.margin());
  Riemann4Field out(p.chart_ptr(), margin);
  const int npairs = pair_count(n);
  std::vector<int> pi, pj;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      pi.push_back(i);
      pj.push_back(j);
    }
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        for (int a = 0; a < npairs; ++a)
                          for (int b = a; b < npairs; ++b) {
                            const int i = pi[a], j = pj[a];
                            const int k = pi[b], l = pj[b];
                            const double v = p.at(f, i, k) * g.at(f, j, l) +
                                             p.at(f, j, l) * g.at(f, i, k) -
                                             p.at(f, i, l) * g.at(f, j, k) -
                                             p.at(f, j, k) * g.at(f, i, l);
                            out.set_canonical(f, a, b, v);
                          }
                      });
  return out;
}

WeightedCurvaturePackage schouten_weyl(const MetricMeasureSpace& s) {
  return schouten_weyl(SpaceGeometry::compute(s));
}

WeightedCurvaturePackage schouten_weyl(const SpaceGeometry& geo) {
  const MetricMeasureSpace& s = geo.space;
  const Chart& chart = *s.chart;
  const int n = chart.dim();
  const double m = s.m;
  if (std::fabs(m + n - 3.0) < 1e-12)
    throw PreconditionError(
        "weighted Weyl tensor undefined at m + n = 3 (scaling degenerates)");

  WeightedCurvaturePackage pkg;
  pkg.rc_phi = geo.rc_phi;
  pkg.r_phi = geo.r_phi;
  pkg.characterization_in_range = n >= 3;

  const int margin = std::max(geo.rc_phi.margin(), geo.r_phi.margin());
  pkg.p_phi = Sym2Field(s.chart, margin);
  const double cp = 1.0 / (2.0 * (m + n - 1.0));
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        for (int i = 0; i < n; ++i)
                          for (int j = i; j < n; ++j)
                            pkg.p_phi.at(f, i, j) =
                                geo.rc_phi.at(f, i, j) -
                                cp * geo.r_phi[f] * s.g.at(f, i, j);
                      });

  CurvatureSet cs = curvature(s.g, geo.ginv, geo.gamma, /*want_rm=*/true);
  Riemann4Field kn = kulkarni_nomizu(pkg.p_phi, s.g);
  const int amargin = std::max(cs.rm.margin(), kn.margin());
  pkg.a_phi = Riemann4Field(s.chart, amargin);
  const double ca = 1.0 / (m + n - 2.0);
  const int npairs = pair_count(n);
  for_each_valid_node(
      chart, amargin, [&](std::size_t f, const std::array<int, kMaxDim>&) {
        for (int a = 0; a < npairs; ++a)
          for (int b = a; b < npairs; ++b)
            pkg.a_phi.set_canonical(f, a, b,
                                    cs.rm.get_canonical(f, a, b) -
                                        ca * kn.get_canonical(f, a, b));
      });
  return pkg;
}

ScalarField bianchi_defect(const SpaceGeometry& geo) {
  const MetricMeasureSpace& s = geo.space;
  const Chart& chart = *s.chart;
  const int n = chart.dim();

  VecField div_rc = div_phi(geo, geo.rc_phi);
  VecField dr = differential(geo.r_phi);
  const int margin = std::max({div_rc.margin(), dr.margin(),
                               geo.lapw_phi_phi.margin(), geo.dphi.margin()});
  VecField defect(s.chart, /*covariant=*/true, margin);
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        for (int i = 0; i < n; ++i)
                          defect.at(f, i) = div_rc.at(f, i) -
                                            0.5 * dr.at(f, i) +
                                            geo.lapw_phi_phi[f] *
                                                geo.dphi.at(f, i) / s.m;
                      });
  return vec_norm(geo, defect);
}

ScalarField bianchi_defect(const MetricMeasureSpace& s) {
  return bianchi_defect(SpaceGeometry::compute(s));
}

DivergenceIdentityDefects divergence_identities(const SpaceGeometry& geo,
                                                const ScalarField& f) {
  const MetricMeasureSpace& s = geo.space;
  const Chart& chart = *s.chart;
  const int n = chart.dim();
  const double m = s.m;

  ScalarField lap_f = laplacian_phi(geo, f);
  VecField df = differential(f);
  VecField gradf = raise(geo.ginv, df);
  VecField dlap = differential(lap_f);

  const int ip_margin = std::max(geo.grad_phi.margin(), df.margin());
  ScalarField phif(s.chart, ip_margin);  // <grad phi, grad f>
  for_each_valid_node(chart, ip_margin,
                      [&](std::size_t p, const std::array<int, kMaxDim>&) {
                        double v = 0.0;
                        for (int i = 0; i < n; ++i)
                          v += geo.grad_phi.at(p, i) * df.at(p, i);
                        phif[p] = v;
                      });

  DivergenceIdentityDefects out;

  {  // div_phi((Delta_phi f) g)_i = grad_i Delta_phi f - (Delta_phi f) dphi_i
    Sym2Field lap_g(s.chart, std::max(lap_f.margin(), s.g.margin()));
    for_each_valid_node(chart, lap_g.margin(),
                        [&](std::size_t p, const std::array<int, kMaxDim>&) {
                          for (int i = 0; i < n; ++i)
                            for (int j = i; j < n; ++j)
                              lap_g.at(p, i, j) = lap_f[p] * s.g.at(p, i, j);
                        });
    VecField lhs = div_phi(geo, lap_g);
    const int margin = std::max({lhs.margin(), dlap.margin(),
                                 lap_f.margin(), geo.dphi.margin()});
    VecField defect(s.chart, true, margin);
    for_each_valid_node(chart, margin,
                        [&](std::size_t p, const std::array<int, kMaxDim>&) {
                          for (int i = 0; i < n; ++i)
                            defect.at(p, i) = lhs.at(p, i) - dlap.at(p, i) +
                                              lap_f[p] * geo.dphi.at(p, i);
                        });
    out.lap_term = vec_norm(geo, defect);
  }

  {  // div_phi(Hess f)_i = grad_i Delta_phi f + Rc_phi_il grad^l f
     //                     + (1/m) <grad phi, grad f> dphi_i
    Sym2Field H = hessian(geo, f);
    VecField lhs = div_phi(geo, H);
    const int margin =
        std::max({lhs.margin(), dlap.margin(), geo.rc_phi.margin(),
                  gradf.margin(), phif.margin(), geo.dphi.margin()});
    VecField defect(s.chart, true, margin);
    for_each_valid_node(chart, margin,
                        [&](std::size_t p, const std::array<int, kMaxDim>&) {
                          for (int i = 0; i < n; ++i) {
                            double rc_gf = 0.0;
                            for (int l = 0; l < n; ++l)
                              rc_gf += geo.rc_phi.at(p, i, l) * gradf.at(p, l);
                            defect.at(p, i) = lhs.at(p, i) - dlap.at(p, i) -
                                              rc_gf -
                                              phif[p] * geo.dphi.at(p, i) / m;
                          }
                        });
    out.hess_term = vec_norm(geo, defect);
  }

  {  // div_phi(f Rc_phi)_i = Rc_phi_il grad^l f + (f/2) grad_i R_phi
     //                       - (f/m)(Delta_phi phi) dphi_i
    Sym2Field fr(s.chart, std::max(f.margin(), geo.rc_phi.margin()));
    for_each_valid_node(chart, fr.margin(),
                        [&](std::size_t p, const std::array<int, kMaxDim>&) {
                          for (int i = 0; i < n; ++i)
                            for (int j = i; j < n; ++j)
                              fr.at(p, i, j) = f[p] * geo.rc_phi.at(p, i, j);
                        });
    VecField lhs = div_phi(geo, fr);
    VecField dr = differential(geo.r_phi);
    const int margin =
        std::max({lhs.margin(), dr.margin(), geo.rc_phi.margin(),
                  gradf.margin(), geo.lapw_phi_phi.margin(),
                  geo.dphi.margin()});
    VecField defect(s.chart, true, margin);
    for_each_valid_node(
        chart, margin, [&](std::size_t p, const std::array<int, kMaxDim>&) {
          for (int i = 0; i < n; ++i) {
            double rc_gf = 0.0;
            for (int l = 0; l < n; ++l)
              rc_gf += geo.rc_phi.at(p, i, l) * gradf.at(p, l);
            defect.at(p, i) = lhs.at(p, i) - rc_gf -
                              0.5 * f[p] * dr.at(p, i) +
                              f[p] * geo.lapw_phi_phi[p] * geo.dphi.at(p, i) / m;
          }
        });
    out.ricci_term = vec_norm(geo, defect);
  }
  return out;
}

MetricMeasureSpace lcf_construct(const ChartPtr& chart, const ScalarField& u,
                                 double m) {
  if (u.chart() != *chart) throw ChartError("u lives on a different chart");
  const int n = chart->dim();
  Sym2Field g(chart, u.margin());
  ScalarField phi(chart, u.margin());
  for_each_valid_node(*chart, u.margin(),
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        const double w = std::exp(-2.0 * u[f]);
                        for (int i = 0; i < n; ++i) g.at(f, i, i) = w;
                        phi[f] = m * u[f];
                      });
  return MetricMeasureSpace(chart, std::move(g), std::move(phi), m);
}

ScalarField trace_identity_defect(const SpaceGeometry& geo) {
  ScalarField tr_rc = trace(geo, geo.rc_phi);
  const Chart& chart = *geo.space.chart;
  const int margin = std::max({geo.r_phi.margin(), tr_rc.margin(),
                               geo.lapw_phi_phi.margin()});
  ScalarField out(geo.space.chart, margin);
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        out[f] = geo.r_phi[f] - tr_rc[f] - geo.lapw_phi_phi[f];
                      });
  return out;
}

ScalarField codazzi_defect(const SpaceGeometry& geo, const Sym2Field& p_phi) {
  Ten3Field gp = covariant_derivative(geo.gamma, p_phi);
  const Chart& chart = *geo.space.chart;
  const int n = chart.dim();
  ScalarField out(geo.space.chart, gp.margin());
  for_each_valid_node(chart, gp.margin(),
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        double worst = 0.0;
                        for (int i = 0; i < n; ++i)
                          for (int j = i + 1; j < n; ++j)
                            for (int k = 0; k < n; ++k)
                              worst = std::max(
                                  worst, std::fabs(gp.at(f, i, j, k) -
                                                   gp.at(f, j, i, k)));
                        out[f] = worst;
                      });
  return out;
}

ScalarField contracted_identity_defect(const SpaceGeometry& geo,
                                       const ScalarField& f) {
  const MetricMeasureSpace& s = geo.space;
  const Chart& chart = *s.chart;
  const int n = chart.dim();
  const double m = s.m;

  CurvatureSet cs = curvature(s.g, geo.ginv, geo.gamma, /*want_rm=*/true);
  VecField df = differential(f);
  VecField gradf = raise(geo.ginv, df);
  const int margin = std::max(
      {cs.rm.margin(), geo.rc_phi.margin(), geo.r_phi.margin(),
       df.margin(), gradf.margin()});
  ScalarField out(s.chart, margin);
  const double c1 = 1.0 / (m + n - 2.0);
  const double c2 = 1.0 / ((m + n - 1.0) * (m + n - 2.0));
  for_each_valid_node(
      chart, margin, [&](std::size_t p, const std::array<int, kMaxDim>&) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
              double lhs = 0.0;
              for (int l = 0; l < n; ++l)
                lhs += cs.rm.get(p, i, j, k, l) * gradf.at(p, l);
              double rc_il = 0.0, rc_jl = 0.0;
              for (int l = 0; l < n; ++l) {
                rc_il += geo.rc_phi.at(p, i, l) * gradf.at(p, l);
                rc_jl += geo.rc_phi.at(p, j, l) * gradf.at(p, l);
              }
              const double rhs =
                  -c1 * (rc_il * s.g.at(p, j, k) +
                         geo.rc_phi.at(p, j, k) * df.at(p, i) -
                         geo.rc_phi.at(p, i, k) * df.at(p, j) -
                         rc_jl * s.g.at(p, i, k)) +
                  c2 * geo.r_phi[p] *
                      (s.g.at(p, j, k) * df.at(p, i) -
                       s.g.at(p, i, k) * df.at(p, j));
              worst = std::max(worst, std::fabs(lhs - rhs));
            }
        out[p] = worst;
      });
  return out;
}

}  // namespace wcurv
