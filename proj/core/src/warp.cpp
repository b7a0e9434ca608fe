#include "wcurv/warp.hpp"

#include <cmath>

#include "wcurv/fd.hpp"

namespace wcurv {

namespace {

const double kTwoPi = 6.28318530717958647692;

// product node index from a base node plus extra-axis indices
std::size_t product_flat(const Chart& prod, const std::array<int, kMaxDim>& be,
                         int base_dim, const std::array<int, kMaxDim>& extra,
                         int extra_dim) {
  std::array<int, kMaxDim> idx{};
  for (int a = 0; a < base_dim; ++a) idx[a] = be[a];
  for (int a = 0; a < extra_dim; ++a) idx[base_dim + a] = extra[a];
  return prod.flat(idx);
}

}  // namespace

FiberWarpResult riemannian_fiber_warp(const MetricMeasureSpace& base,
                                      int fiber_nodes, int dim_cap) {
  const double m = base.m;
  if (std::fabs(m - std::round(m)) > 1e-12 || m < 1.0)
    throw PreconditionError(
        "fiber warp needs a positive integer m (torus fiber dimension)");
  const int fm = static_cast<int>(std::round(m));
  const int nb = base.dim();
  if (nb + fm > dim_cap)
    throw PreconditionError("product dimension " + std::to_string(nb + fm) +
                            " exceeds the cap " + std::to_string(dim_cap));

  Chart fiber = Chart::torus(std::vector<int>(fm, fiber_nodes),
                             std::vector<double>(fm, kTwoPi),
                             base.chart->order());
  auto prod_chart = make_chart(base.chart->product(fiber));
  const Chart& pc = *prod_chart;
  const int np = pc.dim();

  Sym2Field gp(prod_chart, base.g.margin());
  ScalarField phip(prod_chart, base.phi.margin());
  for_each_node(pc, [&](std::size_t f, const std::array<int, kMaxDim>& idx) {
    std::array<int, kMaxDim> bidx{};
    for (int a = 0; a < nb; ++a) bidx[a] = idx[a];
    const std::size_t bf = base.chart->flat(bidx);
    for (int i = 0; i < nb; ++i)
      for (int j = i; j < nb; ++j) gp.at(f, i, j) = base.g.at(bf, i, j);
    const double w = std::exp(-2.0 * base.phi[bf] / m);
    for (int i = nb; i < np; ++i) gp.at(f, i, i) = w;
    phip[f] = base.phi[bf];
  });

  FiberWarpResult out;
  out.base_dim = nb;
  out.product = MetricMeasureSpace(prod_chart, std::move(gp), std::move(phip), m);

  CurvatureSet cs = curvature(out.product.g, /*want_rm=*/false);
  SpaceGeometry base_geo = SpaceGeometry::compute(base);

  const int margin = std::max(cs.r.margin(), base_geo.r_phi.margin());
  out.base_defect = ScalarField(base.chart, margin);
  std::array<int, kMaxDim> zero{};
  for_each_valid_node(
      *base.chart, margin,
      [&](std::size_t bf, const std::array<int, kMaxDim>& bidx) {
        const std::size_t pf = product_flat(pc, bidx, nb, zero, fm);
        out.base_defect[bf] = std::fabs(cs.r[pf] - base_geo.r_phi[bf]);
      });
  out.sup_defect = sup_abs(out.base_defect);

  // R of the product must not vary along fiber directions
  double indep = 0.0;
  for_each_valid_node(pc, cs.r.margin(),
                      [&](std::size_t pf, const std::array<int, kMaxDim>& idx) {
                        std::array<int, kMaxDim> bidx{};
                        for (int a = 0; a < nb; ++a) bidx[a] = idx[a];
                        const std::size_t p0 =
                            product_flat(pc, bidx, nb, zero, fm);
                        indep = std::max(indep, std::fabs(cs.r[pf] - cs.r[p0]));
                      });
  out.fiber_independence = indep;
  return out;
}

LorentzianWarpResult lorentzian_static_warp(const MetricMeasureSpace& base,
                                            const ScalarField& f,
                                            int time_nodes) {
  require_same_chart(base.g, f);
  const int nb = base.dim();

  // f must be nonvanishing on the valid region
  double fmin = std::numeric_limits<double>::infinity();
  for_each_valid_node(*base.chart, f.margin(),
                      [&](std::size_t p, const std::array<int, kMaxDim>&) {
                        fmin = std::min(fmin, std::fabs(f[p]));
                      });
  if (!(fmin > 0.0))
    throw PreconditionError("static warp requires f != 0 at all valid nodes");

  // All fields are t-independent, so a periodic time axis represents the
  // warp exactly and costs no interior margin.
  Chart time = Chart::torus({time_nodes}, {kTwoPi}, base.chart->order());
  auto prod_chart = make_chart(base.chart->product(time));
  const Chart& pc = *prod_chart;
  const int np = nb + 1;

  Sym2Field gp(prod_chart, std::max(base.g.margin(), f.margin()));
  ScalarField phip(prod_chart, base.phi.margin());
  for_each_node(pc, [&](std::size_t pf, const std::array<int, kMaxDim>& idx) {
    std::array<int, kMaxDim> bidx{};
    for (int a = 0; a < nb; ++a) bidx[a] = idx[a];
    const std::size_t bf = base.chart->flat(bidx);
    for (int i = 0; i < nb; ++i)
      for (int j = i; j < nb; ++j) gp.at(pf, i, j) = base.g.at(bf, i, j);
    gp.at(pf, np - 1, np - 1) = -f[bf] * f[bf];
    phip[pf] = base.phi[bf];
  });

  LorentzianWarpResult out;
  out.product =
      MetricMeasureSpace(prod_chart, std::move(gp), std::move(phip), base.m);

  SpaceGeometry pgeo = SpaceGeometry::compute(out.product);

  // best-fit k: mean of tr(gbar^-1 Rc_phi)/dim over valid nodes
  {
    double acc = 0.0;
    std::size_t count = 0;
    for_each_valid_node(pc, pgeo.rc_phi.margin(),
                        [&](std::size_t pf, const std::array<int, kMaxDim>&) {
                          double tr = 0.0;
                          for (int i = 0; i < np; ++i)
                            for (int j = 0; j < np; ++j)
                              tr += pgeo.ginv.at(pf, i, j) *
                                    pgeo.rc_phi.at(pf, i, j);
                          acc += tr / np;
                          ++count;
                        });
    out.fitted_k = count ? acc / count : 0.0;
  }
  {
    double worst = 0.0;
    for_each_valid_node(pc, pgeo.rc_phi.margin(),
                        [&](std::size_t pf, const std::array<int, kMaxDim>&) {
                          for (int i = 0; i < np; ++i)
                            for (int j = i; j < np; ++j)
                              worst = std::max(
                                  worst,
                                  std::fabs(pgeo.rc_phi.at(pf, i, j) -
                                            out.fitted_k *
                                                out.product.g.at(pf, i, j)));
                        });
    out.einstein_defect = worst;
  }

  // block identities for the unweighted Ricci of the warp
  {
    SpaceGeometry bgeo = SpaceGeometry::compute(base);
    Sym2Field H = hessian(bgeo, f);
    ScalarField lap = laplacian(bgeo, f);
    CurvatureSet pcs = curvature(out.product.g, pgeo.ginv, pgeo.gamma,
                                 /*want_rm=*/false);
    const int margin = std::max({pcs.rc.margin(), H.margin(), lap.margin()});
    double base_d = 0.0, mixed_d = 0.0, fiber_d = 0.0;
    std::array<int, kMaxDim> zero{};
    for_each_valid_node(
        *base.chart, margin,
        [&](std::size_t bf, const std::array<int, kMaxDim>& bidx) {
          const std::size_t pf = product_flat(pc, bidx, nb, zero, 1);
          for (int i = 0; i < nb; ++i)
            for (int j = i; j < nb; ++j) {
              const double expect =
                  bgeo.rc.at(bf, i, j) - H.at(bf, i, j) / f[bf];
              base_d = std::max(base_d,
                                std::fabs(pcs.rc.at(pf, i, j) - expect));
            }
          for (int i = 0; i < nb; ++i)
            mixed_d = std::max(mixed_d, std::fabs(pcs.rc.at(pf, i, np - 1)));
          const double gtt = out.product.g.at(pf, np - 1, np - 1);
          const double expect_tt = -(lap[bf] / f[bf]) * gtt;
          fiber_d = std::max(fiber_d,
                             std::fabs(pcs.rc.at(pf, np - 1, np - 1) -
                                       expect_tt));
        });
    out.block_base_defect = base_d;
    out.block_mixed_defect = mixed_d;
    out.block_fiber_defect = fiber_d;
  }

  // t-independence of the computed weighted Ricci
  {
    double indep = 0.0;
    std::array<int, kMaxDim> zero{};
    for_each_valid_node(
        pc, pgeo.rc_phi.margin(),
        [&](std::size_t pf, const std::array<int, kMaxDim>& idx) {
          std::array<int, kMaxDim> bidx{};
          for (int a = 0; a < nb; ++a) bidx[a] = idx[a];
          const std::size_t p0 = product_flat(pc, bidx, nb, zero, 1);
          for (int c = 0; c < pgeo.rc_phi.ncomp(); ++c)
            indep = std::max(indep, std::fabs(pgeo.rc_phi.comp(pf, c) -
                                              pgeo.rc_phi.comp(p0, c)));
        });
    out.time_independence = indep;
  }
  return out;
}

}  // namespace wcurv
