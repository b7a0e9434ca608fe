#include "wcurv/geometry.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>

#include "wcurv/fd.hpp"
#include "wcurv/parallel.hpp"

namespace wcurv {

MetricMeasureSpace::MetricMeasureSpace(ChartPtr chart_, Sym2Field g_,
                                       ScalarField phi_, double m_)
    : chart(std::move(chart_)), g(std::move(g_)), phi(std::move(phi_)), m(m_) {
  if (!chart) throw ChartError("space needs a chart");
  if (g.chart() != *chart || phi.chart() != *chart)
    throw ChartError("space fields live on a different chart");
  if (!(m > 0.0) || !std::isfinite(m))
    throw PreconditionError("dimensional parameter m must be positive and finite");
}

MetricMeasureSpace flat_space(ChartPtr chart, ScalarField phi, double m) {
  Sym2Field g(chart);
  const int n = chart->dim();
  for_each_node(*chart, [&](std::size_t f, const std::array<int, kMaxDim>&) {
    for (int i = 0; i < n; ++i) g.at(f, i, i) = 1.0;
  });
  return MetricMeasureSpace(std::move(chart), std::move(g), std::move(phi), m);
}

MetricMeasureSpace flat_space(ChartPtr chart, double m) {
  ScalarField phi(chart);
  return flat_space(std::move(chart), std::move(phi), m);
}

namespace {

// Dense n x n inverse + determinant by Gauss-Jordan with partial pivoting.
// Returns false when the pivot collapses entirely (exactly singular).
bool invert_dense(int n, double* a, double* inv, double* det_out) {
  double det = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv[i * n + j] = (i == j) ? 1.0 : 0.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::fabs(a[col * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::fabs(a[r * n + col]);
      if (v > best) { best = v; piv = r; }
    }
    if (best == 0.0) return false;
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a[piv * n + j], a[col * n + j]);
        std::swap(inv[piv * n + j], inv[col * n + j]);
      }
      det = -det;
    }
    const double p = a[col * n + col];
    det *= p;
    const double ip = 1.0 / p;
    for (int j = 0; j < n; ++j) {
      a[col * n + j] *= ip;
      inv[col * n + j] *= ip;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r * n + col];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a[r * n + j] -= f * a[col * n + j];
        inv[r * n + j] -= f * inv[col * n + j];
      }
    }
  }
  *det_out = det;
  return true;
}

// Per-node central-stencil reads; used where materializing a full
// derivative field would be wasteful (curvature loops).
struct StencilReader {
  const Chart& chart;
  const std::vector<double>& c;
  int hw;

  explicit StencilReader(const Chart& ch)
      : chart(ch), c(d1_stencil(ch.order())),
        hw(static_cast<int>(d1_stencil(ch.order()).size()) / 2) {}

  double d1(const detail::FieldBase& F, int comp, std::size_t flat,
            const std::array<int, kMaxDim>& idx, int axis) const {
    const int nax = chart.size(axis);
    const bool wrap = chart.periodic(axis);
    const std::ptrdiff_t stride =
        static_cast<std::ptrdiff_t>(chart.stride(axis)) * F.ncomp();
    const double* base = F.data() + flat * F.ncomp() + comp;
    const int j = idx[axis];
    auto at = [&](int k) {
      int jj = j + k;
      if (wrap) {
        if (jj < 0) jj += nax;
        else if (jj >= nax) jj -= nax;
      }
      return base[(jj - j) * stride];
    };
    double s = 0.0;
    for (int k = 1; k <= hw; ++k) s += c[hw + k] * (at(k) - at(-k));
    return s / chart.spacing(axis);
  }
};

int derivative_margin(const Chart& chart, int in_margin) {
  const int hw = chart.order() / 2;
  return in_margin + (chart.any_open() ? hw : 0);
}

}  // namespace

MetricInverse invert_metric(const Sym2Field& g) {
  const Chart& chart = g.chart();
  const int n = chart.dim();
  MetricInverse out{Sym2Field(g.chart_ptr(), g.margin()),
                    ScalarField(g.chart_ptr(), g.margin()),
                    ScalarField(g.chart_ptr(), g.margin())};
  const int margin = g.margin();
  std::atomic<bool> failed{false};
  std::mutex failure_mutex;
  std::string failure;

  parallel_for(chart.node_count(), [&](std::size_t begin, std::size_t end) {
    std::array<int, kMaxDim> idx{};
    chart.unflat(begin, idx);
    double a[kMaxDim * kMaxDim], inv[kMaxDim * kMaxDim];
    for (std::size_t f = begin; f < end; ++f) {
      if (chart.node_valid(idx, margin)) {
        double scale = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double v = g.at(f, i, j);
            a[i * n + j] = v;
            scale = std::max(scale, std::fabs(v));
          }
        double det = 0.0;
        bool ok = scale > 0.0 && invert_dense(n, a, inv, &det);
        double floor = kDetFloor;
        for (int i = 0; i < n; ++i) floor *= scale;
        if (!ok || std::fabs(det) < floor) {
          if (!failed.exchange(true)) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            failure = "metric singular at node " + std::to_string(f) +
                      " (|det| = " + std::to_string(ok ? det : 0.0) + ")";
          }
        } else {
          out.det[f] = det;
          out.sqrt_abs_det[f] = std::sqrt(std::fabs(det));
          for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) out.inv.at(f, i, j) = inv[i * n + j];
        }
      }
      for (int a2 = chart.dim() - 1; a2 >= 0; --a2) {
        if (++idx[a2] < chart.size(a2)) break;
        idx[a2] = 0;
      }
    }
  });
  if (failed) throw SingularMetricError(failure);
  return out;
}

Ten3Field christoffel(const Sym2Field& g) {
  return christoffel(g, invert_metric(g).inv);
}

Ten3Field christoffel(const Sym2Field& g, const Sym2Field& ginv) {
  const Chart& chart = g.chart();
  const int n = chart.dim();
  const int out_margin = derivative_margin(chart, g.margin());
  Ten3Field gamma(g.chart_ptr(), out_margin);
  const StencilReader sr(chart);

  parallel_for(chart.node_count(), [&](std::size_t begin, std::size_t end) {
    std::array<int, kMaxDim> idx{};
    chart.unflat(begin, idx);
    double dg[kMaxDim][kMaxDim * (kMaxDim + 1) / 2];
    for (std::size_t f = begin; f < end; ++f) {
      if (chart.node_valid(idx, out_margin)) {
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < sym_count(n); ++c)
            dg[a][c] = sr.d1(g, c, f, idx, a);
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j)
            for (int k = 0; k < n; ++k) {
              double s = 0.0;
              for (int l = 0; l < n; ++l) {
                const double term = dg[i][sym_index(n, j, l)] +
                                    dg[j][sym_index(n, i, l)] -
                                    dg[l][sym_index(n, i, j)];
                s += ginv.at(f, k, l) * term;
              }
              gamma.at(f, k, i, j) = 0.5 * s;
            }
      }
      for (int a2 = chart.dim() - 1; a2 >= 0; --a2) {
        if (++idx[a2] < chart.size(a2)) break;
        idx[a2] = 0;
      }
    }
  });
  return gamma;
}

CurvatureSet curvature(const Sym2Field& g, bool want_rm) {
  const MetricInverse mi = invert_metric(g);
  const Ten3Field gamma = christoffel(g, mi.inv);
  return curvature(g, mi.inv, gamma, want_rm);
}

CurvatureSet curvature(const Sym2Field& g, const Sym2Field& ginv,
                       const Ten3Field& gamma, bool want_rm) {
  const Chart& chart = g.chart();
  const int n = chart.dim();
  const int out_margin = derivative_margin(chart, gamma.margin());
  const StencilReader sr(chart);

  CurvatureSet out{Riemann4Field(g.chart_ptr(), out_margin),
                   Sym2Field(g.chart_ptr(), out_margin),
                   ScalarField(g.chart_ptr(), out_margin)};
  if (!want_rm) out.rm = Riemann4Field();

  const int npairs = pair_count(n);
  // canonical pair list (i<j)
  int pi[kMaxDim * (kMaxDim - 1) / 2], pj[kMaxDim * (kMaxDim - 1) / 2];
  {
    int a = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) { pi[a] = i; pj[a] = j; ++a; }
  }

  parallel_for(chart.node_count(), [&](std::size_t begin, std::size_t end) {
    std::array<int, kMaxDim> idx{};
    chart.unflat(begin, idx);
    for (std::size_t f = begin; f < end; ++f) {
      if (chart.node_valid(idx, out_margin)) {
        // Ricci: Rc_jk = d_i G^i_jk - d_j G^i_ik + G^i_ia G^a_jk - G^i_ja G^a_ik
        for (int j = 0; j < n; ++j)
          for (int k = j; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
              s += sr.d1(gamma, i * sym_count(n) + sym_index(n, j, k), f, idx, i);
              s -= sr.d1(gamma, i * sym_count(n) + sym_index(n, i, k), f, idx, j);
              for (int a = 0; a < n; ++a) {
                s += gamma.at(f, i, i, a) * gamma.at(f, a, j, k);
                s -= gamma.at(f, i, j, a) * gamma.at(f, a, i, k);
              }
            }
            out.rc.at(f, j, k) = s;
          }
        double r = 0.0;
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) r += ginv.at(f, j, k) * out.rc.at(f, j, k);
        out.r[f] = r;

        if (want_rm) {
          // R_ijkl = -g_lm K^m_kij,
          // K^m_kij = d_i G^m_jk - d_j G^m_ik + G^m_ia G^a_jk - G^m_ja G^a_ik
          // The pair-exchange symmetry R_ijkl = R_klij holds only to
          // discretization order for the raw K, so the stored canonical
          // component averages the (a,b) and (b,a) values.
          auto raw = [&](int i, int j, int k, int l) {
            double s = 0.0;
            for (int m2 = 0; m2 < n; ++m2) {
              double K =
                  sr.d1(gamma, m2 * sym_count(n) + sym_index(n, j, k), f, idx, i) -
                  sr.d1(gamma, m2 * sym_count(n) + sym_index(n, i, k), f, idx, j);
              for (int c = 0; c < n; ++c) {
                K += gamma.at(f, m2, i, c) * gamma.at(f, c, j, k);
                K -= gamma.at(f, m2, j, c) * gamma.at(f, c, i, k);
              }
              s += g.at(f, l, m2) * K;
            }
            return -s;
          };
          for (int a = 0; a < npairs; ++a)
            for (int b = a; b < npairs; ++b) {
              const int i = pi[a], j = pj[a], k = pi[b], l = pj[b];
              const double v = a == b ? raw(i, j, k, l)
                                      : 0.5 * (raw(i, j, k, l) + raw(k, l, i, j));
              out.rm.set_canonical(f, a, b, v);
            }
        }
      }
      for (int a2 = chart.dim() - 1; a2 >= 0; --a2) {
        if (++idx[a2] < chart.size(a2)) break;
        idx[a2] = 0;
      }
    }
  });
  return out;
}

VecField differential(const ScalarField& f) {
  const Chart& chart = f.chart();
  const int n = chart.dim();
  const int out_margin = derivative_margin(chart, f.margin());
  VecField df(f.chart_ptr(), /*covariant=*/true, out_margin);
  for (int a = 0; a < n; ++a) {
    ScalarField pa = partial(f, a);
    for_each_valid_node(chart, out_margin,
                        [&](std::size_t node, const std::array<int, kMaxDim>&) {
                          df.at(node, a) = pa[node];
                        });
  }
  return df;
}

VecField raise(const Sym2Field& ginv, const VecField& omega) {
  if (!omega.covariant())
    throw PreconditionError("raise: argument is already contravariant");
  const Chart& chart = omega.chart();
  const int n = chart.dim();
  const int margin = std::max(ginv.margin(), omega.margin());
  VecField v(omega.chart_ptr(), /*covariant=*/false, margin);
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        for (int i = 0; i < n; ++i) {
                          double s = 0.0;
                          for (int j = 0; j < n; ++j)
                            s += ginv.at(f, i, j) * omega.at(f, j);
                          v.at(f, i) = s;
                        }
                      });
  return v;
}

VecField lower(const Sym2Field& g, const VecField& v) {
  if (v.covariant())
    throw PreconditionError("lower: argument is already covariant");
  const Chart& chart = v.chart();
  const int n = chart.dim();
  const int margin = std::max(g.margin(), v.margin());
  VecField omega(v.chart_ptr(), /*covariant=*/true, margin);
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        for (int i = 0; i < n; ++i) {
                          double s = 0.0;
                          for (int j = 0; j < n; ++j)
                            s += g.at(f, i, j) * v.at(f, j);
                          omega.at(f, i) = s;
                        }
                      });
  return omega;
}

Sym2Field hessian(const Ten3Field& gamma, const ScalarField& f) {
  const Chart& chart = f.chart();
  const int n = chart.dim();

  std::vector<ScalarField> pf;
  pf.reserve(n);
  for (int a = 0; a < n; ++a) pf.push_back(partial(f, a));

  int margin = gamma.margin();
  for (const auto& p : pf) margin = std::max(margin, derivative_margin(chart, p.margin()));

  Sym2Field H(f.chart_ptr(), margin);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      ScalarField dd = (i == j) ? partial2(f, i) : partial(pf[i], j);
      for_each_valid_node(chart, margin,
                          [&](std::size_t node, const std::array<int, kMaxDim>&) {
                            double s = dd[node];
                            for (int a = 0; a < n; ++a)
                              s -= gamma.at(node, a, i, j) * pf[a][node];
                            H.at(node, i, j) = s;
                          });
    }
  return H;
}

Sym2Field hessian(const SpaceGeometry& geo, const ScalarField& f) {
  require_same_chart(geo.space.g, f);
  return hessian(geo.gamma, f);
}

VecField grad(const SpaceGeometry& geo, const ScalarField& f) {
  return raise(geo.ginv, differential(f));
}

ScalarField laplacian(const SpaceGeometry& geo, const ScalarField& f) {
  return trace(geo, hessian(geo, f));
}

ScalarField laplacian_phi(const SpaceGeometry& geo, const ScalarField& f) {
  const Chart& chart = f.chart();
  const int n = chart.dim();
  ScalarField lap = laplacian(geo, f);
  VecField df = differential(f);
  const int margin = std::max({lap.margin(), df.margin(), geo.grad_phi.margin()});
  ScalarField out(f.chart_ptr(), margin);
  for_each_valid_node(chart, margin,
                      [&](std::size_t f2, const std::array<int, kMaxDim>&) {
                        double s = lap[f2];
                        for (int a = 0; a < n; ++a)
                          s -= geo.grad_phi.at(f2, a) * df.at(f2, a);
                        out[f2] = s;
                      });
  return out;
}

Sym2Field hessian(const MetricMeasureSpace& s, const ScalarField& f) {
  return hessian(SpaceGeometry::compute(s), f);
}
VecField grad(const MetricMeasureSpace& s, const ScalarField& f) {
  return grad(SpaceGeometry::compute(s), f);
}
ScalarField laplacian_phi(const MetricMeasureSpace& s, const ScalarField& f) {
  return laplacian_phi(SpaceGeometry::compute(s), f);
}

Ten2Field covariant_derivative(const Ten3Field& gamma, const VecField& omega) {
  if (!omega.covariant())
    throw PreconditionError("covariant_derivative expects a covariant field");
  const Chart& chart = omega.chart();
  const int n = chart.dim();
  const int dmargin = derivative_margin(chart, omega.margin());
  const int margin = std::max(dmargin, gamma.margin());
  Ten2Field out(omega.chart_ptr(), margin);
  std::vector<VecField> pw;
  pw.reserve(n);
  for (int a = 0; a < n; ++a) pw.push_back(partial(omega, a));
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        for (int i = 0; i < n; ++i)
                          for (int j = 0; j < n; ++j) {
                            double s = pw[i].at(f, j);
                            for (int a = 0; a < n; ++a)
                              s -= gamma.at(f, a, i, j) * omega.at(f, a);
                            out.at(f, i, j) = s;
                          }
                      });
  return out;
}

Ten3Field covariant_derivative(const Ten3Field& gamma, const Sym2Field& T) {
  const Chart& chart = T.chart();
  const int n = chart.dim();
  const int dmargin = derivative_margin(chart, T.margin());
  const int margin = std::max(dmargin, gamma.margin());
  Ten3Field out(T.chart_ptr(), margin);
  std::vector<Sym2Field> pT;
  pT.reserve(n);
  for (int a = 0; a < n; ++a) pT.push_back(partial(T, a));
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        for (int i = 0; i < n; ++i)
                          for (int j = 0; j < n; ++j)
                            for (int k = j; k < n; ++k) {
                              double s = pT[i].at(f, j, k);
                              for (int a = 0; a < n; ++a) {
                                s -= gamma.at(f, a, i, j) * T.at(f, a, k);
                                s -= gamma.at(f, a, i, k) * T.at(f, j, a);
                              }
                              out.at(f, i, j, k) = s;
                            }
                      });
  return out;
}

ScalarField div_phi(const SpaceGeometry& geo, const VecField& omega) {
  require_same_chart(geo.space.g, omega);
  if (!omega.covariant())
    throw PreconditionError("div_phi expects covariant input");
  const Chart& chart = omega.chart();
  const int n = chart.dim();
  Ten2Field grad_omega = covariant_derivative(geo.gamma, omega);
  const int margin = std::max(grad_omega.margin(), geo.grad_phi.margin());
  ScalarField out(omega.chart_ptr(), margin);
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        double s = 0.0;
                        for (int i = 0; i < n; ++i)
                          for (int k = 0; k < n; ++k)
                            s += geo.ginv.at(f, i, k) * grad_omega.at(f, i, k);
                        for (int k = 0; k < n; ++k)
                          s -= geo.grad_phi.at(f, k) * omega.at(f, k);
                        out[f] = s;
                      });
  return out;
}

VecField div_phi(const SpaceGeometry& geo, const Sym2Field& T) {
  require_same_chart(geo.space.g, T);
  const Chart& chart = T.chart();
  const int n = chart.dim();
  Ten3Field gT = covariant_derivative(geo.gamma, T);
  const int margin = std::max(gT.margin(), geo.grad_phi.margin());
  VecField out(T.chart_ptr(), /*covariant=*/true, margin);
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        for (int j = 0; j < n; ++j) {
                          double s = 0.0;
                          for (int i = 0; i < n; ++i)
                            for (int k = 0; k < n; ++k)
                              s += geo.ginv.at(f, i, k) * gT.at(f, i, k, j);
                          for (int k = 0; k < n; ++k)
                            s -= geo.grad_phi.at(f, k) * T.at(f, k, j);
                          out.at(f, j) = s;
                        }
                      });
  return out;
}

ScalarField div_phi(const MetricMeasureSpace& s, const VecField& omega) {
  return div_phi(SpaceGeometry::compute(s), omega);
}
VecField div_phi(const MetricMeasureSpace& s, const Sym2Field& T) {
  return div_phi(SpaceGeometry::compute(s), T);
}

ScalarField contract_full(const SpaceGeometry& geo, const Sym2Field& A,
                          const Sym2Field& B) {
  const Chart& chart = A.chart();
  const int n = chart.dim();
  const int margin = std::max({A.margin(), B.margin(), geo.ginv.margin()});
  ScalarField out(A.chart_ptr(), margin);
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        double s = 0.0;
                        for (int i = 0; i < n; ++i)
                          for (int j = 0; j < n; ++j)
                            for (int k = 0; k < n; ++k)
                              for (int l = 0; l < n; ++l)
                                s += geo.ginv.at(f, i, k) * geo.ginv.at(f, j, l) *
                                     A.at(f, i, j) * B.at(f, k, l);
                        out[f] = s;
                      });
  return out;
}

ScalarField trace(const SpaceGeometry& geo, const Sym2Field& A) {
  const Chart& chart = A.chart();
  const int n = chart.dim();
  const int margin = std::max(A.margin(), geo.ginv.margin());
  ScalarField out(A.chart_ptr(), margin);
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        double s = 0.0;
                        for (int i = 0; i < n; ++i)
                          for (int j = 0; j < n; ++j)
                            s += geo.ginv.at(f, i, j) * A.at(f, i, j);
                        out[f] = s;
                      });
  return out;
}

ScalarField vec_norm(const SpaceGeometry& geo, const VecField& omega) {
  const Chart& chart = omega.chart();
  const int n = chart.dim();
  const int margin = std::max(omega.margin(), geo.ginv.margin());
  ScalarField out(omega.chart_ptr(), margin);
  const bool cov = omega.covariant();
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        double s = 0.0;
                        for (int i = 0; i < n; ++i)
                          for (int j = 0; j < n; ++j) {
                            const double gij = cov ? geo.ginv.at(f, i, j)
                                                   : geo.space.g.at(f, i, j);
                            s += gij * omega.at(f, i) * omega.at(f, j);
                          }
                        out[f] = std::sqrt(std::fabs(s));
                      });
  return out;
}

ScalarField sym2_norm(const SpaceGeometry& geo, const Sym2Field& T) {
  ScalarField c = contract_full(geo, T, T);
  ScalarField out(T.chart_ptr(), c.margin());
  for_each_valid_node(T.chart(), c.margin(),
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        out[f] = std::sqrt(std::fabs(c[f]));
                      });
  return out;
}

ScalarField riemann_norm(const SpaceGeometry& geo, const Riemann4Field& R) {
  const Chart& chart = R.chart();
  const int n = chart.dim();
  const int margin = std::max(R.margin(), geo.ginv.margin());
  ScalarField out(R.chart_ptr(), margin);
  const int n4 = n * n * n * n;
  std::vector<double> t0(n4), t1(n4);
  auto id4 = [n](int i, int j, int k, int l) {
    return ((i * n + j) * n + k) * n + l;
  };
  for_each_valid_node(
      chart, margin, [&](std::size_t f, const std::array<int, kMaxDim>&) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
              for (int l = 0; l < n; ++l)
                t0[id4(i, j, k, l)] = R.get(f, i, j, k, l);
        // raise the four indices one at a time
        for (int slot = 0; slot < 4; ++slot) {
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                  double s = 0.0;
                  int idx4[4] = {i, j, k, l};
                  for (int a = 0; a < n; ++a) {
                    int src[4] = {i, j, k, l};
                    src[slot] = a;
                    s += geo.ginv.at(f, idx4[slot], a) *
                         t0[id4(src[0], src[1], src[2], src[3])];
                  }
                  t1[id4(i, j, k, l)] = s;
                }
          std::swap(t0, t1);
        }
        double s = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
              for (int l = 0; l < n; ++l)
                s += t0[id4(i, j, k, l)] * R.get(f, i, j, k, l);
        out[f] = std::sqrt(std::fabs(s));
      });
  return out;
}

double integrate_phi(const SpaceGeometry& geo, const ScalarField& f) {
  const Chart& chart = f.chart();
  if (!chart.all_periodic())
    throw PreconditionError("integrate_phi requires a closed (torus) chart");
  require_same_chart(geo.space.g, f);
  double cell = 1.0;
  for (int a = 0; a < chart.dim(); ++a) cell *= chart.spacing(a);
  double s = 0.0;
  const std::size_t total = chart.node_count();
  for (std::size_t i = 0; i < total; ++i)
    s += f[i] * std::exp(-geo.space.phi[i]) * geo.sqrt_abs_det[i];
  return s * cell;
}

double integrate_phi(const MetricMeasureSpace& s, const ScalarField& f) {
  return integrate_phi(SpaceGeometry::compute(s), f);
}

namespace {
template <typename Maker>
double integrate_pointwise(const SpaceGeometry& geo, const Chart& chart,
                           Maker&& maker) {
  if (!chart.all_periodic())
    throw PreconditionError("inner_phi requires a closed (torus) chart");
  double cell = 1.0;
  for (int a = 0; a < chart.dim(); ++a) cell *= chart.spacing(a);
  double s = 0.0;
  const std::size_t total = chart.node_count();
  for (std::size_t i = 0; i < total; ++i)
    s += maker(i) * std::exp(-geo.space.phi[i]) * geo.sqrt_abs_det[i];
  return s * cell;
}
}  // namespace

double inner_phi(const SpaceGeometry& geo, const ScalarField& a,
                 const ScalarField& b) {
  require_same_chart(a, b);
  return integrate_pointwise(geo, a.chart(),
                             [&](std::size_t i) { return a[i] * b[i]; });
}

double inner_phi(const SpaceGeometry& geo, const VecField& a,
                 const VecField& b) {
  require_same_chart(a, b);
  if (a.covariant() != b.covariant())
    throw PreconditionError("inner_phi: mixed variance");
  const int n = a.chart().dim();
  const bool cov = a.covariant();
  return integrate_pointwise(geo, a.chart(), [&](std::size_t f) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double gij =
            cov ? geo.ginv.at(f, i, j) : geo.space.g.at(f, i, j);
        s += gij * a.at(f, i) * b.at(f, j);
      }
    return s;
  });
}

double inner_phi(const SpaceGeometry& geo, const Sym2Field& a,
                 const Sym2Field& b) {
  require_same_chart(a, b);
  const int n = a.chart().dim();
  return integrate_pointwise(geo, a.chart(), [&](std::size_t f) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            s += geo.ginv.at(f, i, k) * geo.ginv.at(f, j, l) * a.at(f, i, j) *
                 b.at(f, k, l);
    return s;
  });
}

double l2_phi_norm(const SpaceGeometry& geo, const ScalarField& f) {
  const Chart& chart = f.chart();
  double cell = 1.0;
  for (int a = 0; a < chart.dim(); ++a) cell *= chart.spacing(a);
  double s = 0.0;
  const int margin = f.margin();
  for_each_valid_node(chart, margin,
                      [&](std::size_t i, const std::array<int, kMaxDim>&) {
                        s += f[i] * f[i] * std::exp(-geo.space.phi[i]) *
                             geo.sqrt_abs_det[i];
                      });
  return std::sqrt(s * cell);
}

SpaceGeometry SpaceGeometry::compute(const MetricMeasureSpace& s) {
  SpaceGeometry geo;
  geo.space = s;
  MetricInverse mi = invert_metric(s.g);
  geo.ginv = std::move(mi.inv);
  geo.det = std::move(mi.det);
  geo.sqrt_abs_det = std::move(mi.sqrt_abs_det);
  geo.gamma = christoffel(s.g, geo.ginv);
  CurvatureSet cs = curvature(s.g, geo.ginv, geo.gamma, /*want_rm=*/false);
  geo.rc = std::move(cs.rc);
  geo.r = std::move(cs.r);

  geo.dphi = differential(s.phi);
  geo.grad_phi = raise(geo.ginv, geo.dphi);
  geo.hess_phi = hessian(geo.gamma, s.phi);

  const Chart& chart = *s.chart;
  const int n = chart.dim();
  {
    const int margin = std::max(geo.hess_phi.margin(), geo.ginv.margin());
    geo.lap_phi = ScalarField(s.chart, margin);
    geo.normsq_dphi = ScalarField(s.chart, std::max(geo.dphi.margin(), geo.ginv.margin()));
    for_each_valid_node(chart, margin,
                        [&](std::size_t f, const std::array<int, kMaxDim>&) {
                          double t = 0.0;
                          for (int i = 0; i < n; ++i)
                            for (int j = 0; j < n; ++j)
                              t += geo.ginv.at(f, i, j) * geo.hess_phi.at(f, i, j);
                          geo.lap_phi[f] = t;
                        });
    for_each_valid_node(chart, geo.normsq_dphi.margin(),
                        [&](std::size_t f, const std::array<int, kMaxDim>&) {
                          double t = 0.0;
                          for (int i = 0; i < n; ++i)
                            for (int j = 0; j < n; ++j)
                              t += geo.ginv.at(f, i, j) * geo.dphi.at(f, i) *
                                   geo.dphi.at(f, j);
                          geo.normsq_dphi[f] = t;
                        });
  }
  {
    const int margin =
        std::max(geo.lap_phi.margin(), geo.normsq_dphi.margin());
    geo.lapw_phi_phi = ScalarField(s.chart, margin);
    for_each_valid_node(chart, margin,
                        [&](std::size_t f, const std::array<int, kMaxDim>&) {
                          geo.lapw_phi_phi[f] =
                              geo.lap_phi[f] - geo.normsq_dphi[f];
                        });
  }
  {
    const int margin = std::max(
        {geo.rc.margin(), geo.hess_phi.margin(), geo.dphi.margin()});
    geo.rc_phi = Sym2Field(s.chart, margin);
    for_each_valid_node(chart, margin,
                        [&](std::size_t f, const std::array<int, kMaxDim>&) {
                          for (int i = 0; i < n; ++i)
                            for (int j = i; j < n; ++j)
                              geo.rc_phi.at(f, i, j) =
                                  geo.rc.at(f, i, j) + geo.hess_phi.at(f, i, j) -
                                  geo.dphi.at(f, i) * geo.dphi.at(f, j) / s.m;
                        });
  }
  {
    const int margin = std::max(
        {geo.r.margin(), geo.lap_phi.margin(), geo.normsq_dphi.margin()});
    geo.r_phi = ScalarField(s.chart, margin);
    const double c = (s.m + 1.0) / s.m;
    for_each_valid_node(chart, margin,
                        [&](std::size_t f, const std::array<int, kMaxDim>&) {
                          geo.r_phi[f] = geo.r[f] + 2.0 * geo.lap_phi[f] -
                                         c * geo.normsq_dphi[f];
                        });
  }
  return geo;
}

double metric_compatibility_defect(const SpaceGeometry& geo) {
  Ten3Field gg = covariant_derivative(geo.gamma, geo.space.g);
  const int n = geo.space.dim();
  return sup_over_valid(gg.chart(), gg.margin(), [&](std::size_t f) {
    double m = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k)
          m = std::max(m, std::fabs(gg.at(f, i, j, k)));
    return m;
  });
}

double first_bianchi_defect(const Riemann4Field& rm) {
  const Chart& chart = rm.chart();
  const int n = chart.dim();
  return sup_over_valid(chart, rm.margin(), [&](std::size_t f) {
    double m = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const double v = rm.get(f, i, j, k, l) + rm.get(f, i, k, l, j) +
                             rm.get(f, i, l, j, k);
            m = std::max(m, std::fabs(v));
          }
    return m;
  });
}

double commutator_anchor_defect(const SpaceGeometry& geo,
                                const ScalarField& f) {
  CurvatureSet cs =
      curvature(geo.space.g, geo.ginv, geo.gamma, /*want_rm=*/true);
  Sym2Field H = hessian(geo.gamma, f);
  Ten3Field T = covariant_derivative(geo.gamma, H);
  VecField gf = raise(geo.ginv, differential(f));
  const Chart& chart = f.chart();
  const int n = chart.dim();
  const int margin =
      std::max({T.margin(), cs.rm.margin(), gf.margin()});
  return sup_over_valid(chart, margin, [&](std::size_t nf) {
    double m = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double lhs = 0.0;
          for (int l = 0; l < n; ++l)
            lhs += cs.rm.get(nf, i, j, k, l) * gf.at(nf, l);
          const double rhs = T.at(nf, i, j, k) - T.at(nf, j, i, k);
          m = std::max(m, std::fabs(lhs - rhs));
        }
    return m;
  });
}

}  // namespace wcurv
