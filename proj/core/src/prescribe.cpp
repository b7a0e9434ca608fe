#include "wcurv/prescribe.hpp"

#include <cmath>
#include <cstdio>

#include "wcurv/linearize.hpp"

namespace wcurv {

MetricMeasureSpace scale_space(const MetricMeasureSpace& s, double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw PreconditionError("scale_space needs c > 0");
  Sym2Field g = s.g;
  const double inv = 1.0 / c;
  for (std::size_t i = 0; i < g.value_count(); ++i) g.data()[i] *= inv;
  return MetricMeasureSpace(s.chart, std::move(g), s.phi, s.m);
}

namespace {

// smallest eigenvalue of a symmetric n x n via cyclic Jacobi
double sym_min_eigenvalue(double* a, int n) {
  for (int sweep = 0; sweep < 32; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (off < 1e-26) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double cth = 1.0 / std::sqrt(t * t + 1.0);
        const double sth = t * cth;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = cth * akp - sth * akq;
          a[k * n + q] = sth * akp + cth * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = cth * apk - sth * aqk;
          a[q * n + k] = sth * apk + cth * aqk;
        }
      }
  }
  double mn = a[0];
  for (int i = 1; i < n; ++i) mn = std::min(mn, a[i * n + i]);
  return mn;
}

// smallest per-node eigenvalue of g over the whole grid
double metric_floor_violation(const Sym2Field& g) {
  const Chart& chart = g.chart();
  const int n = chart.dim();
  double worst = std::numeric_limits<double>::infinity();
  double a[kMaxDim * kMaxDim];
  for_each_valid_node(chart, g.margin(),
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        for (int i = 0; i < n; ++i)
                          for (int j = 0; j < n; ++j)
                            a[i * n + j] = g.at(f, i, j);
                        worst = std::min(worst, sym_min_eigenvalue(a, n));
                      });
  return worst;
}

struct SpaceBuild {
  MetricMeasureSpace space;
  bool positive = false;
};

SpaceBuild build_updated_space(const MetricMeasureSpace& base,
                               const SpaceGeometry& geo0,
                               const ScalarField& u, double floor) {
  AdjointImage img = DR_star(geo0, u);
  Sym2Field g = base.g;
  ScalarField phi = base.phi;
  for (std::size_t i = 0; i < g.value_count(); ++i)
    g.data()[i] += img.T.data()[i];
  for (std::size_t i = 0; i < phi.value_count(); ++i)
    phi.data()[i] += img.s.data()[i];
  SpaceBuild out{MetricMeasureSpace(base.chart, std::move(g), std::move(phi),
                                    base.m),
                 false};
  out.positive = metric_floor_violation(out.space.g) >= floor;
  return out;
}

double gram_norm(const std::vector<double>& gram,
                 const ScalarField& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < gram.size(); ++i) s += gram[i] * r[i] * r[i];
  return std::sqrt(s);
}

}  // namespace

PrescribeResult newton_prescribe(const MetricMeasureSpace& space0,
                                 const ScalarField& target,
                                 const NewtonOptions& opts) {
  if (!space0.chart->all_periodic())
    throw PreconditionError("prescription requires a closed (torus) chart");
  require_same_chart(space0.g, target);
  const std::size_t K = space0.chart->node_count();

  AssembledOperator A = assemble(space0, OperatorKind::dr_dr_star, opts.cap);
  GramEigenDecomposition eig = gram_eigendecompose(A);
  KernelResult kern = kernel_detect(A, eig, opts.kernel_tol);
  if (kern.dim > 0)
    throw SolverError(
        "kernel nonempty (dim " + std::to_string(kern.dim) +
        "): the base point is a weighted vacuum static space, the "
        "injectivity hypothesis fails");

  SpaceGeometry geo0 = SpaceGeometry::compute(space0);

  PrescribeResult res;
  res.u = ScalarField(space0.chart);
  ScalarField u_prev = res.u;

  // diagnostic: is there any c0 > 0 with c0 min(target) < R_phi0 < c0
  // max(target) everywhere; probed over a wide logarithmic grid
  {
    double tmin = target[0], tmax = target[0];
    double rmin = geo0.r_phi[0], rmax = geo0.r_phi[0];
    for (std::size_t i = 0; i < K; ++i) {
      tmin = std::min(tmin, target[i]);
      tmax = std::max(tmax, target[i]);
      rmin = std::min(rmin, geo0.r_phi[i]);
      rmax = std::max(rmax, geo0.r_phi[i]);
    }
    res.minmax_hypothesis = false;
    for (int e = -40; e <= 40 && !res.minmax_hypothesis; ++e) {
      const double c0 = std::ldexp(1.0, e);
      if (c0 * tmin < rmin && rmax < c0 * tmax) res.minmax_hypothesis = true;
    }
  }

  MetricMeasureSpace current = space0;
  const double lam_floor = opts.kernel_tol * std::fabs(eig.eigenvalues.back());

  for (int it = 0; it <= opts.max_iter; ++it) {
    ScalarField S_u = SpaceGeometry::compute(current).r_phi;
    ScalarField r(space0.chart);
    for (std::size_t i = 0; i < K; ++i) r[i] = target[i] - S_u[i];
    const double rnorm = gram_norm(A.gram, r);
    res.residual_trace.push_back(rnorm);
    res.iterations = it;
    if (rnorm <= opts.tol) {
      res.converged = true;
      break;
    }
    if (it == opts.max_iter) break;

    std::vector<double> rhs(K);
    for (std::size_t i = 0; i < K; ++i) rhs[i] = r[i];
    std::vector<double> delta = eig.solve(rhs, lam_floor);

    u_prev = res.u;
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= opts.max_halvings; ++halving) {
      ScalarField u_try = u_prev;
      for (std::size_t i = 0; i < K; ++i) u_try[i] += step * delta[i];
      SpaceBuild sb{MetricMeasureSpace(), false};
      bool built = false;
      try {
        sb = build_updated_space(space0, geo0, u_try, opts.metric_floor);
        built = sb.positive;
        if (built) {
          // the curvature evaluation must also succeed
          (void)SpaceGeometry::compute(sb.space).r_phi;
        }
      } catch (const SingularMetricError&) {
        built = false;
      }
      if (built) {
        res.u = std::move(u_try);
        current = std::move(sb.space);
        accepted = true;
        if (halving > 0) res.halvings += halving;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.message =
          "metric lost positivity and the step halvings did not recover it";
      break;
    }
  }

  res.space = std::move(current);
  res.applied_c = 1.0;
  // recompute the residual independently
  ScalarField final_r = SpaceGeometry::compute(res.space).r_phi;
  res.residual = ScalarField(space0.chart);
  for (std::size_t i = 0; i < K; ++i) res.residual[i] = final_r[i] - target[i];
  res.residual_l2 = gram_norm(A.gram, res.residual);
  if (!res.converged) {
    char buf[120];
    std::snprintf(buf, sizeof buf,
                  "no convergence within %d iterations (residual %.3e)",
                  opts.max_iter, res.residual_l2);
    res.message = buf;
  }
  return res;
}

PrescribeResult prescribe_with_scaling(const MetricMeasureSpace& space0,
                                       const ScalarField& K,
                                       const std::vector<double>& c_grid,
                                       const NewtonOptions& opts) {
  require_same_chart(space0.g, K);
  const std::size_t nodes = space0.chart->node_count();
  PrescribeResult out;
  std::vector<ScalingAttempt> attempts;
  for (double c : c_grid) {
    if (!(c > 0.0)) throw PreconditionError("c grid entries must be positive");
    ScalarField target(space0.chart);
    for (std::size_t i = 0; i < nodes; ++i) target[i] = K[i] / c;
    NewtonOptions inner = opts;
    inner.tol = opts.tol / (2.0 * c);
    PrescribeResult r = newton_prescribe(space0, target, inner);
    ScalingAttempt att;
    att.c = c;
    att.converged = r.converged;
    att.iterations = r.iterations;
    att.final_residual = r.residual_l2;
    att.residual_trace = r.residual_trace;
    attempts.push_back(att);
    if (r.converged) {
      out = std::move(r);
      out.attempts = std::move(attempts);
      out.applied_c = c;
      out.space = scale_space(out.space, c);
      // recompute against K on the unscaled space
      SpaceGeometry geo = SpaceGeometry::compute(out.space);
      out.residual = ScalarField(space0.chart);
      for (std::size_t i = 0; i < nodes; ++i)
        out.residual[i] = geo.r_phi[i] - K[i];
      out.residual_l2 = l2_phi_norm(geo, out.residual);
      return out;
    }
  }
  out.attempts = std::move(attempts);
  out.converged = false;
  out.message = "every c in the grid failed; see the attempt traces";
  out.space = space0;
  out.u = ScalarField(space0.chart);
  out.residual = ScalarField(space0.chart);
  return out;
}

}  // namespace wcurv
