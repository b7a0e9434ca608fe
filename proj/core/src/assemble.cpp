#include "wcurv/assemble.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "wcurv/linearize.hpp"
#include "wcurv/parallel.hpp"

namespace wcurv {

namespace {

using RowMajorMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>;
using ConstRowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;

std::vector<double> scalar_gram(const SpaceGeometry& geo) {
  const Chart& chart = *geo.space.chart;
  double cell = 1.0;
  for (int a = 0; a < chart.dim(); ++a) cell *= chart.spacing(a);
  const std::size_t total = chart.node_count();
  std::vector<double> g(total);
  for (std::size_t i = 0; i < total; ++i)
    g[i] = std::exp(-geo.space.phi[i]) * geo.sqrt_abs_det[i] * cell;
  return g;
}

// Per-node pair-metric block: the (S+1)x(S+1) matrix of the inner product
// <T, h>_g + s psi in upper-triangle coordinates, times the Gram weight.
void pair_block(const SpaceGeometry& geo, std::size_t node, double weight,
                double* block, int S, int n) {
  const int dim = S + 1;
  for (int c = 0; c < S; ++c) {
    // orbit of c: the ordered index pairs collapsing to it
    int ci = 0, cj = 0, found = 0;
    for (int i = 0; i < n && !found; ++i)
      for (int j = i; j < n && !found; ++j)
        if (sym_index(n, i, j) == c) { ci = i; cj = j; found = 1; }
    for (int d = c; d < S; ++d) {
      int di = 0, dj = 0;
      found = 0;
      for (int i = 0; i < n && !found; ++i)
        for (int j = i; j < n && !found; ++j)
          if (sym_index(n, i, j) == d) { di = i; dj = j; found = 1; }
      double v = 0.0;
      const int reps_c[2][2] = {{ci, cj}, {cj, ci}};
      const int reps_d[2][2] = {{di, dj}, {dj, di}};
      const int nc = ci == cj ? 1 : 2;
      const int nd = di == dj ? 1 : 2;
      for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nd; ++b)
          v += geo.ginv.at(node, reps_c[a][0], reps_d[b][0]) *
               geo.ginv.at(node, reps_c[a][1], reps_d[b][1]);
      block[c * dim + d] = weight * v;
      block[d * dim + c] = weight * v;
    }
  }
  for (int c = 0; c < S; ++c) {
    block[c * dim + S] = 0.0;
    block[S * dim + c] = 0.0;
  }
  block[S * dim + S] = weight;
}

}  // namespace

std::vector<double> AssembledOperator::apply(
    const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != domain_dim)
    throw PreconditionError("apply: size mismatch");
  std::vector<double> y(codomain_dim, 0.0);
  for (int r = 0; r < codomain_dim; ++r) {
    const double* row = matrix.data() + static_cast<std::size_t>(r) * domain_dim;
    double s = 0.0;
    for (int c = 0; c < domain_dim; ++c) s += row[c] * x[c];
    y[r] = s;
  }
  return y;
}

double AssembledOperator::gram_symmetry_defect() const {
  if (domain_dim != codomain_dim) return -1.0;
  const int K = domain_dim;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) {
      const double a = matrix[static_cast<std::size_t>(i) * K + j];
      const double adj =
          matrix[static_cast<std::size_t>(j) * K + i] * gram[j] / gram[i];
      num += (a - adj) * (a - adj);
      den += a * a;
    }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

AssembledOperator assemble(const MetricMeasureSpace& space, OperatorKind kind,
                           int cap) {
  const Chart& chart = *space.chart;
  if (!chart.all_periodic())
    throw PreconditionError("assemble requires a closed (torus) chart");
  const std::size_t K = chart.node_count();
  if (K > static_cast<std::size_t>(cap))
    throw PreconditionError("unknown count " + std::to_string(K) +
                            " exceeds the cap " + std::to_string(cap));
  SpaceGeometry geo = SpaceGeometry::compute(space);
  const int n = chart.dim();
  const int S = sym_count(n);

  AssembledOperator op;
  op.kind = kind;
  op.chart = space.chart;
  op.gram = scalar_gram(geo);
  op.domain_dim = static_cast<int>(K);

  if (kind == OperatorKind::minus_laplacian_phi) {
    op.codomain_dim = static_cast<int>(K);
    op.matrix.assign(K * K, 0.0);
    parallel_for(K, [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) {
        ScalarField e(space.chart);
        e[j] = 1.0;
        ScalarField col = laplacian_phi(geo, e);
        for (std::size_t i = 0; i < K; ++i)
          op.matrix[i * K + j] = -col[i];
      }
    });
    // explicit Gram symmetrization A <- (A + G^-1 A^T G)/2; constants stay
    // an exact null vector because A * 1 = 0 row-wise already
    std::vector<double> sym(K * K);
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j)
        sym[i * K + j] = 0.5 * (op.matrix[i * K + j] +
                                op.matrix[j * K + i] * op.gram[j] / op.gram[i]);
    op.matrix.swap(sym);
    return op;
  }

  // assemble B = DR*
  const std::size_t rows = K * static_cast<std::size_t>(S + 1);
  std::vector<double> B(rows * K, 0.0);
  parallel_for(K, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      ScalarField e(space.chart);
      e[j] = 1.0;
      AdjointImage img = DR_star(geo, e);
      for (std::size_t p = 0; p < K; ++p) {
        const std::size_t base = p * (S + 1);
        for (int c = 0; c < S; ++c)
          B[(base + c) * K + j] = img.T.comp(p, c);
        B[(base + S) * K + j] = img.s[p];
      }
    }
  });

  if (kind == OperatorKind::dr_star) {
    op.codomain_dim = static_cast<int>(rows);
    op.matrix.swap(B);
    op.codomain_blocks.assign(K * (S + 1) * (S + 1), 0.0);
    for (std::size_t p = 0; p < K; ++p)
      pair_block(geo, p, op.gram[p],
                 op.codomain_blocks.data() + p * (S + 1) * (S + 1), S, n);
    return op;
  }

  // dr_dr_star = B-dagger B = G^-1 B^T W B
  std::vector<double> WB(rows * K);
  {
    std::vector<double> block((S + 1) * (S + 1));
    for (std::size_t p = 0; p < K; ++p) {
      pair_block(geo, p, op.gram[p], block.data(), S, n);
      const std::size_t base = p * (S + 1);
      for (int r = 0; r < S + 1; ++r) {
        double* out_row = WB.data() + (base + r) * K;
        for (std::size_t c = 0; c < K; ++c) out_row[c] = 0.0;
        for (int q = 0; q < S + 1; ++q) {
          const double w = block[r * (S + 1) + q];
          if (w == 0.0) continue;
          const double* in_row = B.data() + (base + q) * K;
          for (std::size_t c = 0; c < K; ++c) out_row[c] += w * in_row[c];
        }
      }
    }
  }
  op.codomain_dim = static_cast<int>(K);
  op.matrix.assign(K * K, 0.0);
  {
    // A = B^T (W B), the output columns split across workers
    const int workers = std::max(1, std::min<int>(thread_count(), 4));
    std::vector<std::thread> pool;
    const std::size_t chunk = (K + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t c0 = std::min(K, w * chunk);
      const std::size_t c1 = std::min(K, c0 + chunk);
      if (c0 >= c1) break;
      pool.emplace_back([&, c0, c1] {
        ConstRowMajorMap Bm(B.data(), static_cast<Eigen::Index>(rows),
                            static_cast<Eigen::Index>(K));
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>, 0,
                   Eigen::OuterStride<>>
            WBm(WB.data() + c0, static_cast<Eigen::Index>(rows),
                static_cast<Eigen::Index>(c1 - c0),
                Eigen::OuterStride<>(static_cast<Eigen::Index>(K)));
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>, 0, Eigen::OuterStride<>>
            Am(op.matrix.data() + c0, static_cast<Eigen::Index>(K),
               static_cast<Eigen::Index>(c1 - c0),
               Eigen::OuterStride<>(static_cast<Eigen::Index>(K)));
        Am.noalias() = Bm.transpose() * WBm;
      });
    }
    for (auto& t : pool) t.join();
  }
  // exact Gram symmetry of G A: enforce bitwise symmetry of B^T W B, then
  // scale rows by G^-1
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = i + 1; j < K; ++j) {
      const double v = 0.5 * (op.matrix[i * K + j] + op.matrix[j * K + i]);
      op.matrix[i * K + j] = v;
      op.matrix[j * K + i] = v;
    }
  for (std::size_t i = 0; i < K; ++i) {
    const double inv = 1.0 / op.gram[i];
    for (std::size_t j = 0; j < K; ++j) op.matrix[i * K + j] *= inv;
  }
  return op;
}

GramEigenDecomposition gram_eigendecompose(const AssembledOperator& op) {
  if (op.domain_dim != op.codomain_dim)
    throw PreconditionError("eigendecomposition needs a square operator");
  const int K = op.domain_dim;

  // similarity transform to a plain symmetric problem:
  // S = G^{1/2} A G^{-1/2}
  Eigen::MatrixXd Sm(K, K);
  for (int i = 0; i < K; ++i) {
    const double si = std::sqrt(op.gram[i]);
    for (int j = 0; j < K; ++j)
      Sm(i, j) = si * op.matrix[static_cast<std::size_t>(i) * K + j] /
                 std::sqrt(op.gram[j]);
  }
  Sm = 0.5 * (Sm + Sm.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sm);
  if (es.info() != Eigen::Success)
    throw SolverError("symmetric eigensolver failed");

  GramEigenDecomposition out;
  out.K = K;
  out.gram = op.gram;
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + K);
  out.vectors.resize(static_cast<std::size_t>(K) * K);
  for (int i = 0; i < K; ++i) {
    const double inv_s = 1.0 / std::sqrt(op.gram[i]);
    for (int c = 0; c < K; ++c)
      out.vectors[static_cast<std::size_t>(i) * K + c] =
          es.eigenvectors()(i, c) * inv_s;
  }
  return out;
}

std::vector<double> GramEigenDecomposition::solve(
    const std::vector<double>& b, double eigenvalue_floor) const {
  if (static_cast<int>(b.size()) != K)
    throw PreconditionError("solve: size mismatch");
  std::vector<double> coeff(K, 0.0);
  for (int c = 0; c < K; ++c) {
    if (std::fabs(eigenvalues[c]) <= eigenvalue_floor) continue;
    double dot = 0.0;
    for (int r = 0; r < K; ++r)
      dot += vectors[static_cast<std::size_t>(r) * K + c] * gram[r] * b[r];
    coeff[c] = dot / eigenvalues[c];
  }
  std::vector<double> x(K, 0.0);
  for (int r = 0; r < K; ++r) {
    double s = 0.0;
    const double* row = vectors.data() + static_cast<std::size_t>(r) * K;
    for (int c = 0; c < K; ++c) s += row[c] * coeff[c];
    x[r] = s;
  }
  return x;
}

std::vector<double> gram_eigenvalues(const AssembledOperator& op) {
  if (op.domain_dim != op.codomain_dim)
    throw PreconditionError("eigenvalues need a square operator");
  const int K = op.domain_dim;
  Eigen::MatrixXd Sm(K, K);
  for (int i = 0; i < K; ++i) {
    const double si = std::sqrt(op.gram[i]);
    for (int j = 0; j < K; ++j)
      Sm(i, j) = si * op.matrix[static_cast<std::size_t>(i) * K + j] /
                 std::sqrt(op.gram[j]);
  }
  Sm = 0.5 * (Sm + Sm.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sm,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw SolverError("symmetric eigensolver failed");
  return std::vector<double>(es.eigenvalues().data(),
                             es.eigenvalues().data() + K);
}

KernelResult kernel_detect(const AssembledOperator& op, double tol) {
  return kernel_detect(op, gram_eigendecompose(op), tol);
}

KernelResult kernel_detect(const AssembledOperator& op,
                           const GramEigenDecomposition& eig, double tol) {
  const int K = eig.K;
  KernelResult out;
  out.eigenvalues = eig.eigenvalues;
  const double lmax = std::max(std::fabs(out.eigenvalues.front()),
                               std::fabs(out.eigenvalues.back()));
  const double cut = tol * lmax;
  for (int i = 0; i < K; ++i) {
    if (std::fabs(out.eigenvalues[i]) <= cut) {
      ScalarField v(op.chart);
      for (int r = 0; r < K; ++r)
        v[r] = eig.vectors[static_cast<std::size_t>(r) * K + i];
      out.basis.push_back(std::move(v));
      ++out.dim;
    }
  }
  return out;
}

SpectralMarginReport static_spectral_margin(const MetricMeasureSpace& space,
                                            int head, int cap,
                                            double const_tol,
                                            double margin_tol) {
  SpectralMarginReport rep;
  SpaceGeometry geo = SpaceGeometry::compute(space);
  const Chart& chart = *space.chart;
  const int n = chart.dim();
  const double m = space.m;

  // weighted mean and sup-variation of R_phi
  {
    double cell = 1.0;
    for (int a = 0; a < n; ++a) cell *= chart.spacing(a);
    double mass = 0.0, mean = 0.0;
    const std::size_t total = chart.node_count();
    for (std::size_t i = 0; i < total; ++i) {
      const double w = std::exp(-space.phi[i]) * geo.sqrt_abs_det[i] * cell;
      mass += w;
      mean += w * geo.r_phi[i];
    }
    rep.r_phi_mean = mean / mass;
    double var = 0.0;
    for (std::size_t i = 0; i < total; ++i)
      var = std::max(var, std::fabs(geo.r_phi[i] - rep.r_phi_mean));
    rep.r_phi_variation = var;
    rep.r_constant = var <= const_tol * (1.0 + std::fabs(rep.r_phi_mean));
  }
  if (!rep.r_constant) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "weighted scalar curvature not constant (sup variation "
                  "%.3e): not static",
                  rep.r_phi_variation);
    rep.verdict = buf;
    return rep;
  }

  AssembledOperator lap =
      assemble(space, OperatorKind::minus_laplacian_phi, cap);
  std::vector<double> eigenvalues = gram_eigenvalues(lap);
  const int K = static_cast<int>(eigenvalues.size());
  const int take = std::min(head, K);
  rep.spectrum_head.assign(eigenvalues.begin(), eigenvalues.begin() + take);

  rep.margin = std::numeric_limits<double>::infinity();
  for (double lam : eigenvalues) {
    const double d = std::fabs(rep.r_phi_mean - lam * (n + m - 1.0));
    if (d < rep.margin) {
      rep.margin = d;
      rep.lambda_at_min = lam;
    }
  }
  rep.condition_i_holds =
      rep.margin > margin_tol * (1.0 + std::fabs(rep.r_phi_mean));
  rep.condition_ii_applies =
      std::fabs(rep.r_phi_mean) <= const_tol && sup_abs(geo.rc_phi) > 1e-6;

  const double lmax = std::max(std::fabs(eigenvalues.front()),
                               std::fabs(eigenvalues.back()));
  double lam_snap = rep.lambda_at_min;
  if (std::fabs(lam_snap) <= 1e-9 * std::max(1.0, lmax)) lam_snap = 0.0;

  char buf[200];
  if (rep.condition_i_holds) {
    std::snprintf(buf, sizeof buf, "condition (i) holds (margin %.6g)",
                  rep.margin);
  } else if (rep.condition_ii_applies) {
    std::snprintf(buf, sizeof buf,
                  "condition (i) fails at lambda = %.6g; condition (ii) "
                  "applies",
                  lam_snap);
  } else {
    std::snprintf(buf, sizeof buf,
                  "condition (i) fails at lambda = %.6g; condition (ii) not "
                  "applicable; possibly static",
                  lam_snap);
  }
  rep.verdict = buf;
  return rep;
}

}  // namespace wcurv
