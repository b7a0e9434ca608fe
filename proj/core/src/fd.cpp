#include "wcurv/fd.hpp"

#include <cmath>

#include "wcurv/parallel.hpp"

namespace wcurv {

const std::vector<double>& d1_stencil(int order) {
  static const std::vector<double> p2{-0.5, 0.0, 0.5};
  static const std::vector<double> p4{1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3,
                                      -1.0 / 12};
  static const std::vector<double> p6{-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0,
                                      3.0 / 4,   -3.0 / 20, 1.0 / 60};
  static const std::vector<double> p8{1.0 / 280, -4.0 / 105, 1.0 / 5,
                                      -4.0 / 5,  0.0,        4.0 / 5,
                                      -1.0 / 5,  4.0 / 105,  -1.0 / 280};
  switch (order) {
    case 2: return p2;
    case 4: return p4;
    case 6: return p6;
    case 8: return p8;
  }
  throw PreconditionError("unsupported stencil order " + std::to_string(order));
}

const std::vector<double>& d2_stencil(int order) {
  static const std::vector<double> p2{1.0, -2.0, 1.0};
  static const std::vector<double> p4{-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3,
                                      -1.0 / 12};
  static const std::vector<double> p6{1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18,
                                      3.0 / 2,  -3.0 / 20, 1.0 / 90};
  static const std::vector<double> p8{-1.0 / 560, 8.0 / 315, -1.0 / 5,
                                      8.0 / 5,    -205.0 / 72, 8.0 / 5,
                                      -1.0 / 5,   8.0 / 315,  -1.0 / 560};
  switch (order) {
    case 2: return p2;
    case 4: return p4;
    case 6: return p6;
    case 8: return p8;
  }
  throw PreconditionError("unsupported stencil order " + std::to_string(order));
}

namespace {

// Stencils are evaluated in paired form so every stencil annihilates
// constant fields exactly:
//   antisymmetric (d/dx):   sum_k c_k (f_{+k} - f_{-k})
//   symmetric (d^2/dx^2):   sum_k c_k ((f_{+k} - f_0) + (f_{-k} - f_0))
template <typename FieldT>
FieldT apply_stencil(const FieldT& in, int axis,
                     const std::vector<double>& coeffs, double inv_h_pow,
                     bool antisymmetric) {
  const Chart& chart = in.chart();
  if (axis < 0 || axis >= chart.dim())
    throw PreconditionError("derivative axis " + std::to_string(axis) +
                            " out of range for dimension " +
                            std::to_string(chart.dim()));
  const int hw = static_cast<int>(coeffs.size()) / 2;
  const bool wrap = chart.periodic(axis);
  const int out_margin = in.margin() + (wrap ? 0 : hw);

  FieldT out = in;  // copies chart, shape; values overwritten below
  out.set_margin(out_margin);

  const int ncomp = in.ncomp();
  const int nax = chart.size(axis);
  const std::ptrdiff_t stride =
      static_cast<std::ptrdiff_t>(chart.stride(axis)) * ncomp;
  const double* src = in.data();
  double* dst = out.data();

  parallel_for(chart.node_count(), [&](std::size_t begin, std::size_t end) {
    std::array<int, kMaxDim> idx{};
    chart.unflat(begin, idx);
    for (std::size_t f = begin; f < end; ++f) {
      const std::size_t base = f * ncomp;
      if (chart.node_valid(idx, out_margin)) {
        const int j = idx[axis];
        auto shift = [&](int k) -> const double* {
          int jj = j + k;
          if (wrap) {
            if (jj < 0) jj += nax;
            else if (jj >= nax) jj -= nax;
          }
          return src + (static_cast<std::ptrdiff_t>(base) +
                        static_cast<std::ptrdiff_t>(jj - j) * stride);
        };
        for (int c = 0; c < ncomp; ++c) dst[base + c] = 0.0;
        const double* mid = src + base;
        for (int k = 1; k <= hw; ++k) {
          const double w = coeffs[hw + k];
          const double* up = shift(k);
          const double* dn = shift(-k);
          if (antisymmetric) {
            for (int c = 0; c < ncomp; ++c)
              dst[base + c] += w * (up[c] - dn[c]);
          } else {
            for (int c = 0; c < ncomp; ++c)
              dst[base + c] += w * ((up[c] - mid[c]) + (dn[c] - mid[c]));
          }
        }
        for (int c = 0; c < ncomp; ++c) dst[base + c] *= inv_h_pow;
      } else {
        for (int c = 0; c < ncomp; ++c) dst[base + c] = 0.0;
      }
      for (int a = chart.dim() - 1; a >= 0; --a) {
        if (++idx[a] < chart.size(a)) break;
        idx[a] = 0;
      }
    }
  });
  return out;
}

template <typename FieldT>
FieldT d1(const FieldT& f, int axis) {
  const double h = f.chart().spacing(axis);
  return apply_stencil(f, axis, d1_stencil(f.chart().order()), 1.0 / h,
                       /*antisymmetric=*/true);
}

template <typename FieldT>
FieldT d2(const FieldT& f, int axis) {
  const double h = f.chart().spacing(axis);
  return apply_stencil(f, axis, d2_stencil(f.chart().order()), 1.0 / (h * h),
                       /*antisymmetric=*/false);
}

}  // namespace

ScalarField partial(const ScalarField& f, int axis) { return d1(f, axis); }
VecField partial(const VecField& f, int axis) { return d1(f, axis); }
Sym2Field partial(const Sym2Field& f, int axis) { return d1(f, axis); }
Ten3Field partial(const Ten3Field& f, int axis) { return d1(f, axis); }
Ten2Field partial(const Ten2Field& f, int axis) { return d1(f, axis); }

ScalarField partial2(const ScalarField& f, int axis) { return d2(f, axis); }
Sym2Field partial2(const Sym2Field& f, int axis) { return d2(f, axis); }

}  // namespace wcurv
