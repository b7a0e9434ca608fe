#include "wcurv/field.hpp"

#include <cmath>

namespace wcurv {

void require_same_chart(const detail::FieldBase& a,
                        const detail::FieldBase& b) {
  if (a.chart_ptr() == b.chart_ptr()) return;
  if (a.chart() == b.chart()) return;
  throw ChartError("fields live on different charts");
}

double sup_over_valid(const Chart& chart, int margin,
                      const std::function<double(std::size_t)>& selector) {
  double s = 0.0;
  for_each_valid_node(chart, margin,
                      [&](std::size_t f, const std::array<int, kMaxDim>&) {
                        const double v = std::fabs(selector(f));
                        if (v > s) s = v;
                      });
  return s;
}

namespace {
double sup_comps(const detail::FieldBase& f) {
  const int nc = f.ncomp();
  return sup_over_valid(f.chart(), f.margin(), [&](std::size_t node) {
    double m = 0.0;
    for (int c = 0; c < nc; ++c) {
      const double v = std::fabs(f.comp(node, c));
      if (v > m) m = v;
    }
    return m;
  });
}
}  // namespace

double sup_abs(const ScalarField& f) { return sup_comps(f); }
double sup_abs(const VecField& f) { return sup_comps(f); }
double sup_abs(const Sym2Field& f) { return sup_comps(f); }
double sup_abs(const Riemann4Field& f) { return sup_comps(f); }

}  // namespace wcurv
