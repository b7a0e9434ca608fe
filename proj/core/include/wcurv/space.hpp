#ifndef WCURV_SPACE_HPP
#define WCURV_SPACE_HPP

#include "wcurv/field.hpp"

namespace wcurv {

// The tuple (chart, g, phi, m): a metric-measure structure sampled on a
// grid. m is the positive finite dimensional parameter; g may be of any
// nondegenerate signature.
struct MetricMeasureSpace {
  ChartPtr chart;
  Sym2Field g;
  ScalarField phi;
  double m = 1.0;

  MetricMeasureSpace() = default;
  MetricMeasureSpace(ChartPtr chart_, Sym2Field g_, ScalarField phi_,
                     double m_);

  int dim() const { return chart->dim(); }
};

// Flat chart with the identity metric and the given phi.
MetricMeasureSpace flat_space(ChartPtr chart, ScalarField phi, double m);
MetricMeasureSpace flat_space(ChartPtr chart, double m);

}  // namespace wcurv

#endif
