#ifndef WCURV_FD_HPP
#define WCURV_FD_HPP

#include "wcurv/field.hpp"

namespace wcurv {

// Central first-derivative stencil coefficients c_{-hw..hw} (unit spacing)
// for accuracy order p in {2,4,6,8}; halfwidth hw = p/2. Exact on
// polynomials of degree <= p.
const std::vector<double>& d1_stencil(int order);
// Central second-derivative stencil, same accuracy order and halfwidth.
const std::vector<double>& d2_stencil(int order);

// d/dx_axis by the chart's order-p central stencil. Periodic axes wrap;
// open axes grow the validity margin by p/2.
ScalarField partial(const ScalarField& f, int axis);
VecField partial(const VecField& f, int axis);
Sym2Field partial(const Sym2Field& f, int axis);
Ten3Field partial(const Ten3Field& f, int axis);
Ten2Field partial(const Ten2Field& f, int axis);

// Same-axis second derivative via the direct order-p stencil (a single
// application: margin grows by p/2 once). Mixed partials are composed
// first derivatives.
ScalarField partial2(const ScalarField& f, int axis);
Sym2Field partial2(const Sym2Field& f, int axis);

}  // namespace wcurv

#endif
