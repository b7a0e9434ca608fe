#ifndef WCURV_CSV_HPP
#define WCURV_CSV_HPP

#include <string>
#include <vector>

#include "wcurv/field.hpp"

namespace wcurv {

// Field dumps: header row of coordinate names plus one column per
// component; rows in row-major node order, axis 0 slowest.
void write_field_csv(const detail::FieldBase& f,
                     const std::vector<std::string>& comp_names,
                     const std::string& path);

void write_scalar_csv(const ScalarField& f, const std::string& name,
                      const std::string& path);
void write_sym2_csv(const Sym2Field& f, const std::string& name,
                    const std::string& path);

// Loads a scalar field dumped by write_scalar_csv (or produced elsewhere
// in the same layout); validates the node count against the chart.
ScalarField read_scalar_csv(const ChartPtr& chart, const std::string& path);

}  // namespace wcurv

#endif
