#include "wcurv/chart.hpp"

#include <cmath>

namespace wcurv {

Chart::Chart(std::vector<int> sizes, std::vector<double> extents,
             std::vector<bool> periodic, int order) {
  n_ = static_cast<int>(sizes.size());
  if (n_ < 1 || n_ > kMaxDim)
    throw ChartError("chart dimension must be in [1, " +
                     std::to_string(kMaxDim) + "], got " + std::to_string(n_));
  if (extents.size() != sizes.size() || periodic.size() != sizes.size())
    throw ChartError("sizes/extents/periodic length mismatch");
  if (order != 2 && order != 4 && order != 6 && order != 8)
    throw ChartError("stencil order must be one of 2, 4, 6, 8");
  order_ = order;
  for (int a = 0; a < n_; ++a) {
    if (sizes[a] < 8)
      throw ChartError("axis " + std::to_string(a) +
                       ": need at least 8 nodes, got " +
                       std::to_string(sizes[a]));
    if (!(extents[a] > 0.0) || !std::isfinite(extents[a]))
      throw ChartError("axis " + std::to_string(a) + ": extent must be > 0");
    sizes_[a] = sizes[a];
    extents_[a] = extents[a];
    periodic_[a] = periodic[a];
  }
  node_count_ = 1;
  for (int a = n_ - 1; a >= 0; --a) {
    strides_[a] = node_count_;
    node_count_ *= sizes_[a];
  }
}

Chart Chart::torus(std::vector<int> sizes, std::vector<double> extents,
                   int order) {
  const std::size_t n = sizes.size();
  return Chart(std::move(sizes), std::move(extents), std::vector<bool>(n, true),
               order);
}

Chart Chart::box(std::vector<int> sizes, std::vector<double> extents,
                 int order) {
  const std::size_t n = sizes.size();
  return Chart(std::move(sizes), std::move(extents),
               std::vector<bool>(n, false), order);
}

bool Chart::all_periodic() const {
  for (int a = 0; a < n_; ++a)
    if (!periodic_[a]) return false;
  return true;
}

std::string Chart::kind() const {
  bool any_p = false, any_o = false;
  for (int a = 0; a < n_; ++a) (periodic_[a] ? any_p : any_o) = true;
  if (any_p && any_o) return "mixed";
  return any_p ? "torus" : "box";
}

void Chart::require_margin_feasible(int margin, const char* what) const {
  for (int a = 0; a < n_; ++a) {
    if (periodic_[a]) continue;
    if (sizes_[a] - 2 * margin < 1)
      throw MarginError(std::string(what) + ": margin " +
                        std::to_string(margin) + " exhausts axis " +
                        std::to_string(a) + " (" + std::to_string(sizes_[a]) +
                        " nodes)");
  }
}

Chart Chart::product(const Chart& tail) const {
  std::vector<int> sizes;
  std::vector<double> extents;
  std::vector<bool> periodic;
  for (int a = 0; a < n_; ++a) {
    sizes.push_back(sizes_[a]);
    extents.push_back(extents_[a]);
    periodic.push_back(periodic_[a]);
  }
  for (int a = 0; a < tail.n_; ++a) {
    sizes.push_back(tail.sizes_[a]);
    extents.push_back(tail.extents_[a]);
    periodic.push_back(tail.periodic_[a]);
  }
  return Chart(std::move(sizes), std::move(extents), std::move(periodic),
               order_);
}

bool Chart::operator==(const Chart& other) const {
  if (n_ != other.n_ || order_ != other.order_) return false;
  for (int a = 0; a < n_; ++a) {
    if (sizes_[a] != other.sizes_[a] || periodic_[a] != other.periodic_[a] ||
        extents_[a] != other.extents_[a])
      return false;
  }
  return true;
}

}  // namespace wcurv
