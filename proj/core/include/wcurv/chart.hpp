#ifndef WCURV_CHART_HPP
#define WCURV_CHART_HPP

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "wcurv/errors.hpp"

namespace wcurv {

inline constexpr int kMaxDim = 6;

// A structured coordinate grid. Every axis is either periodic (nodes at
// j*L/N, wrap-around stencils) or open (nodes at j*L/(N-1) including both
// endpoints, derivatives valid only away from the faces). A chart whose
// axes are all periodic is a torus; all open, a box. Mixed charts arise
// from products (base x fiber, base x time).
class Chart {
public:
  Chart(std::vector<int> sizes, std::vector<double> extents,
        std::vector<bool> periodic, int order = 4);

  static Chart torus(std::vector<int> sizes, std::vector<double> extents,
                     int order = 4);
  static Chart box(std::vector<int> sizes, std::vector<double> extents,
                   int order = 4);

  int dim() const { return n_; }
  int order() const { return order_; }
  int size(int axis) const { return sizes_[axis]; }
  double extent(int axis) const { return extents_[axis]; }
  bool periodic(int axis) const { return periodic_[axis]; }
  bool all_periodic() const;
  bool any_open() const { return !all_periodic(); }

  // "torus", "box" or "mixed".
  std::string kind() const;

  double spacing(int axis) const {
    return periodic_[axis] ? extents_[axis] / sizes_[axis]
                           : extents_[axis] / (sizes_[axis] - 1);
  }
  double coord(int axis, int idx) const { return idx * spacing(axis); }

  std::size_t node_count() const { return node_count_; }
  std::size_t stride(int axis) const { return strides_[axis]; }

  // Row-major flat index, axis 0 slowest.
  std::size_t flat(const std::array<int, kMaxDim>& idx) const {
    std::size_t f = 0;
    for (int a = 0; a < n_; ++a) f += idx[a] * strides_[a];
    return f;
  }
  void unflat(std::size_t f, std::array<int, kMaxDim>& idx) const {
    for (int a = 0; a < n_; ++a) {
      idx[a] = static_cast<int>(f / strides_[a]);
      f %= strides_[a];
    }
  }
  void coords(std::size_t f, std::array<double, kMaxDim>& x) const {
    std::array<int, kMaxDim> idx{};
    unflat(f, idx);
    for (int a = 0; a < n_; ++a) x[a] = coord(a, idx[a]);
  }

  // True when every open-axis index lies in [margin, N - margin).
  bool node_valid(const std::array<int, kMaxDim>& idx, int margin) const {
    for (int a = 0; a < n_; ++a) {
      if (periodic_[a]) continue;
      if (idx[a] < margin || idx[a] >= sizes_[a] - margin) return false;
    }
    return true;
  }

  // Throws MarginError if a field with this margin has no valid nodes.
  void require_margin_feasible(int margin, const char* what) const;

  // Product chart: the axes of `this` followed by the axes of `tail`.
  Chart product(const Chart& tail) const;

  bool operator==(const Chart& other) const;
  bool operator!=(const Chart& other) const { return !(*this == other); }

private:
  int n_ = 0;
  int order_ = 4;
  std::array<int, kMaxDim> sizes_{};
  std::array<double, kMaxDim> extents_{};
  std::array<bool, kMaxDim> periodic_{};
  std::array<std::size_t, kMaxDim> strides_{};
  std::size_t node_count_ = 0;
};

using ChartPtr = std::shared_ptr<const Chart>;

inline ChartPtr make_chart(Chart c) {
  return std::make_shared<const Chart>(std::move(c));
}

// Visits every node in row-major order (axis 0 slowest): fn(flat, idx).
template <typename Fn>
void for_each_node(const Chart& chart, Fn&& fn) {
  std::array<int, kMaxDim> idx{};
  const std::size_t total = chart.node_count();
  for (std::size_t f = 0; f < total; ++f) {
    fn(f, idx);
    for (int a = chart.dim() - 1; a >= 0; --a) {
      if (++idx[a] < chart.size(a)) break;
      idx[a] = 0;
    }
  }
}

// Visits only nodes valid at the given margin, in row-major order.
template <typename Fn>
void for_each_valid_node(const Chart& chart, int margin, Fn&& fn) {
  for_each_node(chart, [&](std::size_t f, const std::array<int, kMaxDim>& idx) {
    if (chart.node_valid(idx, margin)) fn(f, idx);
  });
}

}  // namespace wcurv

#endif
