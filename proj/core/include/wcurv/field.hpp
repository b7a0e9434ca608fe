#ifndef WCURV_FIELD_HPP
#define WCURV_FIELD_HPP

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "wcurv/chart.hpp"

namespace wcurv {

// Index of (i,j), i<=j, into upper-triangle storage of a symmetric n x n.
inline int sym_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}
inline int sym_count(int n) { return n * (n + 1) / 2; }

// Index of the antisymmetric pair (i,j), i<j, 0-based, among n(n-1)/2.
inline int pair_index(int n, int i, int j) {
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}
inline int pair_count(int n) { return n * (n - 1) / 2; }

namespace detail {

// Common storage for grid-sampled fields: `ncomp` doubles per node,
// interleaved ([node * ncomp + c]), plus the boundary-invalidity margin.
class FieldBase {
public:
  FieldBase() = default;
  FieldBase(ChartPtr chart, int ncomp, int margin)
      : chart_(std::move(chart)), ncomp_(ncomp), margin_(margin),
        v_(chart_->node_count() * static_cast<std::size_t>(ncomp), 0.0) {
    chart_->require_margin_feasible(margin_, "field");
  }

  const Chart& chart() const { return *chart_; }
  const ChartPtr& chart_ptr() const { return chart_; }
  int ncomp() const { return ncomp_; }
  int margin() const { return margin_; }
  void set_margin(int m) {
    chart_->require_margin_feasible(m, "field");
    margin_ = m;
  }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::size_t value_count() const { return v_.size(); }

  double comp(std::size_t node, int c) const { return v_[node * ncomp_ + c]; }
  double& comp(std::size_t node, int c) { return v_[node * ncomp_ + c]; }

  explicit operator bool() const { return static_cast<bool>(chart_); }

protected:
  ChartPtr chart_;
  int ncomp_ = 0;
  int margin_ = 0;
  std::vector<double> v_;
};

}  // namespace detail

class ScalarField : public detail::FieldBase {
public:
  ScalarField() = default;
  explicit ScalarField(const ChartPtr& chart, int margin = 0)
      : FieldBase(chart, 1, margin) {}

  double operator[](std::size_t node) const { return v_[node]; }
  double& operator[](std::size_t node) { return v_[node]; }
};

// Rank-1 field; `covariant` distinguishes one-forms from vectors.
class VecField : public detail::FieldBase {
public:
  VecField() = default;
  VecField(const ChartPtr& chart, bool covariant, int margin = 0)
      : FieldBase(chart, chart->dim(), margin), covariant_(covariant) {}

  bool covariant() const { return covariant_; }
  double at(std::size_t node, int i) const { return comp(node, i); }
  double& at(std::size_t node, int i) { return comp(node, i); }

private:
  bool covariant_ = true;
};

// Symmetric (0,2) field; only the upper triangle is stored.
class Sym2Field : public detail::FieldBase {
public:
  Sym2Field() = default;
  explicit Sym2Field(const ChartPtr& chart, int margin = 0)
      : FieldBase(chart, sym_count(chart->dim()), margin) {}

  double at(std::size_t node, int i, int j) const {
    return comp(node, sym_index(chart_->dim(), i, j));
  }
  double& at(std::size_t node, int i, int j) {
    return comp(node, sym_index(chart_->dim(), i, j));
  }
};

// (0,4) field with the algebraic curvature symmetries
//   R_ijkl = -R_jikl = -R_ijlk = R_klij.
// Storage: antisymmetric pairs a = (i<j), b = (k<l), upper triangle a<=b.
class Riemann4Field : public detail::FieldBase {
public:
  Riemann4Field() = default;
  explicit Riemann4Field(const ChartPtr& chart, int margin = 0)
      : FieldBase(chart, storage_count(chart->dim()), margin),
        pairs_(pair_count(chart->dim())) {}

  static int storage_count(int n) {
    const int p = pair_count(n);
    return p > 0 ? p * (p + 1) / 2 : 1;  // keep at least one slot for n = 1
  }

  int pair_dim() const { return pairs_; }

  // Canonical slot for pair indices a <= b.
  int slot(int a, int b) const {
    if (a > b) std::swap(a, b);
    return a * pairs_ - a * (a - 1) / 2 + (b - a);
  }

  double get(std::size_t node, int i, int j, int k, int l) const {
    if (i == j || k == l) return 0.0;
    double sign = 1.0;
    if (i > j) { std::swap(i, j); sign = -sign; }
    if (k > l) { std::swap(k, l); sign = -sign; }
    const int n = chart_->dim();
    return sign * comp(node, slot(pair_index(n, i, j), pair_index(n, k, l)));
  }

  // Writes the canonical component for pairs a <= b.
  void set_canonical(std::size_t node, int a, int b, double value) {
    comp(node, slot(a, b)) = value;
  }
  double get_canonical(std::size_t node, int a, int b) const {
    return comp(node, slot(a, b));
  }

private:
  int pairs_ = 0;
};

// Rank-3 field T_{i,jk} symmetric in (j,k): Christoffels (upper index i)
// and covariant derivatives of symmetric 2-tensors both live here.
class Ten3Field : public detail::FieldBase {
public:
  Ten3Field() = default;
  explicit Ten3Field(const ChartPtr& chart, int margin = 0)
      : FieldBase(chart, chart->dim() * sym_count(chart->dim()), margin) {}

  double at(std::size_t node, int i, int j, int k) const {
    const int n = chart_->dim();
    return comp(node, i * sym_count(n) + sym_index(n, j, k));
  }
  double& at(std::size_t node, int i, int j, int k) {
    const int n = chart_->dim();
    return comp(node, i * sym_count(n) + sym_index(n, j, k));
  }
};

// Full rank-2 field with no symmetry (e.g. the covariant derivative of a
// one-form before symmetrization).
class Ten2Field : public detail::FieldBase {
public:
  Ten2Field() = default;
  explicit Ten2Field(const ChartPtr& chart, int margin = 0)
      : FieldBase(chart, chart->dim() * chart->dim(), margin) {}

  double at(std::size_t node, int i, int j) const {
    return comp(node, i * chart_->dim() + j);
  }
  double& at(std::size_t node, int i, int j) {
    return comp(node, i * chart_->dim() + j);
  }
};

void require_same_chart(const detail::FieldBase& a,
                        const detail::FieldBase& b);

// Sup of |selector(node)| over the valid region of `margin`.
double sup_over_valid(const Chart& chart, int margin,
                      const std::function<double(std::size_t)>& selector);

double sup_abs(const ScalarField& f);
double sup_abs(const VecField& f);
double sup_abs(const Sym2Field& f);
double sup_abs(const Riemann4Field& f);

}  // namespace wcurv

#endif
