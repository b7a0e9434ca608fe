#include "wcurv/random_fields.hpp"

#include <cmath>

namespace wcurv {

TrigFieldGenerator::TrigFieldGenerator(std::uint64_t seed, int max_freq,
                                       double amplitude)
    : rng_(seed), max_freq_(max_freq), amplitude_(amplitude) {}

double TrigFieldGenerator::uniform(double lo, double hi) {
  const double u = (rng_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

int TrigFieldGenerator::uniform_int(int lo, int hi) {
  // rejection-free and deterministic; bias is irrelevant here
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng_() % span);
}

std::vector<TrigFieldGenerator::Mode> TrigFieldGenerator::draw_modes(
    int n, int count) {
  std::vector<Mode> modes;
  modes.reserve(count);
  for (int c = 0; c < count; ++c) {
    Mode m;
    m.freq.resize(n);
    int norm2 = 0;
    do {
      norm2 = 0;
      for (int a = 0; a < n; ++a) {
        m.freq[a] = uniform_int(-max_freq_, max_freq_);
        norm2 += m.freq[a] * m.freq[a];
      }
    } while (norm2 == 0);
    m.amp = uniform(-1.0, 1.0) / (1.0 + norm2);
    m.phase = uniform(0.0, 2.0 * 3.14159265358979323846);
    modes.push_back(std::move(m));
  }
  return modes;
}

void TrigFieldGenerator::fill_scalar(ScalarField& f,
                                     const std::vector<Mode>& modes,
                                     double scale) {
  const Chart& chart = f.chart();
  const int n = chart.dim();
  std::array<double, kMaxDim> x{};
  for_each_node(chart, [&](std::size_t node, const std::array<int, kMaxDim>& idx) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) x[a] = chart.coord(a, idx[a]);
    for (const Mode& m : modes) {
      double arg = m.phase;
      for (int a = 0; a < n; ++a)
        arg += m.freq[a] * (2.0 * 3.14159265358979323846 / chart.extent(a)) * x[a];
      s += m.amp * std::cos(arg);
    }
    f[node] = scale * s;
  });
}

ScalarField TrigFieldGenerator::scalar(const ChartPtr& chart) {
  ScalarField f(chart);
  fill_scalar(f, draw_modes(chart->dim(), 3), amplitude_);
  return f;
}

VecField TrigFieldGenerator::covector(const ChartPtr& chart) {
  VecField v(chart, /*covariant=*/true);
  const int n = chart->dim();
  for (int i = 0; i < n; ++i) {
    ScalarField comp(chart);
    fill_scalar(comp, draw_modes(n, 2), amplitude_);
    for_each_node(*chart, [&](std::size_t node, const std::array<int, kMaxDim>&) {
      v.at(node, i) = comp[node];
    });
  }
  return v;
}

Sym2Field TrigFieldGenerator::sym2(const ChartPtr& chart) {
  Sym2Field t(chart);
  const int n = chart->dim();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      ScalarField comp(chart);
      fill_scalar(comp, draw_modes(n, 2), amplitude_);
      for_each_node(*chart,
                    [&](std::size_t node, const std::array<int, kMaxDim>&) {
                      t.at(node, i, j) = comp[node];
                    });
    }
  return t;
}

Sym2Field TrigFieldGenerator::metric(const ChartPtr& chart) {
  Sym2Field g = sym2(chart);
  const int n = chart->dim();
  for_each_node(*chart, [&](std::size_t node, const std::array<int, kMaxDim>&) {
    for (int i = 0; i < n; ++i) g.at(node, i, i) += 1.0;
  });
  return g;
}

MetricMeasureSpace TrigFieldGenerator::space(const ChartPtr& chart, double m) {
  Sym2Field g = metric(chart);
  ScalarField phi = scalar(chart);
  return MetricMeasureSpace(chart, std::move(g), std::move(phi), m);
}

double fit_order(const std::vector<double>& hs, const std::vector<double>& ds) {
  // slope of log d vs log h, least squares
  const std::size_t k = hs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = std::log(hs[i]);
    const double y = std::log(std::max(ds[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = k * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (k * sxy - sx * sy) / denom;
}

}  // namespace wcurv
