#ifndef WCURV_RANDOM_FIELDS_HPP
#define WCURV_RANDOM_FIELDS_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "wcurv/space.hpp"

namespace wcurv {

// Seeded generator of bounded-frequency trig polynomials (per-axis integer
// frequencies <= max_freq, amplitudes <= amplitude, decaying with |k|^2).
// Metric perturbations stay well inside the positive-definite cone. All
// randomness comes from mt19937_64 with an explicit uniform mapping, so
// identical seeds give identical fields on every platform.
class TrigFieldGenerator {
public:
  explicit TrigFieldGenerator(std::uint64_t seed, int max_freq = 2,
                              double amplitude = 0.05);

  ScalarField scalar(const ChartPtr& chart);
  VecField covector(const ChartPtr& chart);
  Sym2Field sym2(const ChartPtr& chart);
  // identity + sym2 perturbation
  Sym2Field metric(const ChartPtr& chart);
  MetricMeasureSpace space(const ChartPtr& chart, double m);

  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);

  int max_freq() const { return max_freq_; }
  double amplitude() const { return amplitude_; }

private:
  struct Mode {
    double amp;
    double phase;
    std::vector<int> freq;
  };
  std::vector<Mode> draw_modes(int n, int count);
  void fill_scalar(ScalarField& f, const std::vector<Mode>& modes,
                   double scale);

  std::mt19937_64 rng_;
  int max_freq_;
  double amplitude_;
};

// Least-squares slope of log(defect) against log(h): the measured
// convergence order over a refinement sweep.
double fit_order(const std::vector<double>& hs, const std::vector<double>& ds);

}  // namespace wcurv

#endif
