#ifndef WCURV_CONFIG_HPP
#define WCURV_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "wcurv/expr.hpp"
#include "wcurv/space.hpp"

namespace wcurv {

// Parsed form of the versioned key/value config:
//
//   version: 1
//   chart {
//     kind: torus            # torus | box
//     n: 2
//     sizes: 64 64
//     extents: 2*pi 2*pi     # constant expressions, m may appear
//   }
//   fields {
//     g00: 1 + 0.1*sin(x0)   # all n(n+1)/2 metric components g00, g01, ...
//     g01: 0
//     g11: 1
//     phi: 0.1*cos(x1)
//     f: exp(-x1)            # optional extras: f, u, psi, target, h00, ...
//   }
//   m: 2
//   order: 4
//   tolerances { static: 1e-8 }
//   prescribe { target: ...  tol: 1e-6  max_iter: 10  c_grid: 1 2 5 }
//
// Field values are either expressions in x0..x{n-1} (and m) or csv:PATH
// references relative to the config file.
struct Config {
  int version = 1;
  std::string chart_kind;
  int n = 0;
  std::vector<int> sizes;
  std::vector<std::string> extent_exprs;
  std::vector<std::pair<std::string, std::string>> fields;  // name -> spec
  double m = 1.0;
  int order = 4;
  std::map<std::string, double> tolerances;
  std::map<std::string, std::map<std::string, std::string>> blocks;
  std::string source_text;
  std::string base_dir;
};

Config parse_config_text(const std::string& text, const std::string& base_dir);
Config load_config(const std::string& path);

ChartPtr build_chart(const Config& cfg, int order_override = 0);

// Evaluates the metric block (throws ConfigError naming any missing
// component) and phi; m from the config.
MetricMeasureSpace build_space(const Config& cfg, const ChartPtr& chart);

bool config_has_field(const Config& cfg, const std::string& name);
ScalarField build_scalar_field(const Config& cfg, const ChartPtr& chart,
                               const std::string& name);
// h00..: optional symmetric tensor by component names with prefix
bool config_has_sym2(const Config& cfg, const std::string& prefix, int n);
Sym2Field build_sym2_field(const Config& cfg, const ChartPtr& chart,
                           const std::string& prefix);

// Block helpers with defaults.
std::string block_get(const Config& cfg, const std::string& block,
                      const std::string& key, const std::string& fallback);
double block_get_num(const Config& cfg, const std::string& block,
                     const std::string& key, double fallback);
std::vector<double> block_get_list(const Config& cfg, const std::string& block,
                                   const std::string& key,
                                   const std::vector<double>& fallback);
double tolerance_or(const Config& cfg, const std::string& name,
                    double fallback);

}  // namespace wcurv

#endif
