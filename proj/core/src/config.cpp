#include "wcurv/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "wcurv/csv.hpp"

namespace wcurv {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  const std::size_t pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_number(const std::string& where, const std::string& value,
                    double m) {
  try {
    return eval_constant_expr(value, m);
  } catch (const Error& e) {
    throw ConfigError(where, std::string("bad numeric value: ") + e.what());
  }
}

}  // namespace

Config parse_config_text(const std::string& text,
                         const std::string& base_dir) {
  Config cfg;
  cfg.source_text = text;
  cfg.base_dir = base_dir;

  std::istringstream in(text);
  std::string raw;
  std::string block;  // empty = top level
  int lineno = 0;
  bool saw_version = false;

  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);

    if (line == "}") {
      if (block.empty()) throw ConfigError(where, "unmatched '}'");
      block.clear();
      continue;
    }
    if (line.size() > 1 && line.back() == '{') {
      if (!block.empty())
        throw ConfigError(where, "nested blocks are not supported");
      block = trim(line.substr(0, line.size() - 1));
      if (block.empty()) throw ConfigError(where, "block needs a name");
      continue;
    }
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw ConfigError(where, "expected 'key: value'");
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (key.empty()) throw ConfigError(where, "empty key");

    if (block.empty()) {
      if (key == "version") {
        cfg.version = std::atoi(value.c_str());
        if (cfg.version != 1)
          throw ConfigError("version", "only version 1 is understood");
        saw_version = true;
      } else if (key == "m") {
        cfg.m = parse_number("m", value, 1.0);
      } else if (key == "order") {
        cfg.order = std::atoi(value.c_str());
      } else {
        throw ConfigError(key, "unknown top-level key");
      }
      continue;
    }
    if (block == "chart") {
      if (key == "kind") cfg.chart_kind = value;
      else if (key == "n") cfg.n = std::atoi(value.c_str());
      else if (key == "sizes") {
        for (const std::string& t : split_ws(value))
          cfg.sizes.push_back(std::atoi(t.c_str()));
      } else if (key == "extents") {
        cfg.extent_exprs = split_ws(value);
      } else {
        throw ConfigError("chart." + key, "unknown chart key");
      }
    } else if (block == "fields") {
      cfg.fields.emplace_back(key, value);
    } else if (block == "tolerances") {
      cfg.tolerances[key] = parse_number("tolerances." + key, value, cfg.m);
    } else {
      cfg.blocks[block][key] = value;
    }
  }
  if (!block.empty()) throw ConfigError(block, "unterminated block");
  if (!saw_version) throw ConfigError("version", "missing 'version: 1' header");
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string dir = ".";
  const std::size_t slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash);
  return parse_config_text(ss.str(), dir);
}

ChartPtr build_chart(const Config& cfg, int order_override) {
  if (cfg.chart_kind != "torus" && cfg.chart_kind != "box")
    throw ConfigError("chart.kind", "must be 'torus' or 'box'");
  if (cfg.n < 1 || cfg.n > kMaxDim)
    throw ConfigError("chart.n", "dimension out of range");
  if (static_cast<int>(cfg.sizes.size()) != cfg.n)
    throw ConfigError("chart.sizes", "need exactly n entries");
  if (static_cast<int>(cfg.extent_exprs.size()) != cfg.n)
    throw ConfigError("chart.extents", "need exactly n entries");
  std::vector<double> extents;
  for (int a = 0; a < cfg.n; ++a)
    extents.push_back(
        parse_number("chart.extents[" + std::to_string(a) + "]",
                     cfg.extent_exprs[a], cfg.m));
  const int order = order_override > 0 ? order_override : cfg.order;
  try {
    if (cfg.chart_kind == "torus")
      return make_chart(Chart::torus(cfg.sizes, extents, order));
    return make_chart(Chart::box(cfg.sizes, extents, order));
  } catch (const ChartError& e) {
    throw ConfigError("chart", e.what());
  }
}

namespace {

const std::string* find_field(const Config& cfg, const std::string& name) {
  for (const auto& [k, v] : cfg.fields)
    if (k == name) return &v;
  return nullptr;
}

ScalarField eval_field_spec(const Config& cfg, const ChartPtr& chart,
                            const std::string& name, const std::string& spec) {
  if (spec.rfind("csv:", 0) == 0) {
    std::string path = trim(spec.substr(4));
    if (!path.empty() && path[0] != '/') path = cfg.base_dir + "/" + path;
    return read_scalar_csv(chart, path);
  }
  Expr e;
  try {
    e = parse_expr(spec);
  } catch (const Error& err) {
    throw ConfigError("fields." + name, err.what());
  }
  ScalarField out(chart);
  EvalEnv env;
  env.m = cfg.m;
  std::array<double, kMaxDim> x{};
  try {
    for_each_node(*chart,
                  [&](std::size_t f, const std::array<int, kMaxDim>& idx) {
                    for (int a = 0; a < chart->dim(); ++a) {
                      x[a] = chart->coord(a, idx[a]);
                      env.x[a] = x[a];
                    }
                    out[f] = e.eval(env);
                  });
  } catch (const Error& err) {
    throw ConfigError("fields." + name, err.what());
  }
  return out;
}

}  // namespace

bool config_has_field(const Config& cfg, const std::string& name) {
  return find_field(cfg, name) != nullptr;
}

ScalarField build_scalar_field(const Config& cfg, const ChartPtr& chart,
                               const std::string& name) {
  const std::string* spec = find_field(cfg, name);
  if (!spec) throw ConfigError("fields." + name, "missing");
  return eval_field_spec(cfg, chart, name, *spec);
}

bool config_has_sym2(const Config& cfg, const std::string& prefix, int n) {
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (!config_has_field(
              cfg, prefix + std::to_string(i) + std::to_string(j)))
        return false;
  return true;
}

Sym2Field build_sym2_field(const Config& cfg, const ChartPtr& chart,
                           const std::string& prefix) {
  const int n = chart->dim();
  Sym2Field out(chart);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const std::string name = prefix + std::to_string(i) + std::to_string(j);
      ScalarField comp = build_scalar_field(cfg, chart, name);
      for (std::size_t f = 0; f < chart->node_count(); ++f)
        out.at(f, i, j) = comp[f];
    }
  return out;
}

MetricMeasureSpace build_space(const Config& cfg, const ChartPtr& chart) {
  const int n = chart->dim();
  // validate the full metric block up front, naming missing components
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const std::string name = "g" + std::to_string(i) + std::to_string(j);
      if (!config_has_field(cfg, name))
        throw ConfigError("fields." + name, "missing metric component");
    }
  Sym2Field g = build_sym2_field(cfg, chart, "g");
  if (!config_has_field(cfg, "phi"))
    throw ConfigError("fields.phi", "missing");
  ScalarField phi = build_scalar_field(cfg, chart, "phi");
  if (!(cfg.m > 0.0) || !std::isfinite(cfg.m))
    throw ConfigError("m", "must be positive and finite");
  try {
    return MetricMeasureSpace(chart, std::move(g), std::move(phi), cfg.m);
  } catch (const Error& e) {
    throw ConfigError("fields", e.what());
  }
}

std::string block_get(const Config& cfg, const std::string& block,
                      const std::string& key, const std::string& fallback) {
  auto b = cfg.blocks.find(block);
  if (b == cfg.blocks.end()) return fallback;
  auto k = b->second.find(key);
  return k == b->second.end() ? fallback : k->second;
}

double block_get_num(const Config& cfg, const std::string& block,
                     const std::string& key, double fallback) {
  const std::string v = block_get(cfg, block, key, "");
  if (v.empty()) return fallback;
  return parse_number(block + "." + key, v, cfg.m);
}

std::vector<double> block_get_list(const Config& cfg, const std::string& block,
                                   const std::string& key,
                                   const std::vector<double>& fallback) {
  const std::string v = block_get(cfg, block, key, "");
  if (v.empty()) return fallback;
  std::vector<double> out;
  for (const std::string& t : split_ws(v))
    out.push_back(parse_number(block + "." + key, t, cfg.m));
  return out;
}

double tolerance_or(const Config& cfg, const std::string& name,
                    double fallback) {
  auto it = cfg.tolerances.find(name);
  return it == cfg.tolerances.end() ? fallback : it->second;
}

}  // namespace wcurv
