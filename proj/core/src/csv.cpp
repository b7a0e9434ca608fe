#include "wcurv/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "wcurv/errors.hpp"

namespace wcurv {

namespace {

void rename_into_place(const std::string& tmp, const std::string& path) {
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error("cannot move " + tmp + " to " + path);
}

}  // namespace

void write_field_csv(const detail::FieldBase& f,
                     const std::vector<std::string>& comp_names,
                     const std::string& path) {
  if (static_cast<int>(comp_names.size()) != f.ncomp())
    throw PreconditionError("component name count mismatch");
  const Chart& chart = f.chart();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp + " for writing");
    for (int a = 0; a < chart.dim(); ++a) out << "x" << a << ",";
    for (std::size_t c = 0; c < comp_names.size(); ++c) {
      out << comp_names[c];
      out << (c + 1 < comp_names.size() ? ',' : '\n');
    }
    char buf[64];
    for_each_node(chart, [&](std::size_t node,
                             const std::array<int, kMaxDim>& idx) {
      for (int a = 0; a < chart.dim(); ++a) {
        std::snprintf(buf, sizeof buf, "%.17g,", chart.coord(a, idx[a]));
        out << buf;
      }
      for (int c = 0; c < f.ncomp(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", f.comp(node, c));
        out << buf << (c + 1 < f.ncomp() ? ',' : '\n');
      }
    });
  }
  rename_into_place(tmp, path);
}

void write_scalar_csv(const ScalarField& f, const std::string& name,
                      const std::string& path) {
  write_field_csv(f, {name}, path);
}

void write_sym2_csv(const Sym2Field& f, const std::string& name,
                    const std::string& path) {
  const int n = f.chart().dim();
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      names.push_back(name + "_" + std::to_string(i) + std::to_string(j));
  write_field_csv(f, names, path);
}

ScalarField read_scalar_csv(const ChartPtr& chart, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open CSV file");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path, "empty CSV file");
  // header: count columns
  std::size_t cols = 1;
  for (char c : line)
    if (c == ',') ++cols;
  const std::size_t want_cols = static_cast<std::size_t>(chart->dim()) + 1;
  if (cols != want_cols)
    throw ConfigError(path, "expected " + std::to_string(want_cols) +
                                " columns (coordinates + value), found " +
                                std::to_string(cols));
  ScalarField f(chart);
  std::size_t row = 0;
  const std::size_t total = chart->node_count();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= total)
      throw ConfigError(path, "more rows than chart nodes (" +
                                  std::to_string(total) + ")");
    std::stringstream ss(line);
    std::string cell;
    double value = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (!std::getline(ss, cell, ','))
        throw ConfigError(path, "short row " + std::to_string(row + 2));
      if (c == cols - 1) {
        char* end = nullptr;
        value = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str())
          throw ConfigError(path, "bad number in row " + std::to_string(row + 2));
      }
    }
    f[row] = value;
    ++row;
  }
  if (row != total)
    throw ConfigError(path, "row count " + std::to_string(row) +
                                " does not match chart nodes (" +
                                std::to_string(total) + ")");
  return f;
}

}  // namespace wcurv
