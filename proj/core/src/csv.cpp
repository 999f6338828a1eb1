#include "dualact/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dualact/errors.hpp"

namespace dualact {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::vector<std::string> phase_component_names(int n, int p) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(phase_components(n, p)));
  for (int i = 0; i < n; ++i) {
    names.push_back("x" + std::to_string(i + 1));
  }
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < p; ++a) {
      names.push_back("p" + std::to_string(i + 1) + "_" + std::to_string(a + 1));
    }
  }
  return names;
}

namespace {

std::vector<std::string> column_names(const CsvField& field, int p) {
  std::vector<std::string> names;
  if (field.n >= 1 && field.field->components() == phase_components(field.n, p)) {
    for (const std::string& comp : phase_component_names(field.n, p)) {
      names.push_back(field.prefix + "_" + comp);
    }
  } else {
    for (int c = 0; c < field.field->components(); ++c) {
      names.push_back(field.prefix + "_c" + std::to_string(c));
    }
  }
  return names;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(item);
  }
  return out;
}

}  // namespace

void write_field_csv(const std::filesystem::path& path, const MultiTimeGrid& grid,
                     const std::vector<CsvField>& fields) {
  for (const CsvField& f : fields) {
    if (!(f.field->grid() == grid)) {
      throw std::invalid_argument("write_field_csv: field grid mismatch");
    }
  }
  std::ofstream out(path);
  if (!out.is_open()) {
    throw std::runtime_error("cannot write field CSV: " + path.string());
  }
  const int p = grid.dims();
  for (int a = 0; a < p; ++a) {
    out << (a ? "," : "") << "t" << (a + 1);
  }
  for (const CsvField& f : fields) {
    for (const std::string& name : column_names(f, p)) {
      out << "," << name;
    }
  }
  out << "\n";
  const std::size_t nodes = grid.node_count();
  for (std::size_t node = 0; node < nodes; ++node) {
    for (int a = 0; a < p; ++a) {
      const double t = static_cast<double>(grid.coordinate(node, a)) * grid.spacing(a);
      out << (a ? "," : "") << format_double(t);
    }
    for (const CsvField& f : fields) {
      for (int c = 0; c < f.field->components(); ++c) {
        out << "," << format_double(f.field->at(node, c));
      }
    }
    out << "\n";
  }
  if (!out.good()) {
    throw std::runtime_error("failed writing field CSV: " + path.string());
  }
}

std::map<std::string, PeriodicField> read_field_csv(const std::filesystem::path& path,
                                                    const MultiTimeGrid& grid) {
  std::ifstream in(path);
  if (!in.is_open()) {
    throw ScenarioError("cannot open field CSV: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ScenarioError(path.string() + ": empty field CSV");
  }
  const std::vector<std::string> header = split_line(line);
  const int p = grid.dims();
  if (static_cast<int>(header.size()) < p) {
    throw ScenarioError(path.string() + ": header is missing the time columns");
  }
  for (int a = 0; a < p; ++a) {
    if (header[static_cast<std::size_t>(a)] != "t" + std::to_string(a + 1)) {
      throw ScenarioError(path.string() + ": header must start with t1..t" + std::to_string(p));
    }
  }

  // Group remaining columns by prefix (text before the last '_').
  struct Group {
    std::vector<std::size_t> columns;
  };
  std::map<std::string, Group> groups;
  std::vector<std::string> order;
  for (std::size_t col = static_cast<std::size_t>(p); col < header.size(); ++col) {
    const std::string& name = header[col];
    const std::size_t underscore = name.find('_');
    if (underscore == std::string::npos || underscore == 0) {
      throw ScenarioError(path.string() + ": field column '" + name + "' has no prefix");
    }
    const std::string prefix = name.substr(0, underscore);
    if (!groups.count(prefix)) {
      order.push_back(prefix);
    }
    groups[prefix].columns.push_back(col);
  }

  std::map<std::string, PeriodicField> result;
  for (const std::string& prefix : order) {
    result.emplace(prefix,
                   PeriodicField(grid, static_cast<int>(groups[prefix].columns.size())));
  }

  const std::size_t nodes = grid.node_count();
  std::size_t node = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (node >= nodes) {
      throw ScenarioError(path.string() + ": more rows than grid nodes");
    }
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw ScenarioError(path.string() + ":" + std::to_string(lineno) +
                              ": wrong number of columns",
                          lineno);
    }
    for (int a = 0; a < p; ++a) {
      const double t = std::strtod(cells[static_cast<std::size_t>(a)].c_str(), nullptr);
      const double expected = static_cast<double>(grid.coordinate(node, a)) * grid.spacing(a);
      if (std::abs(t - expected) > 1e-12 * (1.0 + std::abs(expected))) {
        throw ScenarioError(path.string() + ":" + std::to_string(lineno) +
                                ": time column does not match the scenario grid",
                            lineno);
      }
    }
    for (const std::string& prefix : order) {
      PeriodicField& field = result.at(prefix);
      const Group& group = groups.at(prefix);
      for (std::size_t k = 0; k < group.columns.size(); ++k) {
        field.at(node, static_cast<int>(k)) =
            std::strtod(cells[group.columns[k]].c_str(), nullptr);
      }
    }
    ++node;
  }
  if (node != nodes) {
    throw ScenarioError(path.string() + ": fewer rows than grid nodes");
  }
  return result;
}

}  // namespace dualact
