#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dualact/field.hpp"
#include "dualact/grid.hpp"

namespace dualact {

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double value);

/// Phase component names in the canonical order: x1..xn, p1_1..p1_p, ..., pn_p.
std::vector<std::string> phase_component_names(int n, int p);

struct CsvField {
  std::string prefix;          // column prefix, e.g. "w" -> w_x1, w_p1_1, ...
  const PeriodicField* field;  // must live on the shared grid
  int n;                       // phase layout when >= 1, else generic c0..cm columns
};

/// Writes t^1..t^p followed by every field's components, one row per node in
/// canonical node order, 17 significant digits.
void write_field_csv(const std::filesystem::path& path, const MultiTimeGrid& grid,
                     const std::vector<CsvField>& fields);

/// Reads a field CSV produced by write_field_csv. Validates the row count and
/// the time columns against `grid` and returns the fields keyed by prefix.
/// Throws ScenarioError on malformed input.
std::map<std::string, PeriodicField> read_field_csv(const std::filesystem::path& path,
                                                    const MultiTimeGrid& grid);

}  // namespace dualact
