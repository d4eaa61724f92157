#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aggmarket/types.hpp"

namespace aggmarket {

using NumberColumn = std::vector<double>;
using TextColumn = std::vector<std::string>;
using CellColumn = std::vector<Cell>;  // abstain-aware numeric series

struct Column {
  std::string name;
  std::variant<NumberColumn, TextColumn, CellColumn> data;

  std::size_t size() const;
};

/// Tabular experiment output: named columns of equal length plus the run
/// parameters needed to reproduce it.
struct ExperimentReport {
  std::string name;
  std::vector<Column> columns;
  std::map<std::string, std::string> metadata;

  ExperimentReport& add_numbers(std::string name, NumberColumn values);
  ExperimentReport& add_text(std::string name, TextColumn values);
  ExperimentReport& add_cells(std::string name, CellColumn values);

  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
  const Column* find(const std::string& name) const;

  void validate() const;  // equal column lengths
};

enum class EmitFormat { Csv, Json, Svg };

EmitFormat format_from_string(const std::string& s);

// In-memory renderers; all output is byte-deterministic for a given report.
// Numbers are written shortest-round-trip, so emit/parse loses nothing.
std::string to_csv(const ExperimentReport& report);
std::string to_json_text(const ExperimentReport& report);
std::string to_svg(const ExperimentReport& report);

ExperimentReport report_from_json_text(const std::string& text);

/// Writes the report to `path` in the requested format. Throws IoError on
/// unwritable paths.
void emit(const ExperimentReport& report, EmitFormat format,
          const std::filesystem::path& path);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace aggmarket
