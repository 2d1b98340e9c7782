#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bht::cli {

/// Numeric results table: named columns, rows of doubles.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool empty() const noexcept { return rows.empty(); }
  std::size_t column(const std::string& name) const;
  std::vector<double> values(std::size_t col) const;
};

/// Header line then one line per row, 17 significant digits.
void write_csv(std::ostream& out, const Table& t);
void write_csv(const std::string& path, const Table& t);
/// Inverse of write_csv; throws bht::Error on malformed input.
Table read_csv(std::istream& in);

enum class PlotKind { line, heatmap };

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log2_x = false;
  bool log2_y = false;
  /// Free text drawn in the top-right corner (e.g. a fitted slope).
  std::string annotation;
  /// line: column 0 against these columns (all others when empty).
  /// heatmap: columns (x, y, value) are taken from the first three entries.
  std::vector<std::size_t> series;
};

/// Self-contained SVG. Throws PreconditionError for an empty table.
std::string render_svg(const Table& t, PlotKind kind, const PlotOptions& opt = {});
void emit_plot(const Table& t, PlotKind kind, const std::string& path, const PlotOptions& opt = {});

}  // namespace bht::cli
