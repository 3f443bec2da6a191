#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace well {

/// Named numeric columns plus an optional text column, with the
/// reproducibility header carried as ordered key/value pairs.
struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::string text_name;           // empty: no text column
  std::vector<std::string> text;   // one entry per row when present

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  void add_meta(const std::string& key, const std::string& value) { meta.emplace_back(key, value); }
  void add_column(const std::string& name, std::vector<double> values);
  const std::vector<double>& column(const std::string& name) const;
};

/// Shortest decimal that reads back to the same double.
std::string format_number(double v);

/// "# key: value" lines, a header row, then rows; LF line ends.
void write_csv(std::ostream& os, const Table& table);
Table read_csv(std::istream& is);

/// {"meta": {...}, "data": {"col": [...], ...}} plus any extra JSON text
/// nested under "reports" (must be a JSON object or empty).
void write_json(std::ostream& os, const Table& table, const std::string& reports_json = "");
Table read_json(std::istream& is);

struct Curve {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Curve> curves;
};

/// Self-contained SVG 1.1 line plot.
void write_svg(std::ostream& os, const PlotSpec& plot);

/// Writes to `path` through `fn`; throws std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn);

}  // namespace well
