#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "starnls/decomposition.hpp"
#include "starnls/graph.hpp"

namespace starnls::io {

/// Full-precision scientific notation that round-trips a double.
std::string fmt(double x);

/// Columnar snapshot:
///   # starnls snapshot
///   N <edges>
///   L <length>
///   n_points <n>
///   h <spacing>
///   x re_1 im_1 ... re_N im_N
///   <one row per grid point>
void write_snapshot(std::ostream& os, const GraphFunction& f);
/// Throws std::runtime_error with the offending line number on malformed input.
GraphFunction read_snapshot(std::istream& is);
GraphFunction read_snapshot_file(const std::string& path);
void write_snapshot_file(const std::string& path, const GraphFunction& f);

/// Same layout for a line triple with a parity tag (odd/even) per part and
/// signed x in the first column.
void write_triple(std::ostream& os, const LineTriple& t);
LineTriple read_triple(std::istream& is);

/// Comma-separated table with a fixed header.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<double> row);
  void add_text_row(std::vector<std::string> row);
  void write(std::ostream& os) const;
  size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG with one panel per series.
std::string svg_plot(const std::string& title, const std::vector<PlotSeries>& series);

}  // namespace starnls::io
