#include "starnls/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace starnls::io {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

namespace {

struct LineReader {
  std::istream& is;
  int line_no = 0;

  bool next(std::string& line) {
    while (std::getline(is, line)) {
      ++line_no;
      if (!line.empty() && line[0] != '#') return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << "snapshot line " << line_no << ": " << what;
    throw std::runtime_error(msg.str());
  }

  template <typename T>
  T keyed(const std::string& key) {
    std::string line;
    if (!next(line)) fail("missing '" + key + "'");
    std::istringstream ss(line);
    std::string k;
    T v{};
    if (!(ss >> k >> v) || k != key) fail("expected '" + key + " <value>'");
    return v;
  }
};

}  // namespace

void write_snapshot(std::ostream& os, const GraphFunction& f) {
  const auto& g = f.grid();
  os << "# starnls snapshot\n";
  os << "N " << f.n_edges() << "\n";
  os << "L " << fmt(g.length()) << "\n";
  os << "n_points " << g.n_points() << "\n";
  os << "h " << fmt(g.h()) << "\n";
  os << "x";
  for (int k = 1; k <= f.n_edges(); ++k) os << " re_" << k << " im_" << k;
  os << "\n";
  for (int i = 0; i < g.n_points(); ++i) {
    os << fmt(g.x(i));
    for (int k = 0; k < f.n_edges(); ++k)
      os << ' ' << fmt(f.at(k, i).real()) << ' ' << fmt(f.at(k, i).imag());
    os << '\n';
  }
}

GraphFunction read_snapshot(std::istream& is) {
  LineReader r{is};
  const int n = r.keyed<int>("N");
  const double length = r.keyed<double>("L");
  const int points = r.keyed<int>("n_points");
  const double h = r.keyed<double>("h");
  if (n < 1 || points < 16 || !(length > 0.0)) r.fail("invalid header values");
  if (std::abs(h - length / (points - 1)) > 1e-9 * h) r.fail("h inconsistent with L and n_points");
  std::string line;
  if (!r.next(line) || line.rfind("x", 0) != 0) r.fail("missing column header");
  GraphFunction f(EdgeGrid(length, points), n);
  for (int i = 0; i < points; ++i) {
    if (!r.next(line)) r.fail("too few data rows");
    std::istringstream ss(line);
    double x = 0.0;
    if (!(ss >> x)) r.fail("bad x value");
    for (int k = 0; k < n; ++k) {
      double re = 0.0, im = 0.0;
      if (!(ss >> re >> im)) r.fail("expected re/im pair for every edge");
      f.at(k, i) = {re, im};
    }
  }
  if (!f.all_finite()) r.fail("non-finite sample");
  return f;
}

GraphFunction read_snapshot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
  return read_snapshot(in);
}

void write_snapshot_file(const std::string& path, const GraphFunction& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot '" + path + "'");
  write_snapshot(out, f);
}

void write_triple(std::ostream& os, const LineTriple& t) {
  const auto& g = t.half_grid();
  os << "# starnls line triple\n";
  os << "N " << t.n_parts() << "\n";
  os << "L " << fmt(g.length()) << "\n";
  os << "n_points " << g.n_points() << "\n";
  os << "h " << fmt(g.h()) << "\n";
  os << "parity";
  for (int k = 0; k < t.n_parts(); ++k) os << ' ' << (t.is_odd(k) ? "odd" : "even");
  os << "\nx";
  for (int k = 1; k <= t.n_parts(); ++k) os << " re_" << k << " im_" << k;
  os << "\n";
  const int lim = g.n_points() - 1;
  for (int j = -lim; j <= lim; ++j) {
    os << fmt(j * g.h());
    for (const auto& part : t.parts) os << ' ' << fmt(part.at(j).real()) << ' ' << fmt(part.at(j).imag());
    os << '\n';
  }
}

LineTriple read_triple(std::istream& is) {
  LineReader r{is};
  const int n = r.keyed<int>("N");
  const double length = r.keyed<double>("L");
  const int points = r.keyed<int>("n_points");
  (void)r.keyed<double>("h");
  if (n < 2 || points < 16 || !(length > 0.0)) r.fail("invalid header values");
  std::string line;
  if (!r.next(line)) r.fail("missing parity line");
  {
    std::istringstream ss(line);
    std::string key, tag;
    ss >> key;
    if (key != "parity") r.fail("expected parity tags");
    for (int k = 0; k < n; ++k) {
      if (!(ss >> tag)) r.fail("missing parity tag");
      const bool odd = k < n - 1;
      if (tag != (odd ? "odd" : "even")) r.fail("parity tags must be odd ... odd even");
    }
  }
  if (!r.next(line) || line.rfind("x", 0) != 0) r.fail("missing column header");
  const EdgeGrid grid(length, points);
  LineTriple t;
  t.parts.assign(size_t(n), LineFunction(grid));
  const int lim = points - 1;
  for (int j = -lim; j <= lim; ++j) {
    if (!r.next(line)) r.fail("too few data rows");
    std::istringstream ss(line);
    double x = 0.0;
    if (!(ss >> x)) r.fail("bad x value");
    for (int k = 0; k < n; ++k) {
      double re = 0.0, im = 0.0;
      if (!(ss >> re >> im)) r.fail("expected re/im pair for every part");
      t.parts[size_t(k)].at(j) = {re, im};
    }
  }
  return t;
}

void CsvTable::add_row(std::vector<double> row) {
  std::vector<std::string> text;
  text.reserve(row.size());
  for (double v : row) text.push_back(fmt(v));
  add_text_row(std::move(text));
}

void CsvTable::add_text_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::invalid_argument("CsvTable: row width mismatch");
  rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

std::string svg_plot(const std::string& title, const std::vector<PlotSeries>& series) {
  const double width = 640.0, panel = 180.0, margin = 50.0;
  const double height = margin + series.size() * (panel + margin);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << margin << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
  for (size_t s = 0; s < series.size(); ++s) {
    const auto& ps = series[s];
    const double top = margin + s * (panel + margin);
    const double left = margin + 30.0, w = width - left - 20.0;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (size_t i = 0; i < ps.x.size() && i < ps.y.size(); ++i) {
      if (!std::isfinite(ps.x[i]) || !std::isfinite(ps.y[i])) continue;
      x0 = std::min(x0, ps.x[i]);
      x1 = std::max(x1, ps.x[i]);
      y0 = std::min(y0, ps.y[i]);
      y1 = std::max(y1, ps.y[i]);
    }
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << panel
       << "\" fill=\"none\" stroke=\"#888\"/>\n";
    os << "<text x=\"" << left << "\" y=\"" << top - 6 << "\">" << ps.label << "</text>\n";
    if (!(x1 > x0)) continue;
    if (!(y1 > y0)) {
      y0 -= 0.5;
      y1 += 0.5;
    }
    os << "<text x=\"" << 4 << "\" y=\"" << top + 10 << "\">" << fmt(y1).substr(0, 10) << "</text>\n";
    os << "<text x=\"" << 4 << "\" y=\"" << top + panel << "\">" << fmt(y0).substr(0, 10) << "</text>\n";
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"";
    for (size_t i = 0; i < ps.x.size() && i < ps.y.size(); ++i) {
      if (!std::isfinite(ps.x[i]) || !std::isfinite(ps.y[i])) continue;
      const double px = left + (ps.x[i] - x0) / (x1 - x0) * w;
      const double py = top + panel - (ps.y[i] - y0) / (y1 - y0) * panel;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
      os << buf;
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace starnls::io
