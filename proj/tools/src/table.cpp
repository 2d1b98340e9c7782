#include "bht_cli/table.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "bht/errors.hpp"

namespace bht::cli {

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error("table has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::values(std::size_t col) const {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r.at(col));
  return v;
}

void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n' << std::setprecision(17);
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
}

void write_csv(const std::string& path, const Table& t) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  write_csv(out, t);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) parts.push_back(cur);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

}  // namespace

Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error("empty CSV");
  t.columns = split(line, ',');
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.columns.size()) {
      throw Error("CSV line " + std::to_string(lineno) + ": expected " +
                  std::to_string(t.columns.size()) + " cells, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw Error("CSV line " + std::to_string(lineno) + ": bad number '" + c + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

constexpr double kW = 720, kH = 460, kLeft = 80, kRight = 30, kTop = 40, kBottom = 60;
const std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

struct Axis {
  double lo = 0, hi = 1;
  bool log2 = false;
  double map(double v, double p0, double p1) const {
    const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
    return p0 + t * (p1 - p0);
  }
  std::string label(double v) const { return log2 ? "2^" + num(v) : num(v); }
};

Axis make_axis(const std::vector<double>& v, bool log2) {
  Axis a;
  a.log2 = log2;
  a.lo = std::numeric_limits<double>::infinity();
  a.hi = -a.lo;
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    a.lo = std::min(a.lo, x);
    a.hi = std::max(a.hi, x);
  }
  if (!std::isfinite(a.lo)) a.lo = 0, a.hi = 1;
  if (a.hi == a.lo) a.lo -= 0.5, a.hi += 0.5;
  return a;
}

double transform(double v, bool log2) {
  if (!log2) return v;
  return v > 0 ? std::log2(v) : std::numeric_limits<double>::quiet_NaN();
}

void frame(std::ostringstream& s, const Axis& ax, const Axis& ay, const PlotOptions& opt) {
  const double x0 = kLeft, x1 = kW - kRight, y0 = kH - kBottom, y1 = kTop;
  s << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
    << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double vx = ax.lo + (ax.hi - ax.lo) * k / 4.0;
    const double px = ax.map(vx, x0, x1);
    s << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\"" << y0 + 5
      << "\" stroke=\"#333\"/><text x=\"" << px << "\" y=\"" << y0 + 20
      << "\" font-size=\"12\" text-anchor=\"middle\">" << esc(ax.label(vx)) << "</text>\n";
    const double vy = ay.lo + (ay.hi - ay.lo) * k / 4.0;
    const double py = ay.map(vy, y0, y1);
    s << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py
      << "\" stroke=\"#333\"/><text x=\"" << x0 - 8 << "\" y=\"" << py + 4
      << "\" font-size=\"12\" text-anchor=\"end\">" << esc(ay.label(vy)) << "</text>\n";
  }
  s << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kH - 15
    << "\" font-size=\"13\" text-anchor=\"middle\">" << esc(opt.x_label) << "</text>\n";
  s << "<text x=\"18\" y=\"" << (y0 + y1) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << (y0 + y1) / 2 << ")\">" << esc(opt.y_label) << "</text>\n";
  s << "<text x=\"" << kW / 2 << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">" << esc(opt.title)
    << "</text>\n";
  if (!opt.annotation.empty()) {
    s << "<text x=\"" << x1 - 8 << "\" y=\"" << y1 + 18 << "\" font-size=\"12\" text-anchor=\"end\">"
      << esc(opt.annotation) << "</text>\n";
  }
}

// Piecewise-linear approximation of the viridis map.
std::string color(double t) {
  static const double stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  std::ostringstream s;
  s << "rgb(";
  for (int c = 0; c < 3; ++c) {
    s << (c ? "," : "") << static_cast<int>(std::lround(stops[i][c] + f * (stops[i + 1][c] - stops[i][c])));
  }
  s << ")";
  return s.str();
}

std::string line_plot(const Table& t, const PlotOptions& opt) {
  std::vector<std::size_t> series = opt.series;
  if (series.empty()) {
    for (std::size_t c = 1; c < t.columns.size(); ++c) series.push_back(c);
  }
  std::vector<double> xs, ys;
  for (const auto& r : t.rows) {
    xs.push_back(transform(r.at(0), opt.log2_x));
    for (auto c : series) ys.push_back(transform(r.at(c), opt.log2_y));
  }
  const Axis ax = make_axis(xs, opt.log2_x), ay = make_axis(ys, opt.log2_y);
  std::ostringstream s;
  frame(s, ax, ay, opt);
  const double x0 = kLeft, x1 = kW - kRight, y0 = kH - kBottom, y1 = kTop;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* col = kColors[k % kColors.size()];
    s << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : t.rows) {
      const double x = transform(r.at(0), opt.log2_x), y = transform(r.at(series[k]), opt.log2_y);
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      s << ax.map(x, x0, x1) << "," << ay.map(y, y0, y1) << " ";
    }
    s << "\"/>\n";
    s << "<text x=\"" << x0 + 10 << "\" y=\"" << y1 + 18 + 16 * k << "\" font-size=\"12\" fill=\"" << col
      << "\">" << esc(t.columns.at(series[k])) << "</text>\n";
  }
  return s.str();
}

std::string heatmap(const Table& t, const PlotOptions& opt) {
  const std::size_t cx = opt.series.size() >= 3 ? opt.series[0] : 0;
  const std::size_t cy = opt.series.size() >= 3 ? opt.series[1] : 1;
  const std::size_t cv = opt.series.size() >= 3 ? opt.series[2] : 2;
  std::map<double, int> xi, yi;
  for (const auto& r : t.rows) {
    xi[r.at(cx)] = 0;
    yi[r.at(cy)] = 0;
  }
  int k = 0;
  for (auto& [_, v] : xi) v = k++;
  k = 0;
  for (auto& [_, v] : yi) v = k++;
  std::vector<double> vals;
  for (const auto& r : t.rows) vals.push_back(transform(r.at(cv), opt.log2_y));
  const Axis av = make_axis(vals, opt.log2_y);
  const double x0 = kLeft, x1 = kW - kRight - 60, y0 = kH - kBottom, y1 = kTop;
  std::ostringstream s;
  const double cw = (x1 - x0) / xi.size(), ch = (y0 - y1) / yi.size();
  for (const auto& r : t.rows) {
    const double v = transform(r.at(cv), opt.log2_y);
    const double px = x0 + cw * xi[r.at(cx)];
    const double py = y0 - ch * (yi[r.at(cy)] + 1);
    s << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cw << "\" height=\"" << ch
      << "\" fill=\"" << (std::isfinite(v) ? color((v - av.lo) / (av.hi - av.lo)) : "#ccc")
      << "\"><title>" << num(r.at(cx)) << "," << num(r.at(cy)) << ": " << num(r.at(cv))
      << "</title></rect>\n";
  }
  s << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
    << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (const auto& [v, i] : xi) {
    s << "<text x=\"" << x0 + cw * (i + 0.5) << "\" y=\"" << y0 + 18
      << "\" font-size=\"11\" text-anchor=\"middle\">" << num(v) << "</text>\n";
  }
  for (const auto& [v, i] : yi) {
    s << "<text x=\"" << x0 - 6 << "\" y=\"" << y0 - ch * (i + 0.5) + 4
      << "\" font-size=\"11\" text-anchor=\"end\">" << num(v) << "</text>\n";
  }
  // Color bar.
  for (int b = 0; b < 50; ++b) {
    s << "<rect x=\"" << x1 + 20 << "\" y=\"" << y0 - (y0 - y1) * (b + 1) / 50.0 << "\" width=\"16\" height=\""
      << (y0 - y1) / 50.0 + 0.5 << "\" fill=\"" << color(b / 49.0) << "\"/>\n";
  }
  s << "<text x=\"" << x1 + 40 << "\" y=\"" << y0 << "\" font-size=\"11\">" << esc(av.label(av.lo))
    << "</text><text x=\"" << x1 + 40 << "\" y=\"" << y1 + 10 << "\" font-size=\"11\">"
    << esc(av.label(av.hi)) << "</text>\n";
  s << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kH - 15 << "\" font-size=\"13\" text-anchor=\"middle\">"
    << esc(opt.x_label.empty() ? t.columns.at(cx) : opt.x_label) << "</text>\n";
  s << "<text x=\"18\" y=\"" << (y0 + y1) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << (y0 + y1) / 2 << ")\">" << esc(opt.y_label.empty() ? t.columns.at(cy) : opt.y_label) << "</text>\n";
  s << "<text x=\"" << kW / 2 << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">" << esc(opt.title)
    << "</text>\n";
  return s.str();
}

}  // namespace

std::string render_svg(const Table& t, PlotKind kind, const PlotOptions& opt) {
  if (t.empty()) throw PreconditionError("cannot plot an empty table");
  if (kind == PlotKind::heatmap && t.columns.size() < 3) {
    throw PreconditionError("heatmap needs (x, y, value) columns");
  }
  if (kind == PlotKind::line && t.columns.size() < 2) {
    throw PreconditionError("line plot needs at least two columns");
  }
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" viewBox=\"0 0 " << kW << " " << kH << "\" font-family=\"sans-serif\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << (kind == PlotKind::line ? line_plot(t, opt) : heatmap(t, opt));
  s << "</svg>\n";
  return s.str();
}

void emit_plot(const Table& t, PlotKind kind, const std::string& path, const PlotOptions& opt) {
  const std::string svg = render_svg(t, kind, opt);
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << svg;
}

}  // namespace bht::cli
