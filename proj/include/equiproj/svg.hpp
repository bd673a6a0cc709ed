#ifndef EQUIPROJ_SVG_HPP
#define EQUIPROJ_SVG_HPP

// Scatter plot plus marching-squares contours of a scalar field, as SVG.

#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "equiproj/defect.hpp"
#include "equiproj/errors.hpp"
#include "equiproj/io.hpp"

namespace equiproj::svg {

struct Bounds {
  double xmin = -3.5, xmax = 3.5, ymin = -3.5, ymax = 3.5;
};

/// values[iy * n + ix] = f(x_ix, y_iy) on an n x n lattice covering bounds.
struct ScalarGrid {
  Bounds bounds;
  std::size_t n = 0;
  std::vector<double> values;

  double x(std::size_t ix) const { return bounds.xmin + (bounds.xmax - bounds.xmin) * static_cast<double>(ix) / static_cast<double>(n - 1); }
  double y(std::size_t iy) const { return bounds.ymin + (bounds.ymax - bounds.ymin) * static_cast<double>(iy) / static_cast<double>(n - 1); }
  double at(std::size_t ix, std::size_t iy) const { return values[iy * n + ix]; }
};

/// Evaluates a batched field on the lattice in one call.
inline ScalarGrid sample_grid(const std::function<std::vector<double>(const std::vector<Point>&)>& field,
                              Bounds b, std::size_t n = 200) {
  if (n < 2) throw InvalidArgument("sample_grid: need at least 2 samples per axis");
  ScalarGrid g{b, n, {}};
  std::vector<Point> pts;
  pts.reserve(n * n);
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) pts.push_back({g.x(ix), g.y(iy)});
  g.values = field(pts);
  if (g.values.size() != n * n) throw InvalidArgument("sample_grid: field returned wrong number of values");
  return g;
}

struct Segment {
  Point a, b;
};

/// Marching squares; saddle cells are resolved by the cell-centre average.
inline std::vector<Segment> contour_segments(const ScalarGrid& g, double level) {
  std::vector<Segment> out;
  for (std::size_t iy = 0; iy + 1 < g.n; ++iy)
    for (std::size_t ix = 0; ix + 1 < g.n; ++ix) {
      const double v[4] = {g.at(ix, iy) - level, g.at(ix + 1, iy) - level, g.at(ix + 1, iy + 1) - level,
                           g.at(ix, iy + 1) - level};
      const Point c[4] = {{g.x(ix), g.y(iy)}, {g.x(ix + 1), g.y(iy)}, {g.x(ix + 1), g.y(iy + 1)}, {g.x(ix), g.y(iy + 1)}};
      int code = 0;
      for (int k = 0; k < 4; ++k)
        if (v[k] >= 0.0) code |= 1 << k;
      if (code == 0 || code == 15) continue;
      const auto edge = [&](int e) {
        const int a = e, b = (e + 1) % 4;
        const double t = v[a] / (v[a] - v[b]);
        return Point{c[a][0] + t * (c[b][0] - c[a][0]), c[a][1] + t * (c[b][1] - c[a][1])};
      };
      std::vector<int> crossing;
      for (int e = 0; e < 4; ++e)
        if ((v[e] >= 0.0) != (v[(e + 1) % 4] >= 0.0)) crossing.push_back(e);
      if (crossing.size() == 2) {
        out.push_back({edge(crossing[0]), edge(crossing[1])});
      } else if (crossing.size() == 4) {
        const bool centre = (v[0] + v[1] + v[2] + v[3]) >= 0.0;
        if (centre == (v[0] >= 0.0)) {
          out.push_back({edge(0), edge(1)});
          out.push_back({edge(2), edge(3)});
        } else {
          out.push_back({edge(3), edge(0)});
          out.push_back({edge(1), edge(2)});
        }
      }
    }
  return out;
}

/// One <circle> per point (fill by label sign) and one <g> per contour level.
inline std::string render(const std::vector<Point>& pts, const std::vector<int>& labels, const ScalarGrid& grid,
                          const std::vector<double>& levels, double width = 600.0) {
  if (pts.size() != labels.size()) throw InvalidArgument("svg::render: points and labels differ in length");
  const Bounds& b = grid.bounds;
  const double height = width * (b.ymax - b.ymin) / (b.xmax - b.xmin);
  const auto sx = [&](double x) { return (x - b.xmin) / (b.xmax - b.xmin) * width; };
  const auto sy = [&](double y) { return height - (y - b.ymin) / (b.ymax - b.ymin) * height; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << io::fmt(width) << "\" height=\"" << io::fmt(height)
     << "\" viewBox=\"0 0 " << io::fmt(width) << ' ' << io::fmt(height) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g class=\"points\">\n";
  for (std::size_t i = 0; i < pts.size(); ++i)
    os << "<circle cx=\"" << io::fmt(sx(pts[i][0])) << "\" cy=\"" << io::fmt(sy(pts[i][1])) << "\" r=\"2.5\" fill=\""
       << (labels[i] == 1 ? "#1f77b4" : "#d62728") << "\"/>\n";
  os << "</g>\n";
  for (double level : levels) {
    os << "<g class=\"contour\" data-level=\"" << io::fmt(level) << "\">\n<path fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" d=\"";
    for (const auto& s : contour_segments(grid, level))
      os << 'M' << io::fmt(sx(s.a[0])) << ',' << io::fmt(sy(s.a[1])) << 'L' << io::fmt(sx(s.b[0])) << ','
         << io::fmt(sy(s.b[1]));
    os << "\"/>\n</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace equiproj::svg

#endif  // EQUIPROJ_SVG_HPP
