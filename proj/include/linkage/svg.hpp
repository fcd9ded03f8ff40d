#ifndef LINKAGE_SVG_HPP
#define LINKAGE_SVG_HPP

#include "linkage/model.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>

namespace linkage {

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v == 0.0 ? 0.0 : v);
  return buf;
}

} // namespace detail

/// Standalone SVG of a realization: bars solid, marked diagonals dashed,
/// base vertices as filled squares, movable vertices as open circles.
/// Drawn y-up; the viewBox is padded by 10% of the bounding box.
inline std::string render_svg(const LinkageSpec &spec, const std::map<VertexId, Point> &at) {
  using detail::num;
  double minx = 0, maxx = 0, miny = 0, maxy = 0;
  bool first = true;
  for (const auto &[v, p] : at) {
    if (first) {
      minx = maxx = p.x();
      miny = maxy = p.y();
      first = false;
    }
    minx = std::min(minx, p.x());
    maxx = std::max(maxx, p.x());
    miny = std::min(miny, p.y());
    maxy = std::max(maxy, p.y());
  }
  double w = maxx - minx, h = maxy - miny;
  const double diameter = std::max(w, h) > 0.0 ? std::max(w, h) : 1.0;
  const double padx = 0.1 * (w > 0 ? w : diameter), pady = 0.1 * (h > 0 ? h : diameter);
  const double stroke = diameter / 150.0;
  const double marker = diameter / 40.0;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num(minx - padx) << ' ' << num(-(maxy + pady)) << ' '
     << num(w + 2 * padx) << ' ' << num(h + 2 * pady) << "\">\n";
  os << "<g transform=\"scale(1,-1)\" stroke-linecap=\"round\">\n";
  auto segment = [&](const VertexId &a, const VertexId &b, const char *cls, const std::string &extra) {
    const Point &p = at.at(a), &q = at.at(b);
    os << "<line class=\"" << cls << "\" x1=\"" << num(p.x()) << "\" y1=\"" << num(p.y()) << "\" x2=\"" << num(q.x())
       << "\" y2=\"" << num(q.y()) << "\" stroke=\"black\" stroke-width=\"" << num(stroke) << '"' << extra << "/>\n";
  };
  for (const auto &e : spec.edges) segment(e.a, e.b, "bar", "");
  for (const auto &d : spec.diagonals)
    segment(d.a, d.b, "diagonal", " stroke-dasharray=\"" + num(4 * stroke) + ' ' + num(3 * stroke) + '"');
  for (const auto &v : spec.vertices) {
    const Point &p = at.at(v);
    if (spec.is_base(v))
      os << "<rect class=\"base\" x=\"" << num(p.x() - marker / 2) << "\" y=\"" << num(p.y() - marker / 2)
         << "\" width=\"" << num(marker) << "\" height=\"" << num(marker) << "\" fill=\"black\"/>\n";
    else
      os << "<circle class=\"joint\" cx=\"" << num(p.x()) << "\" cy=\"" << num(p.y()) << "\" r=\"" << num(marker / 3)
         << "\" fill=\"white\" stroke=\"black\" stroke-width=\"" << num(stroke) << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

} // namespace linkage

#endif // LINKAGE_SVG_HPP
