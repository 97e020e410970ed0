#include "hodomap/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace hodomap {

namespace {

std::string f3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  // avoid "-0.000"
  return std::string(buf) == "-0.000" ? "0.000" : buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '<') out += "&lt;";
    else if (ch == '>') out += "&gt;";
    else if (ch == '&') out += "&amp;";
    else out += ch;
  }
  return out;
}

/// Affine map of a world rectangle onto a screen box, y up.
struct Frame {
  Rect world;
  double x0, y0, size_x, size_y;
  Point operator()(Point p) const {
    return {x0 + (p.real() - world.x0) / world.width() * size_x,
            y0 + (world.y1 - p.imag()) / world.height() * size_y};
  }
};

Frame fit(Rect world, double x0, double y0, double w, double h) {
  double s = std::min(w / world.width(), h / world.height());
  double sx = world.width() * s, sy = world.height() * s;
  return {world, x0 + 0.5 * (w - sx), y0 + 0.5 * (h - sy), sx, sy};
}

std::string path(const std::vector<Point>& pts, const Frame& f, bool closed) {
  std::ostringstream d;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Point q = f(pts[i]);
    d << (i ? " L" : "M") << f3(q.real()) << ' ' << f3(q.imag());
  }
  if (closed) d << " Z";
  return d.str();
}

}  // namespace

std::string emit_figure(const FigureData& data) {
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\" width=\"1000\" "
         "height=\"1000\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n";

  Rect world{-1, 1, -1, 1};
  if (!data.boundary.empty()) {
    world = {1e300, -1e300, 1e300, -1e300};
    for (Point p : data.boundary) {
      world.x0 = std::min(world.x0, p.real()), world.x1 = std::max(world.x1, p.real());
      world.y0 = std::min(world.y0, p.imag()), world.y1 = std::max(world.y1, p.imag());
    }
    world = world.dilated(0.05 * std::max(world.width(), world.height()));
  }
  Frame f = fit(world, 40, 40, 920, 920);

  svg << "<g id=\"domain\">\n";
  if (!data.boundary.empty())
    svg << "<path class=\"boundary\" d=\"" << path(data.boundary, f, true)
        << "\" fill=\"#f4f4f4\" stroke=\"black\" stroke-width=\"2\"/>\n";
  svg << "</g>\n<g id=\"region\">\n";
  if (data.region)
    svg << "<path class=\"region\" d=\"" << path(*data.region, f, true)
        << "\" fill=\"#cfe3f7\" fill-opacity=\"0.6\" stroke=\"#1f5f9f\" stroke-width=\"1.5\"/>\n";
  svg << "</g>\n<g id=\"levels\">\n";
  for (const auto& curve : data.levels)
    svg << "<path class=\"level\" d=\"" << path(curve, f, false)
        << "\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1\"/>\n";
  svg << "</g>\n<g id=\"critical\">\n";
  for (Point p : data.critical) {
    Point q = f(p);
    svg << "<circle class=\"marker\" cx=\"" << f3(q.real()) << "\" cy=\"" << f3(q.imag())
        << "\" r=\"6\" fill=\"#2e8b57\" stroke=\"black\"/>\n";
  }
  svg << "</g>\n";

  if (data.image) {
    const Rect& r = *data.image;
    Frame g = fit(r.dilated(0.1 * std::max(r.width(), r.height())), 720, 30, 250, 250);
    Point lo = g({r.x0, r.y1}), hi = g({r.x1, r.y0});
    svg << "<g id=\"image\">\n<rect x=\"720\" y=\"30\" width=\"250\" height=\"250\" fill=\"white\" "
           "stroke=\"#999999\"/>\n";
    svg << "<rect class=\"image-rect\" x=\"" << f3(lo.real()) << "\" y=\"" << f3(lo.imag())
        << "\" width=\"" << f3(hi.real() - lo.real()) << "\" height=\"" << f3(hi.imag() - lo.imag())
        << "\" fill=\"#cfe3f7\" stroke=\"#1f5f9f\"/>\n";
    for (Point p : data.image_critical) {
      Point q = g(p);
      svg << "<circle class=\"marker-image\" cx=\"" << f3(q.real()) << "\" cy=\"" << f3(q.imag())
          << "\" r=\"4\" fill=\"#8e44ad\"/>\n";
    }
    svg << "</g>\n";
  }
  if (!data.warnings.empty()) {
    svg << "<g id=\"warnings\">\n";
    for (std::size_t i = 0; i < data.warnings.size(); ++i)
      svg << "<text x=\"40\" y=\"" << 980 - 20 * static_cast<int>(data.warnings.size() - 1 - i)
          << "\" font-family=\"monospace\" font-size=\"14\" fill=\"#b00000\">" << escape(data.warnings[i])
          << "</text>\n";
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace hodomap
