#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "dual_arrangement.hpp"
#include "gaussian_approx.hpp"
#include "geom_core.hpp"

namespace visprob::svg {

// Geometry is written in scene coordinates; a group transform flips y and
// scales to the viewport, so coordinates in the file can be read back as-is.
class Document {
 public:
  void include(Point p) {
    lo_.x = std::min(lo_.x, p.x);
    lo_.y = std::min(lo_.y, p.y);
    hi_.x = std::max(hi_.x, p.x);
    hi_.y = std::max(hi_.y, p.y);
  }
  void include(const std::vector<Point>& pts) {
    for (Point p : pts) include(p);
  }

  void polygon(const std::vector<Point>& pts, const std::string& style) {
    include(pts);
    body_ << "<polygon points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " " : "") << num(pts[i].x) << ',' << num(pts[i].y);
    body_ << "\" " << style << "/>\n";
  }

  void circle(Point c, double r, const std::string& style) {
    include({c.x - r, c.y - r});
    include({c.x + r, c.y + r});
    body_ << "<circle cx=\"" << num(c.x) << "\" cy=\"" << num(c.y) << "\" r=\"" << num(r) << "\" " << style << "/>\n";
  }

  void raw(const std::string& s) { body_ << s; }

  std::string str(double width = 800) const {
    Point lo = lo_, hi = hi_;
    if (!(lo.x <= hi.x)) lo = hi = {0, 0};
    const double span = std::max({hi.x - lo.x, hi.y - lo.y, 1e-12});
    const double pad = 0.05 * span;
    const double s = width / (span + 2 * pad);
    const double w = (hi.x - lo.x + 2 * pad) * s, h = (hi.y - lo.y + 2 * pad) * s;
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
        << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n"
        << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
           "patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#555\" "
           "stroke-width=\"1\"/></pattern></defs>\n"
        << "<g transform=\"translate(" << num((pad - lo.x) * s) << ' ' << num((hi.y + pad) * s) << ") scale("
        << num(s) << ' ' << num(-s) << ")\" stroke-width=\"" << num(1.0 / s) << "\">\n"
        << body_.str() << "</g>\n</svg>\n";
    return out.str();
  }

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
  }

 private:
  Point lo_{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point hi_{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  std::ostringstream body_;
};

inline std::string opacity(double w, double w_max) {
  return Document::num(std::clamp(w_max > 0 ? w / w_max : 0.0, 0.05, 1.0));
}

inline void add_disks(Document& doc, const DiskApproximation& d) {
  const double top = d.w.front();
  for (int i = d.k; i >= 1; --i) {
    doc.circle(d.center, d.r_at(i),
               "fill=\"#1f77b4\" fill-opacity=\"" + opacity(d.w_at(i), top) + "\" stroke=\"#1f77b4\"");
  }
}

inline void add_polygons(Document& doc, const PolygonApproximation& M) {
  if (M.pairs.empty()) return;
  const double top = M.pairs.front().weight;
  for (auto it = M.pairs.rbegin(); it != M.pairs.rend(); ++it) {
    const std::string op = opacity(it->weight, top);
    doc.polygon(it->outer.vertices(), "fill=\"#1f77b4\" fill-opacity=\"" + op + "\" stroke=\"#1f77b4\"");
    doc.polygon(it->inner.vertices(), "fill=\"#1f77b4\" fill-opacity=\"" + op + "\" stroke=\"#0b3c61\"");
  }
}

inline void add_source(Document& doc, const ConvexPolygon& P) {
  doc.polygon(P.vertices(), "fill=\"#2ca02c\" fill-opacity=\"0.5\" stroke=\"#145214\"");
}

inline void add_obstacle(Document& doc, const ConvexPolygon& h) {
  doc.polygon(h.vertices(), "fill=\"#d62728\" fill-opacity=\"0.7\" stroke=\"#7a1414\"");
}

// Dual-plane picture: free cells white, blocked cells grey, hourglasses
// hatched over the arrangement box.
inline std::string arrangement_svg(const Arrangement& arr, const std::vector<ConvexPolygon>& obstacles) {
  Document doc;
  for (const auto& c : arr.cells) {
    std::vector<Point> pts;
    for (const auto& v : c.vertices) pts.push_back({v.alpha, v.beta});
    doc.polygon(pts, c.blocked ? "fill=\"#999\" stroke=\"#333\"" : "fill=\"#fff\" stroke=\"#333\"");
  }
  // hourglass of h clipped to the box, sampled on a fine alpha grid
  const int n = 256;
  for (const auto& h : obstacles) {
    std::vector<Point> lower, upper;
    for (int i = 0; i <= n; ++i) {
      const double a = arr.alpha_lo + (arr.alpha_hi - arr.alpha_lo) * i / n;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (Point v : h.vertices()) {
        lo = std::min(lo, a * v.x - v.y);
        hi = std::max(hi, a * v.x - v.y);
      }
      lower.push_back({a, std::clamp(lo, arr.beta_lo, arr.beta_hi)});
      upper.push_back({a, std::clamp(hi, arr.beta_lo, arr.beta_hi)});
    }
    std::vector<Point> ring(lower);
    ring.insert(ring.end(), upper.rbegin(), upper.rend());
    doc.polygon(ring, "fill=\"url(#hatch)\" stroke=\"none\"");
  }
  return doc.str();
}

}  // namespace visprob::svg
