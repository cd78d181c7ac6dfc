#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "error.hpp"

namespace visprob {

// ---------------------------------------------------------------------------
// Tolerance. One global incidence epsilon in scene units; VISPROB_TOLERANCE in
// the environment overrides the default the first time it is read.

namespace detail {
inline double initial_tolerance() {
  if (const char* env = std::getenv("VISPROB_TOLERANCE")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && std::isfinite(v) && v > 0) return v;
  }
  return 1e-9;
}
inline std::atomic<double>& tolerance_slot() {
  static std::atomic<double> slot{initial_tolerance()};
  return slot;
}
}  // namespace detail

inline double tolerance() { return detail::tolerance_slot().load(std::memory_order_relaxed); }

inline void set_tolerance(double tol) {
  if (!(tol > 0) || !std::isfinite(tol)) throw Error(ErrorCode::InvalidInput, "tolerance must be positive");
  detail::tolerance_slot().store(tol, std::memory_order_relaxed);
}

// ---------------------------------------------------------------------------

struct Point {
  double x{0};
  double y{0};

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }
inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// a*x + b*y + c = 0, kept with max(|a|,|b|) = 1 and the first nonzero of (a, b)
// positive.
struct LineCoefficients {
  double a{0};
  double b{1};
  double c{0};

  static LineCoefficients canonical(double a, double b, double c) {
    const double s = std::max(std::abs(a), std::abs(b));
    if (!(s > 0) || !std::isfinite(s) || !std::isfinite(c)) {
      throw Error(ErrorCode::InvalidInput, "line needs (a, b) != (0, 0)");
    }
    double k = 1.0 / s;
    if (a < 0 || (a == 0 && b < 0)) k = -k;
    LineCoefficients l{a * k, b * k, c * k};
    if (l.a == 0) l.a = 0.0;  // drop -0
    if (l.b == 0) l.b = 0.0;
    return l;
  }

  static LineCoefficients through(Point p, Point q) {
    const double a = q.y - p.y;
    const double b = p.x - q.x;
    // c from the midpoint halves the rounding asymmetry between p and q
    const Point m = 0.5 * (p + q);
    return canonical(a, b, -(a * m.x + b * m.y));
  }

  double eval(Point p) const { return a * p.x + b * p.y + c; }
  double distance(Point p) const { return std::abs(eval(p)) / std::hypot(a, b); }
  bool is_vertical() const { return b == 0; }
};

struct Segment {
  Point p;
  Point q;
  LineCoefficients line;

  Segment() = default;
  Segment(Point a, Point b) : p(a), q(b) {
    if (!is_finite(a) || !is_finite(b)) throw Error(ErrorCode::InvalidInput, "segment endpoints must be finite");
    if (a == b) throw Error(ErrorCode::InvalidInput, "segment endpoints must be distinct");
    line = LineCoefficients::through(a, b);
  }
};

class ConvexPolygon {
 public:
  ConvexPolygon() = default;

  // Accepts either orientation; stores counter-clockwise.
  explicit ConvexPolygon(std::vector<Point> vertices) : v_(std::move(vertices)) {
    if (v_.size() < 3) throw Error(ErrorCode::InvalidPolygon, "polygon needs at least 3 vertices");
    for (const Point& p : v_) {
      if (!is_finite(p)) throw Error(ErrorCode::InvalidPolygon, "non-finite vertex");
    }
    double twice = 0;
    for (std::size_t i = 0; i < v_.size(); ++i) twice += cross(v_[i], v_[(i + 1) % v_.size()]);
    if (twice < 0) {
      std::reverse(v_.begin(), v_.end());
      twice = -twice;
    }
    area_ = 0.5 * twice;

    for (std::size_t i = 0; i < v_.size(); ++i) {
      for (std::size_t j = i + 1; j < v_.size(); ++j) {
        if (v_[i] == v_[j]) throw Error(ErrorCode::InvalidPolygon, "repeated vertex");
      }
    }
    const std::size_t n = v_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = v_[i], b = v_[(i + 1) % n], c = v_[(i + 2) % n];
      const double len = norm(b - a) * norm(c - b);
      // sine of the turning angle; collinear or reflex triples are rejected
      if (!(orient(a, b, c) > 1e-12 * len)) {
        throw Error(ErrorCode::InvalidPolygon, "polygon is not strictly convex (collinear or reflex vertex)");
      }
    }
    // winding once: total turning is 2*pi for a simple convex polygon
    double turning = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Point e0 = v_[(i + 1) % n] - v_[i];
      const Point e1 = v_[(i + 2) % n] - v_[(i + 1) % n];
      turning += std::atan2(cross(e0, e1), dot(e0, e1));
    }
    if (std::abs(turning - 2 * M_PI) > 1e-6) throw Error(ErrorCode::InvalidPolygon, "polygon is self-intersecting");
    if (!(area_ > 0)) throw Error(ErrorCode::InvalidPolygon, "polygon has zero area");
  }

  const std::vector<Point>& vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }
  const Point& operator[](std::size_t i) const { return v_[i]; }
  Point vertex(std::size_t i) const { return v_[i % v_.size()]; }
  Segment edge(std::size_t i) const { return Segment(v_[i], v_[(i + 1) % v_.size()]); }
  double area() const { return area_; }

  double min_x() const { return extreme([](Point p) { return p.x; }, false); }
  double max_x() const { return extreme([](Point p) { return p.x; }, true); }
  double min_y() const { return extreme([](Point p) { return p.y; }, false); }
  double max_y() const { return extreme([](Point p) { return p.y; }, true); }

  Point centroid() const {
    double cx = 0, cy = 0;
    const std::size_t n = v_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = v_[i], b = v_[(i + 1) % n];
      const double w = cross(a, b);
      cx += (a.x + b.x) * w;
      cy += (a.y + b.y) * w;
    }
    return {cx / (6 * area_), cy / (6 * area_)};
  }

  // Closed containment with tolerance `tol` (distance units).
  bool contains(Point p, double tol = tolerance()) const {
    const std::size_t n = v_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = v_[i], b = v_[(i + 1) % n];
      if (cross(b - a, p - a) < -tol * norm(b - a)) return false;
    }
    return true;
  }

  bool strictly_contains(Point p, double tol = tolerance()) const {
    const std::size_t n = v_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = v_[i], b = v_[(i + 1) % n];
      if (cross(b - a, p - a) <= tol * norm(b - a)) return false;
    }
    return true;
  }

  ConvexPolygon translated(Point d) const {
    std::vector<Point> w;
    w.reserve(v_.size());
    for (const Point& p : v_) w.push_back(p + d);
    return ConvexPolygon(std::move(w));
  }

  template <typename F>
  ConvexPolygon mapped(F&& f) const {
    std::vector<Point> w;
    w.reserve(v_.size());
    for (const Point& p : v_) w.push_back(f(p));
    return ConvexPolygon(std::move(w));
  }

 private:
  template <typename F>
  double extreme(F key, bool want_max) const {
    double best = key(v_.front());
    for (const Point& p : v_) best = want_max ? std::max(best, key(p)) : std::min(best, key(p));
    return best;
  }

  std::vector<Point> v_;
  double area_{0};
};

inline ConvexPolygon regular_polygon(Point center, double circumradius, int n, double phase = 0.0) {
  if (n < 3 || !(circumradius > 0)) throw Error(ErrorCode::InvalidPolygon, "regular polygon needs n >= 3 and r > 0");
  std::vector<Point> v;
  v.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = phase + 2 * M_PI * i / n;
    v.push_back({center.x + circumradius * std::cos(t), center.y + circumradius * std::sin(t)});
  }
  return ConvexPolygon(std::move(v));
}

inline ConvexPolygon axis_box(double x0, double y0, double x1, double y1) {
  return ConvexPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

// ---------------------------------------------------------------------------
// Duality: dual point (alpha, beta) is the primal line y = alpha*x - beta.

struct DualPoint {
  double alpha{0};
  double beta{0};
};

// beta = A*alpha + B
struct DualLine {
  double A{0};
  double B{0};

  double at(double alpha) const { return A * alpha + B; }
};

inline DualPoint dual_of_line(const LineCoefficients& raw) {
  const LineCoefficients l = LineCoefficients::canonical(raw.a, raw.b, raw.c);
  if (l.b == 0) throw Error(ErrorCode::VerticalLine, "vertical line has no dual point");
  return {-l.a / l.b, l.c / l.b};
}

inline DualLine dual_line_of_point(Point p) { return {p.x, -p.y}; }

// Primal line of a dual point, in canonical form.
inline LineCoefficients primal_line(DualPoint d) { return LineCoefficients::canonical(d.alpha, -1.0, -d.beta); }

// ---------------------------------------------------------------------------
// Predicates.

// Projection of a point set onto an axis.
inline std::pair<double, double> project(const std::vector<Point>& pts, Point axis) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Point& p : pts) {
    const double t = dot(p, axis);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return {lo, hi};
}

// Closed intersection test (touching counts) by separating axes.
inline bool segment_intersects_polygon(const Segment& s, const ConvexPolygon& P, double tol = tolerance()) {
  const std::vector<Point> seg{s.p, s.q};
  auto separated = [&](Point axis) {
    const double len = norm(axis);
    if (len == 0) return false;
    const Point u = (1.0 / len) * axis;
    const auto [a0, a1] = project(seg, u);
    const auto [b0, b1] = project(P.vertices(), u);
    return a1 < b0 - tol || b1 < a0 - tol;
  };
  const std::size_t n = P.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point e = P.vertex(i + 1) - P.vertex(i);
    if (separated({-e.y, e.x})) return false;
  }
  const Point d = s.q - s.p;
  return !separated({-d.y, d.x});
}

// Closed test: does primal line y = alpha*x - beta meet P?
inline bool line_meets_polygon(DualPoint d, const ConvexPolygon& P) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Point& v : P.vertices()) {
    const double t = d.alpha * v.x - v.y;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return lo <= d.beta && d.beta <= hi;
}

inline bool segments_intersect(Point a, Point b, Point c, Point d, double tol = tolerance()) {
  const double d1 = orient(c, d, a), d2 = orient(c, d, b);
  const double d3 = orient(a, b, c), d4 = orient(a, b, d);
  const double s1 = tol * norm(d - c), s2 = tol * norm(b - a);
  auto sgn = [](double v, double t) { return v > t ? 1 : (v < -t ? -1 : 0); };
  const int o1 = sgn(d1, s1), o2 = sgn(d2, s1), o3 = sgn(d3, s2), o4 = sgn(d4, s2);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  auto on_seg = [&](Point p, Point q, Point r) {
    return std::min(p.x, q.x) - tol <= r.x && r.x <= std::max(p.x, q.x) + tol &&
           std::min(p.y, q.y) - tol <= r.y && r.y <= std::max(p.y, q.y) + tol;
  };
  if (o1 == 0 && on_seg(c, d, a)) return true;
  if (o2 == 0 && on_seg(c, d, b)) return true;
  if (o3 == 0 && on_seg(a, b, c)) return true;
  if (o4 == 0 && on_seg(a, b, d)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Weighted regions: m(p) = sum of weights of the closed regions containing p.

struct Disk {
  Point center;
  double radius{0};

  bool contains(Point p, double tol = tolerance()) const { return norm(p - center) <= radius + tol; }
  double area() const { return M_PI * radius * radius; }
};

using RegionGeometry = std::variant<Disk, ConvexPolygon>;

struct WeightedRegion {
  RegionGeometry shape;
  double weight{0};
};

class WeightedRegionSet {
 public:
  WeightedRegionSet() = default;

  void add(RegionGeometry shape, double weight) {
    if (!(weight > 0) || !std::isfinite(weight)) throw Error(ErrorCode::InvalidInput, "region weight must be positive");
    regions_.push_back({std::move(shape), weight});
  }

  const std::vector<WeightedRegion>& regions() const { return regions_; }
  bool empty() const { return regions_.empty(); }

  double evaluate(Point p, double tol = tolerance()) const {
    double s = 0;
    for (const auto& r : regions_) {
      const bool in = std::visit([&](const auto& g) { return g.contains(p, tol); }, r.shape);
      if (in) s += r.weight;
    }
    return s;
  }

  // Integral of m over the plane.
  double total_mass() const {
    double s = 0;
    for (const auto& r : regions_) s += r.weight * std::visit([](const auto& g) { return g.area(); }, r.shape);
    return s;
  }

  WeightedRegionSet& append(const WeightedRegionSet& other) {
    regions_.insert(regions_.end(), other.regions_.begin(), other.regions_.end());
    return *this;
  }

 private:
  std::vector<WeightedRegion> regions_;
};

inline double evaluate_region_set(const WeightedRegionSet& M, Point p) { return M.evaluate(p); }

}  // namespace visprob
