#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "cell_integrator.hpp"
#include "error.hpp"
#include "geom_core.hpp"

namespace visprob {

// Lines y = alpha*x - beta meeting both polygons. Membership per polygon is
// min_v(alpha v.x - v.y) <= beta <= max_v(alpha v.x - v.y).
class StabbingRegion {
 public:
  StabbingRegion(ConvexPolygon left, ConvexPolygon right) : left_(std::move(left)), right_(std::move(right)) {
    alpha_min_ = std::numeric_limits<double>::infinity();
    alpha_max_ = -alpha_min_;
    for (const Point& p : left_.vertices()) {
      for (const Point& q : right_.vertices()) {
        const double s = (q.y - p.y) / (q.x - p.x);
        alpha_min_ = std::min(alpha_min_, s);
        alpha_max_ = std::max(alpha_max_, s);
      }
    }
  }

  const ConvexPolygon& left() const { return left_; }
  const ConvexPolygon& right() const { return right_; }
  double alpha_min() const { return alpha_min_; }
  double alpha_max() const { return alpha_max_; }

  static std::pair<double, double> beta_range(const ConvexPolygon& P, double alpha) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Point& v : P.vertices()) {
      const double t = alpha * v.x - v.y;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    return {lo, hi};
  }

  // Envelope description: beta in [lower(alpha), upper(alpha)] when nonempty.
  double lower(double alpha) const { return std::max(beta_range(left_, alpha).first, beta_range(right_, alpha).first); }
  double upper(double alpha) const {
    return std::min(beta_range(left_, alpha).second, beta_range(right_, alpha).second);
  }

  bool contains(DualPoint d) const { return line_meets_polygon(d, left_) && line_meets_polygon(d, right_); }

 private:
  ConvexPolygon left_;
  ConvexPolygon right_;
  double alpha_min_{0};
  double alpha_max_{0};
};

// True when P lies entirely left of Q (a vertical line separates them).
inline bool strictly_left_of(const ConvexPolygon& P, const ConvexPolygon& Q, double tol = tolerance()) {
  return P.max_x() < Q.min_x() - tol;
}

inline StabbingRegion stabbing_region(const ConvexPolygon& P1, const ConvexPolygon& P2) {
  if (strictly_left_of(P1, P2)) return StabbingRegion(P1, P2);
  if (strictly_left_of(P2, P1)) return StabbingRegion(P2, P1);
  throw Error(ErrorCode::NotSeparable, "source polygons are not separated by a vertical line");
}

struct Hourglass {
  int obstacle_id{0};
  ConvexPolygon obstacle;

  bool contains(DualPoint d) const { return line_meets_polygon(d, obstacle); }
};

inline Hourglass hourglass(const ConvexPolygon& h, int id = 0) { return Hourglass{id, h}; }

// Boundary-edge marker for the four sides of the working box.
inline constexpr int kBoxEdge = -1;

struct ArrangementCell {
  std::vector<DualPoint> vertices;  // counter-clockwise in (alpha, beta)
  std::vector<DualLine> edge_lines;  // edge k runs vertices[k] -> vertices[k+1]
  std::vector<int> edge_ids;         // dual-line index, or kBoxEdge
  std::array<int, 4> edges{};        // s1, s2 in the left polygon; s3, s4 in the right
  EdgeQuadruple quad{};
  bool blocked{false};
  DualPoint sample;

  double area() const {
    double s = 0;
    const std::size_t n = vertices.size();
    for (std::size_t k = 0; k < n; ++k) {
      const DualPoint a = vertices[k], b = vertices[(k + 1) % n];
      s += a.alpha * b.beta - b.alpha * a.beta;
    }
    return 0.5 * s;
  }

  DualPoint centroid() const {
    double cx = 0, cy = 0, s = 0;
    const std::size_t n = vertices.size();
    for (std::size_t k = 0; k < n; ++k) {
      const DualPoint a = vertices[k], b = vertices[(k + 1) % n];
      const double w = a.alpha * b.beta - b.alpha * a.beta;
      cx += (a.alpha + b.alpha) * w;
      cy += (a.beta + b.beta) * w;
      s += w;
    }
    if (s == 0) {
      for (const auto& v : vertices) {
        cx += v.alpha;
        cy += v.beta;
      }
      return {cx / n, cy / n};
    }
    return {cx / (3 * s), cy / (3 * s)};
  }
};

// A standalone convex cell from its corners (edge lines taken from the corners).
inline ArrangementCell make_cell(std::vector<DualPoint> corners) {
  ArrangementCell c;
  c.vertices = std::move(corners);
  if (c.area() < 0) std::reverse(c.vertices.begin(), c.vertices.end());
  const std::size_t n = c.vertices.size();
  for (std::size_t k = 0; k < n; ++k) {
    const DualPoint a = c.vertices[k], b = c.vertices[(k + 1) % n];
    const double A = b.alpha != a.alpha ? (b.beta - a.beta) / (b.alpha - a.alpha) : 0.0;
    c.edge_lines.push_back({A, a.beta - A * a.alpha});
    c.edge_ids.push_back(kBoxEdge);
  }
  c.sample = c.centroid();
  return c;
}

// Vertical-slab split of a convex cell: one spline between consecutive
// distinct vertex alphas, bounded by one lower and one upper edge.
inline std::vector<VerticalSpline> decompose_cell(const ArrangementCell& c) {
  std::vector<VerticalSpline> out;
  const std::size_t n = c.vertices.size();
  if (n < 3) return out;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& v : c.vertices) {
    lo = std::min(lo, v.alpha);
    hi = std::max(hi, v.alpha);
  }
  const double eps = 1e-14 * std::max({1.0, std::abs(lo), std::abs(hi)});
  std::vector<double> xs;
  for (const auto& v : c.vertices) xs.push_back(v.alpha);
  std::sort(xs.begin(), xs.end());
  std::vector<double> cuts;
  for (double x : xs) {
    if (cuts.empty() || x - cuts.back() > eps) cuts.push_back(x);
  }
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a1 = cuts[s], a2 = cuts[s + 1];
    const double m = 0.5 * (a1 + a2);
    std::optional<DualLine> bottom, top;
    for (std::size_t k = 0; k < n; ++k) {
      const DualPoint u = c.vertices[k], v = c.vertices[(k + 1) % n];
      if (std::abs(v.alpha - u.alpha) <= eps) continue;
      if (m < std::min(u.alpha, v.alpha) || m > std::max(u.alpha, v.alpha)) continue;
      if (v.alpha > u.alpha) {
        bottom = c.edge_lines[k];
      } else {
        top = c.edge_lines[k];
      }
    }
    if (!bottom || !top) continue;
    out.push_back({a1, a2, *bottom, *top});
  }
  return out;
}

struct ArrangementOptions {
  // When false, faces already inside some hourglass are not refined by later
  // obstacles; their quadruple is constant anyway. Cuts work, changes counts.
  bool refine_blocked = true;
};

struct Arrangement {
  std::vector<ArrangementCell> cells;
  std::vector<DualLine> lines;
  double alpha_lo{0}, alpha_hi{0}, beta_lo{0}, beta_hi{0};
  bool swapped{false};              // true when P2 lies left of P1
  bool perturbation_applied{false};  // classification is tolerance-based; never perturbs
  double perturbation_magnitude{0};
  std::size_t left_size{0};
  std::size_t right_size{0};
  std::size_t dropped_slivers{0};  // unclassifiable faces of negligible area
};

namespace detail {

struct Face {
  std::vector<DualPoint> v;
  std::vector<int> e;  // line id of edge k (v[k] -> v[k+1]); -1..-4 box sides
  double amin{0}, amax{0}, bmin{0}, bmax{0};
  bool frozen{false};

  void bounds() {
    amin = bmin = std::numeric_limits<double>::infinity();
    amax = bmax = -amin;
    for (const auto& p : v) {
      amin = std::min(amin, p.alpha);
      amax = std::max(amax, p.alpha);
      bmin = std::min(bmin, p.beta);
      bmax = std::max(bmax, p.beta);
    }
  }

  double area() const {
    double s = 0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const auto& a = v[k];
      const auto& b = v[(k + 1) % v.size()];
      s += a.alpha * b.beta - b.alpha * a.beta;
    }
    return 0.5 * s;
  }
};

class FaceSplitter {
 public:
  FaceSplitter(const std::vector<DualLine>& lines, double a0, double a1, double b0, double b1)
      : lines_(lines), a0_(a0), a1_(a1), b0_(b0), b1_(b1) {
    const double extent = std::max({a1 - a0, b1 - b0, std::abs(a0), std::abs(a1), std::abs(b0), std::abs(b1)});
    tol_ = 1e-12 * extent;
    min_area_ = 1e-26 * (a1 - a0) * (b1 - b0);
    Face f;
    f.v = {{a0, b0}, {a1, b0}, {a1, b1}, {a0, b1}};
    f.e = {-1, -2, -3, -4};
    f.bounds();
    faces_.push_back(std::move(f));
  }

  std::vector<Face>& faces() { return faces_; }

  void insert(int id) {
    const DualLine L = lines_[static_cast<std::size_t>(id)];
    const double scale = std::sqrt(1 + L.A * L.A);
    std::vector<Face> next;
    next.reserve(faces_.size() + 8);
    for (auto& f : faces_) {
      if (f.frozen || !maybe_crosses(f, L, scale)) {
        next.push_back(std::move(f));
        continue;
      }
      split(f, id, L, scale, next);
    }
    faces_ = std::move(next);
  }

  template <typename Keep>
  void cull(Keep keep) {
    std::vector<Face> next;
    next.reserve(faces_.size());
    for (auto& f : faces_) {
      if (keep(f)) next.push_back(std::move(f));
    }
    faces_ = std::move(next);
  }

  DualLine support(int id) const {
    if (id >= 0) return lines_[static_cast<std::size_t>(id)];
    if (id == -1) return {0, b0_};
    if (id == -3) return {0, b1_};
    return {0, 0};  // vertical box side; never used as a spline bound
  }

 private:
  bool maybe_crosses(const Face& f, const DualLine& L, double scale) const {
    const double y0 = L.at(f.amin), y1 = L.at(f.amax);
    const double pad = tol_ * scale;
    if (std::min(y0, y1) > f.bmax + pad) return false;
    if (std::max(y0, y1) < f.bmin - pad) return false;
    return true;
  }

  DualPoint intersect(int edge_id, DualPoint p, DualPoint q, const DualLine& L) const {
    if (edge_id == -2 || edge_id == -4) {
      const double a = edge_id == -2 ? a1_ : a0_;
      return {a, L.at(a)};
    }
    const DualLine E = support(edge_id);
    const double den = E.A - L.A;
    if (den != 0) {
      const double a = (L.B - E.B) / den;
      const double lo = std::min(p.alpha, q.alpha), hi = std::max(p.alpha, q.alpha);
      if (a >= lo && a <= hi) return {a, edge_id >= 0 ? E.at(a) : E.B};
    }
    // fall back to interpolation along the edge
    const double sp = p.beta - L.at(p.alpha), sq = q.beta - L.at(q.alpha);
    const double t = sp / (sp - sq);
    return {p.alpha + t * (q.alpha - p.alpha), p.beta + t * (q.beta - p.beta)};
  }

  void split(Face& f, int id, const DualLine& L, double scale, std::vector<Face>& out) const {
    const std::size_t n = f.v.size();
    std::vector<int> cls(n);
    bool pos = false, neg = false;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = (f.v[k].beta - L.at(f.v[k].alpha)) / scale;
      cls[k] = s > tol_ ? 1 : (s < -tol_ ? -1 : 0);
      pos |= cls[k] > 0;
      neg |= cls[k] < 0;
    }
    if (!pos || !neg) {
      out.push_back(std::move(f));
      return;
    }
    // Augmented cycle: original vertices plus crossing points, each entry
    // carrying the id of the edge that leaves it.
    struct Node {
      DualPoint p;
      int cls;
      int edge;
    };
    std::vector<Node> cyc;
    cyc.reserve(n + 2);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t k1 = (k + 1) % n;
      cyc.push_back({f.v[k], cls[k], f.e[k]});
      if (cls[k] * cls[k1] < 0) cyc.push_back({intersect(f.e[k], f.v[k], f.v[k1], L), 0, f.e[k]});
    }
    for (int side : {1, -1}) {
      Face g;
      const std::size_t m = cyc.size();
      for (std::size_t k = 0; k < m; ++k) {
        if (cyc[k].cls == -side) continue;
        const Node& nx = cyc[(k + 1) % m];
        g.v.push_back(cyc[k].p);
        g.e.push_back(nx.cls == -side ? id : cyc[k].edge);
      }
      // consecutive entries leaving the kept side both sit on L; merge runs
      clean(g);
      if (g.v.size() >= 3 && g.area() > min_area_) {
        g.bounds();
        out.push_back(std::move(g));
      }
    }
  }

  void clean(Face& g) const {
    // drop coincident consecutive vertices
    std::vector<DualPoint> v;
    std::vector<int> e;
    const std::size_t n = g.v.size();
    for (std::size_t k = 0; k < n; ++k) {
      const DualPoint a = g.v[k];
      if (!v.empty()) {
        const DualPoint b = v.back();
        if (std::abs(a.alpha - b.alpha) <= tol_ && std::abs(a.beta - b.beta) <= tol_) {
          e.back() = g.e[k];
          continue;
        }
      }
      v.push_back(a);
      e.push_back(g.e[k]);
    }
    while (v.size() > 1 && std::abs(v.front().alpha - v.back().alpha) <= tol_ &&
           std::abs(v.front().beta - v.back().beta) <= tol_) {
      v.pop_back();
      e.pop_back();
    }
    g.v = std::move(v);
    g.e = std::move(e);
  }

  const std::vector<DualLine>& lines_;
  double a0_, a1_, b0_, b1_;
  double tol_{0};
  double min_area_{0};
  std::vector<Face> faces_;
};

inline bool annotate_polygon(const ConvexPolygon& P, DualPoint d, int& s_lo, int& s_hi) {
  const std::size_t n = P.size();
  int found[2] = {-1, -1};
  double xs[2] = {0, 0};
  int cnt = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = P[k], b = P.vertex(k + 1);
    const double fa = a.y - (d.alpha * a.x - d.beta);
    const double fb = b.y - (d.alpha * b.x - d.beta);
    if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) {
      if (cnt == 2) return false;
      found[cnt] = static_cast<int>(k);
      xs[cnt] = a.x + (b.x - a.x) * fa / (fa - fb);
      ++cnt;
    } else if (fa == 0 || fb == 0) {
      return false;
    }
  }
  if (cnt != 2) return false;
  if (xs[0] <= xs[1]) {
    s_lo = found[0];
    s_hi = found[1];
  } else {
    s_lo = found[1];
    s_hi = found[0];
  }
  return true;
}

}  // namespace detail

// Edge quadruple of the (left, right) pair met by the primal line of d; false
// when d is not strictly inside the stabbing region.
inline bool edge_quadruple_at(const ConvexPolygon& left, const ConvexPolygon& right, DualPoint d,
                              std::array<int, 4>& edges, EdgeQuadruple& quad) {
  if (!detail::annotate_polygon(left, d, edges[0], edges[1])) return false;
  if (!detail::annotate_polygon(right, d, edges[2], edges[3])) return false;
  for (int k = 0; k < 4; ++k) {
    const ConvexPolygon& P = k < 2 ? left : right;
    const Segment s = P.edge(static_cast<std::size_t>(edges[static_cast<std::size_t>(k)]));
    quad[static_cast<std::size_t>(k)] = s.line;
  }
  return true;
}

inline void validate_case_one(const ConvexPolygon& left, const ConvexPolygon& right,
                              const std::vector<ConvexPolygon>& obstacles) {
  const double tol = tolerance();
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const auto& h = obstacles[i];
    if (!(h.min_x() > left.max_x() + tol && h.max_x() < right.min_x() - tol)) {
      throw Error(ErrorCode::ObstacleOutsideSlab,
                  "obstacle " + std::to_string(i) + " is not strictly inside the vertical slab between the sources");
    }
  }
}

inline Arrangement build_arrangement(const ConvexPolygon& P1, const ConvexPolygon& P2,
                                     const std::vector<ConvexPolygon>& obstacles,
                                     const ArrangementOptions& opt = {}) {
  const StabbingRegion L = stabbing_region(P1, P2);
  const ConvexPolygon& left = L.left();
  const ConvexPolygon& right = L.right();
  validate_case_one(left, right, obstacles);

  Arrangement arr;
  arr.swapped = !strictly_left_of(P1, P2);
  arr.left_size = left.size();
  arr.right_size = right.size();

  // Box around the stabbing region; beta is linear in alpha per vertex, so
  // its extremes over the alpha range occur at the range ends.
  double blo = std::numeric_limits<double>::infinity(), bhi = -blo;
  for (double a : {L.alpha_min(), L.alpha_max()}) {
    const auto [lo, hi] = StabbingRegion::beta_range(left, a);
    blo = std::min(blo, lo);
    bhi = std::max(bhi, hi);
  }
  const double aw = L.alpha_max() - L.alpha_min(), bw = bhi - blo;
  const double am = 0.05 * aw + 1e-9 * (1 + std::abs(L.alpha_min()) + std::abs(L.alpha_max()));
  const double bm = 0.05 * bw + 1e-9 * (1 + std::abs(blo) + std::abs(bhi));
  arr.alpha_lo = L.alpha_min() - am;
  arr.alpha_hi = L.alpha_max() + am;
  arr.beta_lo = blo - bm;
  arr.beta_hi = bhi + bm;

  for (const Point& p : left.vertices()) arr.lines.push_back(dual_line_of_point(p));
  for (const Point& p : right.vertices()) arr.lines.push_back(dual_line_of_point(p));
  std::vector<std::pair<int, int>> obstacle_ranges;
  for (const auto& h : obstacles) {
    const int first = static_cast<int>(arr.lines.size());
    for (const Point& p : h.vertices()) arr.lines.push_back(dual_line_of_point(p));
    obstacle_ranges.emplace_back(first, static_cast<int>(arr.lines.size()));
  }

  detail::FaceSplitter fs(arr.lines, arr.alpha_lo, arr.alpha_hi, arr.beta_lo, arr.beta_hi);
  auto face_point = [](const detail::Face& f) {
    double cx = 0, cy = 0, s = 0;
    for (std::size_t k = 0; k < f.v.size(); ++k) {
      const auto& a = f.v[k];
      const auto& b = f.v[(k + 1) % f.v.size()];
      const double w = a.alpha * b.beta - b.alpha * a.beta;
      cx += (a.alpha + b.alpha) * w;
      cy += (a.beta + b.beta) * w;
      s += w;
    }
    return DualPoint{cx / (3 * s), cy / (3 * s)};
  };

  const int nl = static_cast<int>(left.size()), nr = static_cast<int>(right.size());
  for (int id = 0; id < nl; ++id) fs.insert(id);
  fs.cull([&](const detail::Face& f) { return line_meets_polygon(face_point(f), left); });
  for (int id = nl; id < nl + nr; ++id) fs.insert(id);
  fs.cull([&](const detail::Face& f) { return line_meets_polygon(face_point(f), right); });
  for (std::size_t h = 0; h < obstacles.size(); ++h) {
    for (int id = obstacle_ranges[h].first; id < obstacle_ranges[h].second; ++id) fs.insert(id);
    if (!opt.refine_blocked) {
      for (auto& f : fs.faces()) {
        if (!f.frozen && line_meets_polygon(face_point(f), obstacles[h])) f.frozen = true;
      }
    }
  }

  // a sliver can pass the centroid test and be split afterwards; re-check
  fs.cull([&](const detail::Face& f) {
    const DualPoint d = face_point(f);
    return line_meets_polygon(d, left) && line_meets_polygon(d, right);
  });
  const double box_area = (arr.alpha_hi - arr.alpha_lo) * (arr.beta_hi - arr.beta_lo);
  for (auto& f : fs.faces()) {
    ArrangementCell c;
    c.vertices = f.v;
    c.edge_ids = f.e;
    for (int id : f.e) c.edge_lines.push_back(fs.support(id));
    c.sample = face_point(f);
    bool ok = edge_quadruple_at(left, right, c.sample, c.edges, c.quad);
    // centroid on a primal vertex (measure zero); nudge toward a corner
    for (std::size_t t = 0; !ok && t < c.vertices.size(); ++t) {
      const DualPoint alt{0.9 * c.sample.alpha + 0.1 * c.vertices[t].alpha,
                          0.9 * c.sample.beta + 0.1 * c.vertices[t].beta};
      ok = edge_quadruple_at(left, right, alt, c.edges, c.quad);
      if (ok) c.sample = alt;
    }
    if (!ok) {
      // slivers along the region boundary, far below the tolerance scale
      if (std::abs(c.area()) <= 1e-10 * box_area) {
        ++arr.dropped_slivers;
        continue;
      }
      throw Error(ErrorCode::NumericalFailure, "could not classify an arrangement cell");
    }
    for (const auto& h : obstacles) {
      if (line_meets_polygon(c.sample, h)) {
        c.blocked = true;
        break;
      }
    }
    arr.cells.push_back(std::move(c));
  }
  return arr;
}

}  // namespace visprob
