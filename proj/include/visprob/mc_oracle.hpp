#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "error.hpp"
#include "gaussian_approx.hpp"
#include "geom_core.hpp"
#include "random.hpp"

namespace visprob {

// Uniform points in a convex polygon. Bounding-box rejection, or an
// area-weighted triangle fan when the box acceptance rate is under 1%.
class ConvexSampler {
 public:
  explicit ConvexSampler(const ConvexPolygon& P) : P_(P) {
    x0_ = P.min_x();
    x1_ = P.max_x();
    y0_ = P.min_y();
    y1_ = P.max_y();
    const double box = (x1_ - x0_) * (y1_ - y0_);
    use_fan_ = P.area() < 0.01 * box;
    if (use_fan_) {
      double acc = 0;
      for (std::size_t i = 1; i + 1 < P.size(); ++i) {
        acc += 0.5 * orient(P[0], P[i], P[i + 1]);
        cumulative_.push_back(acc);
      }
    }
  }

  bool uses_fan() const { return use_fan_; }

  Point operator()(Philox4x32& rng) const {
    if (!use_fan_) {
      for (;;) {
        const Point p{rng.uniform(x0_, x1_), rng.uniform(y0_, y1_)};
        if (P_.contains(p, 0.0)) return p;
      }
    }
    const double t = rng.uniform() * cumulative_.back();
    std::size_t i = 0;
    while (i + 1 < cumulative_.size() && cumulative_[i] < t) ++i;
    double u = rng.uniform(), v = rng.uniform();
    if (u + v > 1) {
      u = 1 - u;
      v = 1 - v;
    }
    const Point a = P_[0], b = P_[i + 1], c = P_[i + 2];
    return a + u * (b - a) + v * (c - a);
  }

 private:
  const ConvexPolygon& P_;
  double x0_, x1_, y0_, y1_;
  bool use_fan_{false};
  std::vector<double> cumulative_;
};

inline bool sees(Point a, Point b, const std::vector<ConvexPolygon>& obstacles) {
  if (a == b) return true;
  const Segment s(a, b);
  for (const auto& h : obstacles) {
    if (segment_intersects_polygon(s, h, 0.0)) return false;
  }
  return true;
}

inline void require_samples(std::uint64_t samples) {
  if (samples < 1000) throw Error(ErrorCode::InvalidInput, "at least 1000 samples required");
}

inline MCEstimate mc_uniform_pair(const ConvexPolygon& P1, const ConvexPolygon& P2,
                                  const std::vector<ConvexPolygon>& obstacles, std::uint64_t samples,
                                  std::uint64_t seed, unsigned threads = mc::default_threads()) {
  require_samples(samples);
  const ConvexSampler s1(P1), s2(P2);
  const auto m = mc::run_batches(
      samples, seed,
      [&](Philox4x32& rng, std::uint64_t count, mc::Moments& acc) {
        for (std::uint64_t i = 0; i < count; ++i) {
          const Point a = s1(rng);
          const Point b = s2(rng);
          const double v = sees(a, b, obstacles) ? 1.0 : 0.0;
          acc.sum += v;
          acc.sum_sq += v;
          ++acc.n;
        }
      },
      threads);
  return mc::bernoulli(m, seed);
}

inline MCEstimate mc_gaussian_pair(const Gaussian& g1, const Gaussian& g2, const std::vector<ConvexPolygon>& obstacles,
                                   std::uint64_t samples, std::uint64_t seed,
                                   unsigned threads = mc::default_threads()) {
  require_samples(samples);
  const auto m = mc::run_batches(
      samples, seed,
      [&](Philox4x32& rng, std::uint64_t count, mc::Moments& acc) {
        for (std::uint64_t i = 0; i < count; ++i) {
          const Point a{g1.center.x + g1.sigma * rng.normal(), g1.center.y + g1.sigma * rng.normal()};
          const Point b{g2.center.x + g2.sigma * rng.normal(), g2.center.y + g2.sigma * rng.normal()};
          const double v = sees(a, b, obstacles) ? 1.0 : 0.0;
          acc.sum += v;
          acc.sum_sq += v;
          ++acc.n;
        }
      },
      threads);
  return mc::bernoulli(m, seed);
}

// Simple polygon (any orientation) with simple holes strictly inside.
class PolygonWithHoles {
 public:
  PolygonWithHoles(std::vector<Point> outer, std::vector<std::vector<Point>> holes = {})
      : outer_(std::move(outer)), holes_(std::move(holes)) {
    check_ring(outer_, "outer boundary");
    for (const auto& h : holes_) check_ring(h, "hole");
    std::vector<std::vector<Point>> rings{outer_};
    rings.insert(rings.end(), holes_.begin(), holes_.end());
    // no two edges of different rings, or non-adjacent edges of one ring, meet
    for (std::size_t r = 0; r < rings.size(); ++r) {
      for (std::size_t s = r; s < rings.size(); ++s) {
        const auto& A = rings[r];
        const auto& B = rings[s];
        for (std::size_t i = 0; i < A.size(); ++i) {
          for (std::size_t j = (r == s ? i + 1 : 0); j < B.size(); ++j) {
            if (r == s && (j == i + 1 || (i == 0 && j + 1 == A.size()))) continue;
            if (segments_intersect(A[i], A[(i + 1) % A.size()], B[j], B[(j + 1) % B.size()], 0.0)) {
              throw Error(ErrorCode::InvalidPolygon, r == s ? "ring is self-intersecting" : "rings intersect");
            }
          }
        }
      }
    }
    for (const auto& h : holes_) {
      if (!inside_ring(outer_, h.front())) throw Error(ErrorCode::InvalidPolygon, "hole outside the outer boundary");
    }
    for (std::size_t a = 0; a < holes_.size(); ++a) {
      for (std::size_t b = 0; b < holes_.size(); ++b) {
        if (a != b && inside_ring(holes_[a], holes_[b].front())) {
          throw Error(ErrorCode::InvalidPolygon, "nested holes");
        }
      }
    }
    area_ = std::abs(signed_area(outer_));
    for (const auto& h : holes_) area_ -= std::abs(signed_area(h));
    if (!(area_ > 0)) throw Error(ErrorCode::InvalidPolygon, "polygon has no area");
    x0_ = y0_ = std::numeric_limits<double>::infinity();
    x1_ = y1_ = -x0_;
    for (const Point& p : outer_) {
      x0_ = std::min(x0_, p.x);
      x1_ = std::max(x1_, p.x);
      y0_ = std::min(y0_, p.y);
      y1_ = std::max(y1_, p.y);
    }
  }

  const std::vector<Point>& outer() const { return outer_; }
  const std::vector<std::vector<Point>>& holes() const { return holes_; }
  double area() const { return area_; }

  bool contains(Point p) const {
    if (!inside_ring(outer_, p)) return false;
    for (const auto& h : holes_) {
      if (inside_ring(h, p)) return false;
    }
    return true;
  }

  // Blocked on any contact with the boundary.
  bool sees(Point a, Point b) const {
    auto clear = [&](const std::vector<Point>& ring) {
      for (std::size_t i = 0; i < ring.size(); ++i) {
        if (segments_intersect(a, b, ring[i], ring[(i + 1) % ring.size()], 0.0)) return false;
      }
      return true;
    };
    if (!clear(outer_)) return false;
    for (const auto& h : holes_) {
      if (!clear(h)) return false;
    }
    return true;
  }

  Point sample(Philox4x32& rng) const {
    for (;;) {
      const Point p{rng.uniform(x0_, x1_), rng.uniform(y0_, y1_)};
      if (contains(p)) return p;
    }
  }

  static double signed_area(const std::vector<Point>& r) {
    double s = 0;
    for (std::size_t i = 0; i < r.size(); ++i) s += cross(r[i], r[(i + 1) % r.size()]);
    return 0.5 * s;
  }

  // Even-odd crossing test.
  static bool inside_ring(const std::vector<Point>& r, Point p) {
    bool in = false;
    for (std::size_t i = 0, j = r.size() - 1; i < r.size(); j = i++) {
      if ((r[i].y > p.y) != (r[j].y > p.y)) {
        const double x = r[j].x + (p.y - r[j].y) * (r[i].x - r[j].x) / (r[i].y - r[j].y);
        if (p.x < x) in = !in;
      }
    }
    return in;
  }

 private:
  static void check_ring(const std::vector<Point>& r, const char* what) {
    if (r.size() < 3) throw Error(ErrorCode::InvalidPolygon, std::string(what) + " needs at least 3 vertices");
    for (const Point& p : r) {
      if (!is_finite(p)) throw Error(ErrorCode::InvalidPolygon, std::string(what) + " has a non-finite vertex");
    }
    if (!(std::abs(signed_area(r)) > 0)) throw Error(ErrorCode::InvalidPolygon, std::string(what) + " has zero area");
  }

  std::vector<Point> outer_;
  std::vector<std::vector<Point>> holes_;
  double area_{0};
  double x0_, x1_, y0_, y1_;
};

// Probability that two uniform points of P see each other inside P.
inline MCEstimate mc_degree_of_convexity(const PolygonWithHoles& P, std::uint64_t samples, std::uint64_t seed,
                                         unsigned threads = mc::default_threads()) {
  require_samples(samples);
  const auto m = mc::run_batches(
      samples, seed,
      [&](Philox4x32& rng, std::uint64_t count, mc::Moments& acc) {
        for (std::uint64_t i = 0; i < count; ++i) {
          const Point a = P.sample(rng);
          const Point b = P.sample(rng);
          const double v = P.sees(a, b) ? 1.0 : 0.0;
          acc.sum += v;
          acc.sum_sq += v;
          ++acc.n;
        }
      },
      threads);
  return mc::bernoulli(m, seed);
}

}  // namespace visprob
