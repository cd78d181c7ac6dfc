#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "cell_integrator.hpp"
#include "dual_arrangement.hpp"
#include "error.hpp"
#include "gaussian_approx.hpp"
#include "geom_core.hpp"
#include "numeric.hpp"

namespace visprob {

struct CellReport {
  std::size_t id{0};
  bool blocked{false};
  double mass{0};
  std::size_t splines{0};
  bool fallback{false};
  std::array<int, 4> edges{};
  std::vector<std::array<FijCase, 8>> case_tags;  // one entry per spline
};

struct Diagnostics {
  std::size_t cells{0};
  std::size_t splines{0};
  std::size_t fallback_splines{0};
  std::size_t pairs{0};             // gaussian pipeline: polygon pairs solved
  std::size_t pairs_unobstructed{0};  // pairs whose hull misses every obstacle
  bool perturbation_applied{false};
  double seconds{0};
};

struct ProbabilityResult {
  double probability{0};
  double numerator{0};
  double denominator{0};
  std::vector<CellReport> cells;
  Diagnostics diagnostics;
};

struct EngineOptions {
  bool keep_cells = true;        // fill ProbabilityResult::cells
  bool refine_blocked = true;    // see ArrangementOptions
};

// Sum of cell masses of an arrangement, split into all cells and unblocked.
// `mass_scale` sets the absolute error budget per spline (1e-15 of it); the
// natural scale is area(P1) * area(P2).
inline ProbabilityResult integrate_arrangement(const Arrangement& arr, const EngineOptions& opt = {},
                                               double mass_scale = 0.0) {
  ProbabilityResult res;
  const double budget = 1e-15 * mass_scale;
  numeric::CompensatedSum<long double> num, den;
  for (std::size_t id = 0; id < arr.cells.size(); ++id) {
    const auto& c = arr.cells[id];
    CellReport rep;
    rep.id = id;
    rep.blocked = c.blocked;
    rep.edges = c.edges;
    numeric::CompensatedSum<long double> m;
    for (const auto& s : decompose_cell(c)) {
      const SplineIntegral si = spline_mass(s, c.quad, true, budget);
      m += si.value;
      ++rep.splines;
      if (si.fallback) {
        rep.fallback = true;
        ++res.diagnostics.fallback_splines;
      }
      if (opt.keep_cells) rep.case_tags.push_back(si.case_tags);
    }
    rep.mass = static_cast<double>(m.value());
    den += m.value();
    if (!c.blocked) num += m.value();
    res.diagnostics.splines += rep.splines;
    if (opt.keep_cells) res.cells.push_back(std::move(rep));
  }
  res.diagnostics.cells = arr.cells.size();
  res.diagnostics.perturbation_applied = arr.perturbation_applied;
  res.numerator = static_cast<double>(num.value());
  res.denominator = static_cast<double>(den.value());
  return res;
}

inline constexpr double kDenominatorFloor = 1e-18;

inline ProbabilityResult uniform_pair_probability(const ConvexPolygon& P1, const ConvexPolygon& P2,
                                                  const std::vector<ConvexPolygon>& obstacles,
                                                  const EngineOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  ArrangementOptions aopt;
  aopt.refine_blocked = opt.refine_blocked;
  const Arrangement arr = build_arrangement(P1, P2, obstacles, aopt);
  ProbabilityResult res = integrate_arrangement(arr, opt, P1.area() * P2.area());
  if (!(res.denominator >= kDenominatorFloor)) {
    throw Error(ErrorCode::DegenerateDenominator, "denominator below numerical floor");
  }
  // every cell is either blocked or not, so num <= den up to rounding
  res.probability = std::clamp(res.numerator / res.denominator, 0.0, 1.0);
  res.diagnostics.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Sum of all cell masses with no obstacles; equals area(P1) * area(P2).
inline double denominator_identity_check(const ConvexPolygon& P1, const ConvexPolygon& P2) {
  EngineOptions opt;
  opt.keep_cells = false;
  return integrate_arrangement(build_arrangement(P1, P2, {}), opt, P1.area() * P2.area()).denominator;
}

// Andrew's monotone chain.
inline std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && orient(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && orient(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

inline bool convex_polygons_intersect(const std::vector<Point>& A, const std::vector<Point>& B,
                                      double tol = tolerance()) {
  auto separated_by_edges = [&](const std::vector<Point>& P) {
    for (std::size_t i = 0; i < P.size(); ++i) {
      const Point e = P[(i + 1) % P.size()] - P[i];
      const double len = norm(e);
      if (len == 0) continue;
      const Point axis{-e.y / len, e.x / len};
      const auto [a0, a1] = project(A, axis);
      const auto [b0, b1] = project(B, axis);
      if (a1 < b0 - tol || b1 < a0 - tol) return true;
    }
    return false;
  };
  return !separated_by_edges(A) && !separated_by_edges(B);
}

struct PipelineOptions {
  double epsilon_split = 0.5;  // share of epsilon spent on source 1
  bool renormalize = false;
  bool skip_unobstructed_pairs = true;  // exact: probability is 1 there
};

struct PipelineResult {
  ProbabilityResult result;
  int k1{0};
  int k2{0};
  double mass1{0};
  double mass2{0};
};

inline PipelineResult gaussian_visibility_detailed(const Gaussian& g1, const Gaussian& g2,
                                                   const std::vector<ConvexPolygon>& obstacles, double eps,
                                                   const PipelineOptions& opt = {}) {
  if (!(eps > 0)) throw Error(ErrorCode::NonPositiveEpsilon, "epsilon must be positive");
  if (!(opt.epsilon_split > 0 && opt.epsilon_split < 1)) {
    throw Error(ErrorCode::InvalidInput, "epsilon split must lie in (0, 1)");
  }
  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult out;
  out.k1 = k_for_epsilon(eps * opt.epsilon_split);
  out.k2 = k_for_epsilon(eps * (1 - opt.epsilon_split));
  const PolygonApproximation M1 = polygonize(optimal_disks(g1, out.k1));
  const PolygonApproximation M2 = polygonize(optimal_disks(g2, out.k2));
  out.mass1 = M1.weighted_mass();
  out.mass2 = M2.weighted_mass();
  const auto Q = M1.polygons();
  const auto R = M2.polygons();

  std::vector<std::vector<Point>> obstacle_pts;
  for (const auto& h : obstacles) obstacle_pts.push_back(h.vertices());

  EngineOptions eopt;
  eopt.keep_cells = false;
  eopt.refine_blocked = false;
  ProbabilityResult& res = out.result;
  numeric::CompensatedSum<long double> total;
  for (std::size_t i = 0; i < Q.size(); ++i) {
    for (std::size_t j = 0; j < R.size(); ++j) {
      const auto& [q, wq] = Q[i];
      const auto& [r, wr] = R[j];
      const double weight = wq * q.area() * wr * r.area();
      double p = 1.0;
      try {
        const StabbingRegion L = stabbing_region(q, r);
        validate_case_one(L.left(), L.right(), obstacles);
        bool obstructed = !opt.skip_unobstructed_pairs;
        if (!obstructed) {
          std::vector<Point> pts = q.vertices();
          pts.insert(pts.end(), r.vertices().begin(), r.vertices().end());
          const auto hull = convex_hull(std::move(pts));
          for (const auto& h : obstacle_pts) obstructed |= convex_polygons_intersect(hull, h);
        }
        if (obstructed) {
          const ProbabilityResult pr = uniform_pair_probability(q, r, obstacles, eopt);
          p = pr.probability;
          res.diagnostics.cells += pr.diagnostics.cells;
          res.diagnostics.splines += pr.diagnostics.splines;
          res.diagnostics.fallback_splines += pr.diagnostics.fallback_splines;
        } else {
          ++res.diagnostics.pairs_unobstructed;
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::NotSeparable || e.code() == ErrorCode::ObstacleOutsideSlab) {
          throw Error(ErrorCode::RegionsNotSeparable, "polygon pair (" + std::to_string(i) + ", " +
                                                          std::to_string(j) + ") violates case 1: " + e.detail());
        }
        throw;
      }
      ++res.diagnostics.pairs;
      total += static_cast<long double>(weight) * p;
    }
  }
  res.numerator = static_cast<double>(total.value());
  res.denominator = opt.renormalize ? out.mass1 * out.mass2 : 1.0;
  res.probability = res.numerator / res.denominator;
  res.diagnostics.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

inline ProbabilityResult gaussian_visibility(const Gaussian& g1, const Gaussian& g2,
                                             const std::vector<ConvexPolygon>& obstacles, double eps,
                                             const PipelineOptions& opt = {}) {
  return gaussian_visibility_detailed(g1, g2, obstacles, eps, opt).result;
}

}  // namespace visprob
