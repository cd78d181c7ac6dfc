#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "error.hpp"
#include "geom_core.hpp"
#include "random.hpp"

namespace visprob {

struct Gaussian {
  Point center;
  double sigma{1};

  Gaussian() = default;
  Gaussian(Point c, double s) : center(c), sigma(s) {
    if (!(s > 0) || !std::isfinite(s)) throw Error(ErrorCode::InvalidInput, "sigma must be positive");
    if (!is_finite(c)) throw Error(ErrorCode::InvalidInput, "center must be finite");
  }

  double density_at_radius(double r) const {
    return std::exp(-r * r / (2 * sigma * sigma)) / (2 * M_PI * sigma * sigma);
  }
  double density(Point p) const { return density_at_radius(norm(p - center)); }
};

// e^{-chi^2 / 2 sigma^2}: Gaussian mass outside radius chi.
inline double tail_volume(double chi, double sigma) {
  if (chi < 0) throw Error(ErrorCode::InvalidInput, "tail_volume needs chi >= 0");
  if (std::isinf(chi)) return 0.0;
  return std::exp(-chi * chi / (2 * sigma * sigma));
}

inline int k_for_epsilon(double eps) {
  if (!(eps > 0)) throw Error(ErrorCode::NonPositiveEpsilon, "epsilon must be positive");
  const double x = 1.0 / std::expm1(eps);
  if (!std::isfinite(x) || x > 1e9) throw Error(ErrorCode::InvalidInput, "epsilon too small");
  // ln 2 and ln 1.5 are not representable; snap x within 1e-9 of an integer
  const double near = std::round(x);
  const double k = std::abs(x - near) <= 1e-9 * std::max(1.0, near) ? near : std::ceil(x);
  return std::max(1, static_cast<int>(k));
}

inline double disk_error(int k) {
  if (k < 1) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  return std::log1p(1.0 / k);
}

// k concentric disks; arrays are 0-based, entry i-1 holds the paper's index i.
struct DiskApproximation {
  int k{0};
  double sigma{1};
  Point center;
  std::vector<double> r;
  std::vector<double> w;
  std::vector<double> rho;

  // rho with rho(k+1) = +inf; index is 1-based.
  double rho_at(int i) const {
    return i > k ? std::numeric_limits<double>::infinity() : rho[static_cast<std::size_t>(i - 1)];
  }
  double r_at(int i) const { return i < 1 ? 0.0 : r[static_cast<std::size_t>(i - 1)]; }
  double w_at(int i) const { return w[static_cast<std::size_t>(i - 1)]; }
  double mu(double radius) const {
    if (std::isinf(radius)) return 0.0;
    return std::exp(-radius * radius / (2 * sigma * sigma)) / (2 * M_PI * sigma * sigma);
  }
  // W_i = sum_{j >= i} w_j
  double tail_weight(int i) const {
    double s = 0;
    for (int j = k; j >= i; --j) s += w_at(j);
    return s;
  }

  WeightedRegionSet to_region_set() const {
    WeightedRegionSet m;
    for (int i = 0; i < k; ++i) m.add(Disk{center, r[static_cast<std::size_t>(i)]}, w[static_cast<std::size_t>(i)]);
    return m;
  }
};

inline DiskApproximation optimal_disks(const Gaussian& g, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  DiskApproximation d;
  d.k = k;
  d.sigma = g.sigma;
  d.center = g.center;
  const double s2 = g.sigma * g.sigma;
  const double lk = std::log(static_cast<double>(k)) + std::log(static_cast<double>(k) + 1);
  for (int i = 1; i <= k; ++i) {
    const double a = k + 1 - i;
    d.r.push_back(std::sqrt(2 * s2 * (lk - 2 * std::log(a))));
    d.w.push_back(a / (M_PI * s2 * k * (k + 1.0)));
    const double arg = lk - std::log(a) - std::log(a + 1);
    d.rho.push_back(i == 1 ? 0.0 : std::sqrt(2 * s2 * arg));
  }
  return d;
}

inline void check_interleaving(const std::vector<double>& r, const std::vector<double>& rho) {
  if (r.empty() || r.size() != rho.size()) throw Error(ErrorCode::InvalidInput, "r and rho need equal, nonzero length");
  if (rho[0] < 0) throw Error(ErrorCode::InterleavingViolated, "rho[1] < 0");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(rho[i] <= r[i])) throw Error(ErrorCode::InterleavingViolated, "rho[i] > r[i]");
    if (i + 1 < r.size() && !(r[i] <= rho[i + 1])) throw Error(ErrorCode::InterleavingViolated, "r[i] > rho[i+1]");
  }
}

// Symmetric-difference volume between mu and the step function whose height
// on ring i is mu(rho_i), in the paper's collected form.
inline double error_functional(const std::vector<double>& r, const std::vector<double>& rho, double sigma) {
  check_interleaving(r, rho);
  const std::size_t k = r.size();
  const double s2 = sigma * sigma;
  auto V = [&](double x) { return std::exp(-x * x / (2 * s2)); };
  auto mu = [&](double x) { return V(x) / (2 * M_PI * s2); };
  double f = -V(rho[0]);
  for (std::size_t i = 0; i < k; ++i) {
    f += 2 * V(r[i]);
    const double next = i + 1 < k ? mu(rho[i + 1]) : 0.0;
    f += M_PI * r[i] * r[i] * (mu(rho[i]) + next);
    if (i >= 1) f += -2 * V(rho[i]) - 2 * M_PI * rho[i] * rho[i] * mu(rho[i]);
  }
  return f;
}

// Partial derivatives of the functional, as printed next to it (1-based i).
inline double dF_drho(const DiskApproximation& d, int i) {
  const double s2 = d.sigma * d.sigma, p = d.rho_at(i);
  return p / (s2 * s2) * std::exp(-p * p / (2 * s2)) * (p * p - 0.5 * (d.r_at(i - 1) * d.r_at(i - 1) + d.r_at(i) * d.r_at(i)));
}

inline double dF_dr(const DiskApproximation& d, int i) {
  const double s2 = d.sigma * d.sigma, ri = d.r_at(i);
  auto V = [&](double x) { return std::isinf(x) ? 0.0 : std::exp(-x * x / (2 * s2)); };
  return ri / s2 * (V(d.rho_at(i)) + V(d.rho_at(i + 1)) - 2 * V(ri));
}

struct AnnulusRadii {
  double r_prime{0};
  double r_dprime{0};
};

inline AnnulusRadii annulus_radii(const DiskApproximation& d, int i) {
  if (i < 1 || i > d.k) throw Error(ErrorCode::InvalidInput, "annulus index out of range");
  const double s2 = d.sigma * d.sigma;
  const double k = d.k, a = k + 1 - i;
  AnnulusRadii out;
  out.r_prime = std::sqrt(2 * s2 * std::log(2 * k * (k + 1) / (a * (2 * k + 3 - 2 * i))));
  const double m = d.mu(d.r_at(i)) + d.mu(d.rho_at(i + 1));
  out.r_dprime = std::sqrt(-2 * s2 * std::log(M_PI * s2 * m));
  return out;
}

inline int polygon_sides(double inner_radius, double circumradius) {
  const double n = std::ceil(M_PI / std::acos(inner_radius / circumradius));
  return std::max(3, static_cast<int>(n));
}

// Bound on the inner vertex count over all i for a given k.
inline int inner_sides_bound(int k) {
  return static_cast<int>(std::ceil(M_PI / std::acos(std::sqrt((4.0 * k + 1) / (4.0 * k + 2)))));
}

struct PolygonPair {
  ConvexPolygon inner;
  ConvexPolygon outer;
  double weight{0};  // each of the two polygons carries w_i / 2
  int n_inner{0};
  int n_outer{0};
  double r_prime{0};
  double r{0};
  double r_dprime{0};
};

struct PolygonApproximation {
  int k{0};
  double sigma{1};
  Point center;
  std::vector<PolygonPair> pairs;

  WeightedRegionSet to_region_set() const {
    WeightedRegionSet m;
    for (const auto& p : pairs) {
      m.add(p.inner, p.weight);
      m.add(p.outer, p.weight);
    }
    return m;
  }

  // The 2k polygons with their weights, inner then outer per pair.
  std::vector<std::pair<ConvexPolygon, double>> polygons() const {
    std::vector<std::pair<ConvexPolygon, double>> out;
    for (const auto& p : pairs) {
      out.emplace_back(p.inner, p.weight);
      out.emplace_back(p.outer, p.weight);
    }
    return out;
  }

  double weighted_mass() const {
    double s = 0;
    for (const auto& p : pairs) s += p.weight * (p.inner.area() + p.outer.area());
    return s;
  }
};

// Inner polygon: circumradius r_i, first vertex on +x. Outer polygon:
// circumradius r''_i, turned by half its own vertex step.
inline PolygonApproximation polygonize(const DiskApproximation& d) {
  PolygonApproximation out;
  out.k = d.k;
  out.sigma = d.sigma;
  out.center = d.center;
  for (int i = 1; i <= d.k; ++i) {
    const auto [rp, rpp] = annulus_radii(d, i);
    const double ri = d.r_at(i);
    const int n_in = polygon_sides(rp, ri);
    const int n_out = polygon_sides(ri, rpp);
    PolygonPair pp;
    pp.inner = regular_polygon(d.center, ri, n_in, 0.0);
    pp.outer = regular_polygon(d.center, rpp, n_out, M_PI / n_out);
    pp.weight = 0.5 * d.w_at(i);
    pp.n_inner = n_in;
    pp.n_outer = n_out;
    pp.r_prime = rp;
    pp.r = ri;
    pp.r_dprime = rpp;
    out.pairs.push_back(std::move(pp));
  }
  return out;
}

inline double weighted_mass(const PolygonApproximation& M) { return M.weighted_mass(); }

// Importance sampling from mu: the integrand |mu - m| / mu = |1 - m/mu|.
inline MCEstimate approximation_error_mc(const Gaussian& g, const WeightedRegionSet& M, std::uint64_t samples,
                                         std::uint64_t seed, unsigned threads = mc::default_threads()) {
  if (samples < 1000) throw Error(ErrorCode::InvalidInput, "at least 1000 samples required");
  const auto moments = mc::run_batches(
      samples, seed,
      [&](Philox4x32& rng, std::uint64_t count, mc::Moments& acc) {
        for (std::uint64_t s = 0; s < count; ++s) {
          const Point p{g.center.x + g.sigma * rng.normal(), g.center.y + g.sigma * rng.normal()};
          const double v = std::abs(1.0 - M.evaluate(p, 0.0) / g.density(p));
          acc.sum += v;
          acc.sum_sq += v * v;
          ++acc.n;
        }
      },
      threads);
  return mc::general(moments, seed);
}

}  // namespace visprob
