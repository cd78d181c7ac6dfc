#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <string_view>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "error.hpp"
#include "geom_core.hpp"
#include "numeric.hpp"

namespace visprob {

// s1, s2 of P1 and s3, s4 of P2. A dual point (alpha, beta) meets line k at
// x = X_k = (b_k beta - c_k) / (b_k alpha + a_k).
using EdgeQuadruple = std::array<LineCoefficients, 4>;

// Trapezoid alpha1 <= alpha <= alpha2, bottom.at(alpha) <= beta <= top.at(alpha).
struct VerticalSpline {
  double alpha1{0};
  double alpha2{0};
  DualLine bottom;
  DualLine top;

  double area() const {
    const double h1 = top.at(alpha1) - bottom.at(alpha1);
    const double h2 = top.at(alpha2) - bottom.at(alpha2);
    return 0.5 * (h1 + h2) * (alpha2 - alpha1);
  }
};

template <typename Real>
Real crossing_x(const LineCoefficients& l, Real alpha, Real beta) {
  return (Real(l.b) * beta - Real(l.c)) / (Real(l.b) * alpha + Real(l.a));
}

// Integral of (x2 - x1) over x1 in [X1, X2], x2 in [X3, X4].
template <typename Real = double>
Real inner_integral(Real X1, Real X2, Real X3, Real X4) {
  return (X2 - X1) * (X4 - X3) * (X3 + X4 - X1 - X2) / 2;
}

// Jacobian of (y1, y2) -> (alpha, beta) at fixed x1, x2.
inline double jacobian(double x1, double x2) { return x2 - x1; }

enum class FijCase {
  General,
  IPointsAtJ,
  JPointsAtI,
  Parallel,
  IVertical,
  JVertical,
  IVertJPoints,
  JVertIPoints,
  BothVertical,
};

constexpr std::string_view to_string(FijCase c) {
  switch (c) {
    case FijCase::General: return "GENERAL";
    case FijCase::IPointsAtJ: return "I_POINTS_AT_J";
    case FijCase::JPointsAtI: return "J_POINTS_AT_I";
    case FijCase::Parallel: return "PARALLEL";
    case FijCase::IVertical: return "I_VERTICAL";
    case FijCase::JVertical: return "J_VERTICAL";
    case FijCase::IVertJPoints: return "I_VERT_J_POINTS";
    case FijCase::JVertIPoints: return "J_VERT_I_POINTS";
    case FijCase::BothVertical: return "BOTH_VERTICAL";
  }
  return "?";
}

inline constexpr double kCaseTolerance = 1e-12;  // zero tests on canonical coefficients
inline constexpr double kCornerTolerance = 1e-9;  // corner/incidence tests, relative

namespace detail {

inline const LineCoefficients& quad_line(const EdgeQuadruple& q, int i) {
  if (i < 1 || i > 4) throw Error(ErrorCode::InvalidInput, "edge index must be 1..4");
  return q[static_cast<std::size_t>(i - 1)];
}

enum class Corner { None, Pinch, Bad };

// Where does b*alpha + a vanish relative to the spline? A pinch is a spline
// corner at alpha' = -a/b where both bounding dual lines pass through the dual
// point of the line itself.
inline Corner corner_status(const LineCoefficients& l, const VerticalSpline& s) {
  if (std::abs(l.b) <= kCaseTolerance) return Corner::None;
  const double r = -l.a / l.b;
  const double span = std::max({1.0, std::abs(s.alpha1), std::abs(s.alpha2)});
  const double tol = kCornerTolerance * span;
  auto incident = [&](const DualLine& d) {
    const double t = d.A * l.a - d.B * l.b + l.c;
    const double scale = std::abs(d.A * l.a) + std::abs(d.B * l.b) + std::abs(l.c);
    return std::abs(t) <= kCornerTolerance * std::max(scale, 1e-300);
  };
  if (std::abs(r - s.alpha1) <= tol || std::abs(r - s.alpha2) <= tol) {
    return incident(s.bottom) && incident(s.top) ? Corner::Pinch : Corner::Bad;
  }
  if (r > s.alpha1 && r < s.alpha2) {
    throw Error(ErrorCode::SingularEvaluation, "dual denominator vanishes inside the spline");
  }
  return Corner::None;
}

}  // namespace detail

inline FijCase select_fij_case(int i, int j, const VerticalSpline& spline, const EdgeQuadruple& quad) {
  const LineCoefficients& li = detail::quad_line(quad, i);
  const LineCoefficients& lj = detail::quad_line(quad, j);
  const bool iv = std::abs(li.b) <= kCaseTolerance;
  const bool jv = std::abs(lj.b) <= kCaseTolerance;
  if (iv && jv) return FijCase::BothVertical;
  const auto ci = detail::corner_status(li, spline);
  const auto cj = detail::corner_status(lj, spline);
  if (ci == detail::Corner::Bad || cj == detail::Corner::Bad) {
    throw Error(ErrorCode::AmbiguousCase, "denominator vanishes at a spline corner without incidence");
  }
  const bool pi = ci == detail::Corner::Pinch, pj = cj == detail::Corner::Pinch;
  if (iv) return pj ? FijCase::IVertJPoints : FijCase::IVertical;
  if (jv) return pi ? FijCase::JVertIPoints : FijCase::JVertical;
  const bool parallel = std::abs(li.a * lj.b - lj.a * li.b) <= kCaseTolerance;
  if (parallel) {
    if (pi || pj) throw Error(ErrorCode::AmbiguousCase, "parallel lines with a pinched corner");
    return FijCase::Parallel;
  }
  if (pi && pj) throw Error(ErrorCode::AmbiguousCase, "both denominators pinch in one spline");
  if (pi) return FijCase::IPointsAtJ;
  if (pj) return FijCase::JPointsAtI;
  return FijCase::General;
}

// Antiderivatives in alpha of the beta-integral of X_i X_j^2 over the spline,
// additive constant 0. `Real` is the evaluation precision.
template <typename Real>
Real F_ij(FijCase kase, const LineCoefficients& Li, const LineCoefficients& Lj, const VerticalSpline& s,
          Real al) {
  using std::abs;
  using std::log;
  const Real ai = Li.a, bi = Li.b, ci = Li.c, aj = Lj.a, bj = Lj.b, cj = Lj.c;
  const Real A1 = s.bottom.A, B1 = s.bottom.B, A2 = s.top.A, B2 = s.top.B;
  auto p = [](Real x, int n) { return numeric::ipow(x, n); };
  const Real d1 = A2 - A1, d2 = p(A2, 2) - p(A1, 2), d3 = p(A2, 3) - p(A1, 3), d4 = p(A2, 4) - p(A1, 4);
  const Real b1 = B2 - B1, b2 = p(B2, 2) - p(B1, 2), b3 = p(B2, 3) - p(B1, 3), b4 = p(B2, 4) - p(B1, 4);
  const Real e11 = A2 * B2 - A1 * B1;
  const Real e21 = p(A2, 2) * B2 - p(A1, 2) * B1, e12 = A2 * p(B2, 2) - A1 * p(B1, 2);
  const Real e31 = p(A2, 3) * B2 - p(A1, 3) * B1, e13 = A2 * p(B2, 3) - A1 * p(B1, 3);
  const Real e22 = p(A2, 2) * p(B2, 2) - p(A1, 2) * p(B1, 2);
  Real mag = 0;

  switch (kase) {
    case FijCase::General: {
      const Real D = aj * bi - ai * bj;
      const Real u = bj * ci + 2 * bi * cj, v = 2 * bj * ci + bi * cj;
      numeric::CompensatedSum<Real> c1, c2, c3;
      c1 += 3 * d4 * p(ai, 4) * p(bj, 2);
      c1 += -12 * p(ai, 3) * e31 * bi * p(bj, 2);
      c1 += 18 * p(ai, 2) * e22 * p(bi, 2) * p(bj, 2);
      c1 += -12 * ai * e13 * p(bi, 3) * p(bj, 2);
      c1 += 3 * b4 * p(bi, 4) * p(bj, 2);
      c1 += u * (4 * d3 * p(ai, 3) * bj - 12 * p(ai, 2) * e21 * bi * bj + 12 * ai * e12 * p(bi, 2) * bj -
                 4 * b3 * p(bi, 3) * bj);
      c1 += v * (6 * d2 * p(ai, 2) * bi * cj - 12 * ai * e11 * p(bi, 2) * cj + 6 * b2 * p(bi, 3) * cj);
      c1 += 12 * d1 * ai * p(bi, 2) * ci * p(cj, 2);
      c1 += -12 * b1 * p(bi, 3) * ci * p(cj, 2);

      c2 += 3 * d4 * p(aj, 3) * bi * (3 * aj * bi - 4 * ai * bj);
      c2 += 12 * p(aj, 2) * e31 * bi * bj * (3 * ai * bj - 2 * aj * bi);
      c2 += 18 * aj * e22 * bi * p(bj, 2) * (aj * bi - 2 * ai * bj);
      c2 += 12 * ai * e13 * bi * p(bj, 4);
      c2 += -3 * b4 * p(bi, 2) * p(bj, 4);
      c2 += u * (4 * d3 * p(aj, 2) * (2 * aj * bi - 3 * ai * bj) - 12 * aj * e21 * bj * (aj * bi - 2 * ai * bj) -
                 12 * ai * e12 * p(bj, 3) + 4 * b3 * bi * p(bj, 3));
      c2 += v * (6 * d2 * aj * cj * (aj * bi - 2 * ai * bj) + 12 * ai * e11 * p(bj, 2) * cj -
                 6 * b2 * bi * p(bj, 2) * cj);
      c2 += -12 * ai * p(bj, 2) * ci * p(cj, 2) * d1;
      // sign of this term is + (oracle-checked); the typeset version has -
      c2 += 12 * bi * p(bj, 2) * ci * p(cj, 2) * b1;

      c3 += 3 * p(al, 3) * bi * p(bj, 3) * D * d4;
      c3 += p(al, 2) * (-D) * (3 * p(bj, 2) * (3 * aj * bi + 2 * ai * bj) * d4 - 24 * bi * p(bj, 3) * e31 +
                               8 * p(bj, 2) * u * d3);
      c3 += -al * D * (6 * aj * bj * (2 * aj * bi + ai * bj) * d4 - 24 * aj * bi * p(bj, 2) * e31 + 8 * aj * bj * u * d3);
      c3 += 6 * d4 * p(aj, 4) * p(bi, 2);
      c3 += -24 * p(aj, 3) * e31 * p(bi, 2) * bj;
      c3 += 36 * p(aj, 2) * e22 * p(bi, 2) * p(bj, 2);
      c3 += -24 * aj * e13 * p(bi, 2) * p(bj, 3);
      c3 += 6 * b4 * p(bi, 2) * p(bj, 4);
      c3 += 8 * d3 * p(aj, 3) * bi * u;
      c3 += -24 * p(aj, 2) * e21 * bi * bj * u;
      c3 += 24 * aj * e12 * bi * p(bj, 2) * u;
      c3 += -8 * b3 * bi * p(bj, 3) * u;
      c3 += 12 * d2 * p(aj, 2) * bi * cj * v;
      c3 += -24 * aj * e11 * bi * bj * cj * v;
      c3 += 12 * b2 * bi * p(bj, 2) * cj * v;
      c3 += 24 * d1 * aj * bi * bj * ci * p(cj, 2);
      c3 += -24 * b1 * bi * p(bj, 2) * ci * p(cj, 2);

      const Real t1 = log(abs(ai + al * bi)) / (12 * p(bi, 2) * p(D, 2)) * c1.value();
      const Real t2 = log(abs(aj + al * bj)) / (12 * p(bj, 2) * p(D, 2)) * c2.value();
      const Real t3 = c3.value() / (24 * bi * p(bj, 2) * D * (aj + al * bj));
      numeric::CompensatedSum<Real> total;
      total += t1;
      total += t2;
      total += t3;
      return total.value();
    }
    case FijCase::BothVertical:
      return -ci * p(cj, 2) * (p(al, 2) * d1 + 2 * al * b1) / (2 * ai * p(aj, 2));
    case FijCase::IVertJPoints:
      return -al * ci * (2 * aj + al * bj) * d3 / (6 * ai * bj);
    case FijCase::JVertIPoints:
      return al * p(cj, 2) * (2 * ai + al * bi) * d2 / (4 * p(aj, 2) * bi);
    case FijCase::IVertical: {
      const Real u = bj * al + aj;
      const Real k1 = bj * B1 - cj - A1 * aj, k2 = bj * B2 - cj - A2 * aj;
      std::array<Real, 4> q{};
      for (int l = 0; l < 4; ++l) {
        q[static_cast<std::size_t>(l)] =
            Real(numeric::kBinomial[3][l]) * (p(A2, l) * p(k2, 3 - l) - p(A1, l) * p(k1, 3 - l));
      }
      return -ci / (3 * ai * p(bj, 2)) * numeric::integrate_power_series(q, 2, u, mag);
    }
    case FijCase::JVertical: {
      const Real u = bi * al + ai;
      const Real k1 = bi * B1 - ci - A1 * ai, k2 = bi * B2 - ci - A2 * ai;
      std::array<Real, 3> q{};
      for (int l = 0; l < 3; ++l) {
        q[static_cast<std::size_t>(l)] =
            Real(numeric::kBinomial[2][l]) * (p(A2, l) * p(k2, 2 - l) - p(A1, l) * p(k1, 2 - l));
      }
      return p(cj, 2) / (2 * p(aj, 2) * p(bi, 2)) * numeric::integrate_power_series(q, 1, u, mag);
    }
    case FijCase::Parallel: {
      // X_j = rho * X_i - e / u with rho = b_j / b_i and u = b_i al + a_i
      const Real rho = bj / bi, e = rho * ci - cj, u = bi * al + ai;
      const Real k1 = bi * B1 - ci - A1 * ai, k2 = bi * B2 - ci - A2 * ai;
      const std::array<Real, 5> phi{0, 0, e * e / 2, 2 * rho * e / 3, rho * rho / 4};
      const auto q2 = numeric::compose_affine(phi, A2, k2);
      const auto q1 = numeric::compose_affine(phi, A1, k1);
      std::array<Real, 5> q{};
      for (std::size_t l = 0; l < 5; ++l) q[l] = q2[l] - q1[l];
      return numeric::integrate_power_series(q, 3, u, mag) / (p(bi, 2) * p(rho, 2));
    }
    case FijCase::IPointsAtJ: {
      // expand about the pinch alpha' where line i is its own dual point
      const Real ap = -ai / bi, bp = ci / bi, t = al - ap;
      const Real d = bj * ap + aj, e = bj * bp - cj;
      const std::array<Real, 4> poly{0, e * e * d2 / 2, 2 * bj * e * d3 / 3, bj * bj * d4 / 4};
      const auto q = numeric::rebase_linear(poly, bj, d);
      return numeric::integrate_power_series(q, 2, bj * t + d, mag) / bj;
    }
    case FijCase::JPointsAtI: {
      const Real ap = -aj / bj, bp = cj / bj, t = al - ap;
      const Real d = bi * ap + ai, e = bi * bp - ci;
      const std::array<Real, 3> poly{0, e * d3 / 3, bi * d4 / 4};
      const auto q = numeric::rebase_linear(poly, bi, d);
      return numeric::integrate_power_series(q, 1, bi * t + d, mag) / bi;
    }
  }
  return std::numeric_limits<Real>::quiet_NaN();
}

// Convenience overload: picks the branch, then evaluates.
inline double F_ij(int i, int j, const VerticalSpline& spline, const EdgeQuadruple& quad, double alpha) {
  const FijCase c = select_fij_case(i, j, spline, quad);
  return static_cast<double>(
      F_ij<long double>(c, detail::quad_line(quad, i), detail::quad_line(quad, j), spline, alpha));
}

// Integral over beta in the spline of X_i X_j^2 at fixed alpha. Cubic in beta,
// so two Gauss-Legendre nodes are exact.
template <typename Real = double>
Real inner_beta_integral(const LineCoefficients& Li, const LineCoefficients& Lj, const VerticalSpline& s, Real al) {
  const Real lo = Real(s.bottom.A) * al + Real(s.bottom.B);
  const Real hi = Real(s.top.A) * al + Real(s.top.B);
  const Real h = (hi - lo) / 2, m = (hi + lo) / 2;
  const Real g = h / std::sqrt(Real(3));
  Real sum = 0;
  for (Real beta : {m - g, m + g}) {
    const Real xi = crossing_x(Li, al, beta), xj = crossing_x(Lj, al, beta);
    sum += xi * xj * xj;
  }
  return sum * h;
}

// Same, for the full integrand (x2 - x1) over the crossing intervals.
template <typename Real = double>
Real cell_integrand_beta(const EdgeQuadruple& q, const VerticalSpline& s, Real al) {
  const Real lo = Real(s.bottom.A) * al + Real(s.bottom.B);
  const Real hi = Real(s.top.A) * al + Real(s.top.B);
  const Real h = (hi - lo) / 2, m = (hi + lo) / 2;
  const Real g = h / std::sqrt(Real(3));
  Real sum = 0;
  for (Real beta : {m - g, m + g}) {
    sum += inner_integral(crossing_x(q[0], al, beta), crossing_x(q[1], al, beta), crossing_x(q[2], al, beta),
                          crossing_x(q[3], al, beta));
  }
  return sum * h;
}

struct SplineIntegral {
  double value{0};
  std::array<FijCase, 8> case_tags{};
  bool fallback{false};  // true when quadrature replaced the closed form
};

// The eight (i, j) terms and their signs in
// I = 1/2 (I13 - I31 - I23 + I32 - I14 + I41 + I24 - I42).
inline constexpr std::array<std::array<int, 3>, 8> kMassTerms = {{
    {1, 3, +1}, {3, 1, -1}, {2, 3, -1}, {3, 2, +1}, {1, 4, -1}, {4, 1, +1}, {2, 4, +1}, {4, 2, -1},
}};

struct FallbackCounter {
  std::atomic<long> count{0};
};

inline FallbackCounter& fallback_counter() {
  static FallbackCounter c;
  return c;
}

// Adaptive Gauss-Kronrod in alpha over the exact beta-integral. With
// `abs_budget` > 0 the relative tolerance is relaxed (up to 1e-8) so that the
// absolute error target is about abs_budget, scaled by a one-panel estimate.
inline double spline_mass_quadrature(const VerticalSpline& s, const EdgeQuadruple& q, double rel_tol = 1e-13,
                                     unsigned max_depth = 12, double abs_budget = 0.0) {
  if (!(s.alpha2 > s.alpha1)) return 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<long double, 31>;
  auto f = [&](long double al) { return cell_integrand_beta<long double>(q, s, al); };
  const long double a = s.alpha1, b = s.alpha2;
  long double tol = rel_tol;
  if (abs_budget > 0) {
    const long double rough = std::abs(GK::integrate(f, a, b, 0));
    if (rough > 0) tol = std::clamp(static_cast<long double>(abs_budget) / rough, tol, 1e-8L);
  }
  long double err = 0;
  const long double v = GK::integrate(f, a, b, max_depth, tol, &err);
  if (!std::isfinite(static_cast<double>(v))) throw Error(ErrorCode::NumericalFailure, "quadrature fallback failed");
  return static_cast<double>(v);
}

namespace detail {
template <typename Real>
Real closed_form_mass(const VerticalSpline& s, const EdgeQuadruple& q, const std::array<FijCase, 8>& tags) {
  numeric::CompensatedSum<Real> acc;
  for (std::size_t t = 0; t < 8; ++t) {
    const auto& term = kMassTerms[t];
    const LineCoefficients& Li = q[static_cast<std::size_t>(term[0] - 1)];
    const LineCoefficients& Lj = q[static_cast<std::size_t>(term[1] - 1)];
    const Real hi = F_ij<Real>(tags[t], Li, Lj, s, Real(s.alpha2));
    const Real lo = F_ij<Real>(tags[t], Li, Lj, s, Real(s.alpha1));
    acc += Real(term[2]) * hi;
    acc += -Real(term[2]) * lo;
  }
  return acc.value() / 2;
}
}  // namespace detail

// Closed-form mass of one spline. The double evaluation of the same formulas
// has ~2^11 times the rounding error of the long-double one, so their gap
// estimates the cancellation error. If that estimate exceeds the budget, or a
// branch is singular, the spline goes to quadrature. `abs_budget` is an
// absolute error allowance (callers pass a fraction of the total mass scale).
inline SplineIntegral spline_mass(const VerticalSpline& s, const EdgeQuadruple& q, bool allow_fallback = true,
                                  double abs_budget = 0.0) {
  SplineIntegral out;
  if (!(s.alpha2 > s.alpha1)) return out;
  try {
    for (std::size_t t = 0; t < 8; ++t) {
      out.case_tags[t] = select_fij_case(kMassTerms[t][0], kMassTerms[t][1], s, q);
    }
    const long double precise = detail::closed_form_mass<long double>(s, q, out.case_tags);
    const double rough = detail::closed_form_mass<double>(s, q, out.case_tags);
    const double v = static_cast<double>(precise);
    // one sample of the gap can undershoot; the relative test takes a 32x margin
    const double gap = std::abs(rough - v);
    const bool ok = std::isfinite(v) && std::isfinite(rough) &&
                    (gap / 64.0 <= 1e-12 * std::abs(v) || gap / 2048.0 <= abs_budget);
    if (ok || !allow_fallback) {
      out.value = v;
      return out;
    }
  } catch (const Error& e) {
    if (!allow_fallback || (e.code() != ErrorCode::SingularEvaluation && e.code() != ErrorCode::AmbiguousCase)) throw;
  }
  fallback_counter().count.fetch_add(1, std::memory_order_relaxed);
  out.value = spline_mass_quadrature(s, q, 1e-13, 12, abs_budget);
  out.fallback = true;
  return out;
}

}  // namespace visprob
