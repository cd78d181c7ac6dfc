#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

namespace visprob::numeric {

// Neumaier's variant of Kahan summation. The closed-form cell integrals are
// small differences of large terms, so every reduction goes through this.
template <typename Real = double>
class CompensatedSum {
 public:
  void add(Real x) {
    const Real t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(Real x) {
    add(x);
    return *this;
  }

  Real value() const { return sum_ + comp_; }

 private:
  Real sum_{0};
  Real comp_{0};
};

template <typename Real>
Real compensated_total(std::span<const Real> xs) {
  CompensatedSum<Real> s;
  for (Real x : xs) s.add(x);
  return s.value();
}

inline constexpr std::array<std::array<double, 6>, 6> kBinomial = {{
    {1, 0, 0, 0, 0, 0},
    {1, 1, 0, 0, 0, 0},
    {1, 2, 1, 0, 0, 0},
    {1, 3, 3, 1, 0, 0},
    {1, 4, 6, 4, 1, 0},
    {1, 5, 10, 10, 5, 1},
}};

template <typename Real>
Real ipow(Real x, int n) {
  Real r{1};
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// Coefficients (ascending) of p(A*u + k) for p given by ascending coefficients.
template <typename Real, std::size_t N>
std::array<Real, N> compose_affine(const std::array<Real, N>& p, Real A, Real k) {
  std::array<Real, N> q{};
  for (std::size_t n = 0; n < N; ++n) {
    if (p[n] == Real{0}) continue;
    for (std::size_t l = 0; l <= n; ++l) {
      q[l] += p[n] * static_cast<Real>(kBinomial[n][l]) * ipow(A, static_cast<int>(l)) *
              ipow(k, static_cast<int>(n - l));
    }
  }
  return q;
}

// Rewrites p(t) (ascending coefficients) in powers of w = g*t + d.
template <typename Real, std::size_t N>
std::array<Real, N> rebase_linear(const std::array<Real, N>& p, Real g, Real d) {
  std::array<Real, N> q{};
  for (std::size_t n = 0; n < N; ++n) {
    if (p[n] == Real{0}) continue;
    const Real scale = p[n] / ipow(g, static_cast<int>(n));
    for (std::size_t l = 0; l <= n; ++l) {
      q[l] += scale * static_cast<Real>(kBinomial[n][l]) * ipow(-d, static_cast<int>(n - l));
    }
  }
  return q;
}

// Antiderivative in w of sum_l q[l] * w^(l - power), with log|w| for the
// w^-1 term. `magnitude` accumulates |addend| for conditioning estimates.
template <typename Real, std::size_t N>
Real integrate_power_series(const std::array<Real, N>& q, int power, Real w, Real& magnitude) {
  CompensatedSum<Real> s;
  for (std::size_t l = 0; l < N; ++l) {
    if (q[l] == Real{0}) continue;
    const int e = static_cast<int>(l) - power;
    Real term;
    if (e == -1) {
      term = q[l] * std::log(std::abs(w));
    } else if (e >= 0) {
      term = q[l] * ipow(w, e + 1) / static_cast<Real>(e + 1);
    } else {
      term = q[l] / (static_cast<Real>(e + 1) * ipow(w, -(e + 1)));
    }
    magnitude += std::abs(term);
    s.add(term);
  }
  return s.value();
}

}  // namespace visprob::numeric
