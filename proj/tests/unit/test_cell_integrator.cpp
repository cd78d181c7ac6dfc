#include <gtest/gtest.h>

#include "../support/test_support.hpp"

using namespace visprob;

TEST(InnerIntegral, Examples) {
  EXPECT_DOUBLE_EQ(inner_integral(0.0, 1.0, 2.0, 3.0), 2.0);
  EXPECT_DOUBLE_EQ(inner_integral(0.0, 1.0, 0.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(inner_integral(0.7, 0.7, 2.0, 5.0), 0.0);
}

TEST(InnerIntegral, MatchesQuadrature) {
  vt::Rng g(3);
  for (int t = 0; t < 200; ++t) {
    const double X1 = g.uni(-3, 3), X2 = g.uni(-3, 3), X3 = g.uni(-3, 3), X4 = g.uni(-3, 3);
    const long double q = vt::gk(
        [&](long double x1) { return vt::gk([&](long double x2) { return x2 - x1; }, std::min(X3, X4), std::max(X3, X4)); },
        std::min(X1, X2), std::max(X1, X2));
    const double sign = ((X2 >= X1) == (X4 >= X3)) ? 1.0 : -1.0;
    EXPECT_NEAR(inner_integral(X1, X2, X3, X4), sign * static_cast<double>(q), 1e-12);
  }
}

TEST(Jacobian, Examples) {
  EXPECT_EQ(jacobian(0, 3), 3);
  EXPECT_EQ(jacobian(1.5, 1.5), 0);
}

TEST(Jacobian, NumericInverseMap) {
  // (y1, y2) -> (alpha, beta); J is the reciprocal of that map's determinant
  const auto r = vt::for_all("numeric jacobian", 1000, 21, [](vt::Rng& g, int) -> std::optional<std::string> {
    const double x1 = g.uni(-5, 5), x2 = x1 + g.signed_mag(0.1, 5);
    const double y1 = g.uni(-5, 5), y2 = g.uni(-5, 5);
    auto fwd = [&](double a, double b) {
      return std::pair{(b - a) / (x2 - x1), (x1 * b - x2 * a) / (x2 - x1)};
    };
    const double h = 1e-5;
    const auto [a_p1, b_p1] = fwd(y1 + h, y2);
    const auto [a_m1, b_m1] = fwd(y1 - h, y2);
    const auto [a_p2, b_p2] = fwd(y1, y2 + h);
    const auto [a_m2, b_m2] = fwd(y1, y2 - h);
    const double det = ((a_p1 - a_m1) * (b_p2 - b_m2) - (a_p2 - a_m2) * (b_p1 - b_m1)) / (4 * h * h);
    const double J = 1.0 / det;
    if (std::abs(std::abs(J) - std::abs(jacobian(x1, x2))) > 1e-6 * std::abs(J)) return "determinant mismatch";
    return std::nullopt;
  });
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(SelectCase, Examples) {
  vt::Rng g(4);
  for (FijCase c : vt::all_cases()) {
    for (int t = 0; t < 20; ++t) {
      const auto b = vt::make_branch_instance(c, g);
      EXPECT_EQ(select_fij_case(1, 3, b.s, vt::quad_for(b, 1, 3)), c) << to_string(c);
    }
  }
}

TEST(SelectCase, DenominatorRootInsideIsSingular) {
  VerticalSpline s{-1, 1, {0, -1}, {0, 1}};
  const EdgeQuadruple q{LineCoefficients::canonical(0, 1, 1), LineCoefficients::canonical(0.3, 1, 0),
                        LineCoefficients::canonical(0, 1, -1), LineCoefficients::canonical(0, 1, 2)};
  try {
    select_fij_case(2, 3, s, q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularEvaluation);
  }
}

TEST(SelectCase, CornerWithoutIncidenceIsAmbiguous) {
  // root of b*alpha + a at alpha1, but the spline edges miss the dual point
  VerticalSpline s{1, 2, {0, -1}, {0, 1}};
  const EdgeQuadruple q{LineCoefficients::canonical(1, -1, 5), LineCoefficients::canonical(0, 1, 0),
                        LineCoefficients::canonical(0, 1, -1), LineCoefficients::canonical(0, 1, 2)};
  try {
    select_fij_case(1, 3, s, q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AmbiguousCase);
  }
}

TEST(Fij, BothVerticalExample) {
  const auto L = LineCoefficients::canonical(1, 0, 1);
  VerticalSpline s{0.5, 1.5, {0, 0}, {1, 0}};
  EXPECT_NEAR(static_cast<double>(F_ij<long double>(FijCase::BothVertical, L, L, s, 1.0L)), -0.5, 1e-15);
}

class FijBranch : public ::testing::TestWithParam<FijCase> {};

TEST_P(FijBranch, AntiderivativeAgainstQuadrature) {
  vt::Rng g(500 + static_cast<int>(GetParam()));
  double worst_d = 0, worst_def = 0;
  for (int t = 0; t < 100; ++t) {
    const auto b = vt::make_branch_instance(GetParam(), g);
    const auto chk = vt::check_branch(GetParam(), b, g);
    worst_d = std::max(worst_d, chk.derivative_rel);
    worst_def = std::max(worst_def, chk.definite_rel);
  }
  EXPECT_LT(worst_d, 1e-6);
  EXPECT_LT(worst_def, 1e-6);
}

INSTANTIATE_TEST_SUITE_P(AllCases, FijBranch, ::testing::ValuesIn(vt::all_cases()),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(SplineMass, ZeroWidth) {
  VerticalSpline s{0.3, 0.3, {0, 0}, {0, 1}};
  const EdgeQuadruple q{};
  EXPECT_EQ(spline_mass(s, q).value, 0.0);
}

namespace {
const ConvexPolygon kP1 = axis_box(0, 0, 1, 1);
const ConvexPolygon kP2 = axis_box(3, 0, 4, 1);
}  // namespace

TEST(SplineMass, UnitSquaresAgainstQuadrature) {
  const Arrangement arr = build_arrangement(kP1, kP2, {});
  ASSERT_FALSE(arr.cells.empty());
  double total = 0;
  for (const auto& c : arr.cells) {
    for (const auto& s : decompose_cell(c)) {
      const double v = spline_mass(s, c.quad).value;
      const double q = static_cast<double>(vt::spline_mass_2d(s, c.quad));
      EXPECT_NEAR(v, q, 1e-8 * std::abs(q));
      total += v;
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(SplineMass, MirrorSceneSameTotal) {
  EngineOptions opt;
  opt.keep_cells = false;
  const double a = integrate_arrangement(build_arrangement(kP1, kP2, {}), opt).denominator;
  const double b = integrate_arrangement(build_arrangement(kP2, kP1, {}), opt).denominator;
  EXPECT_NEAR(a, b, 1e-13);
}

TEST(SplineMass, QuadratureFallbackAgreesWithOracle) {
  const Arrangement arr = build_arrangement(kP1, kP2, {});
  for (const auto& c : arr.cells) {
    for (const auto& sp : decompose_cell(c)) {
      const double q = static_cast<double>(vt::spline_mass_2d(sp, c.quad));
      EXPECT_NEAR(spline_mass_quadrature(sp, c.quad), q, 1e-10 * std::abs(q));
    }
  }
}

TEST(SplineMass, SingularSplineCountsFallback) {
  // denominator root inside the spline: the closed form refuses, the
  // fallback is attempted (and here fails, the integrand is not integrable)
  VerticalSpline s{-1, 1, {0, 2}, {0, 3}};
  const EdgeQuadruple q{LineCoefficients::canonical(0.3, 1, 0), LineCoefficients::canonical(0, 1, 1),
                        LineCoefficients::canonical(0, 1, -1), LineCoefficients::canonical(0, 1, 2)};
  try {
    spline_mass(s, q, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularEvaluation);
  }
  const long before = fallback_counter().count.load();
  try {
    const auto r = spline_mass(s, q);
    EXPECT_TRUE(r.fallback);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NumericalFailure);
  }
  EXPECT_EQ(fallback_counter().count.load(), before + 1);
}

namespace {
struct RandomCell {
  ArrangementCell cell;
  std::vector<VerticalSpline> splines;
};

RandomCell random_cell(vt::Rng& g) {
  for (;;) {
    const ConvexPolygon A = vt::random_convex(g, {0, g.uni(-1, 1)}, g.uni(0.3, 1.5), g.uni(0.3, 1.5), g.integer(3, 6));
    const ConvexPolygon B = vt::random_convex(g, {g.uni(4, 8), g.uni(-1, 1)}, g.uni(0.3, 1.5), g.uni(0.3, 1.5),
                                              g.integer(3, 6));
    const Arrangement arr = build_arrangement(A, B, {});
    if (arr.cells.empty()) continue;
    const auto& c = arr.cells[static_cast<std::size_t>(g.integer(0, static_cast<int>(arr.cells.size()) - 1))];
    auto sp = decompose_cell(c);
    if (sp.empty()) continue;
    return {c, sp};
  }
}
}  // namespace

TEST(SplineMassProperty, Additivity) {
  const auto r = vt::for_all("additivity", 1000, 31, [](vt::Rng& g, int) -> std::optional<std::string> {
    const auto rc = random_cell(g);
    const auto& s = rc.splines[static_cast<std::size_t>(g.integer(0, static_cast<int>(rc.splines.size()) - 1))];
    const double cut = s.alpha1 + (s.alpha2 - s.alpha1) * g.uni(0.05, 0.95);
    VerticalSpline l = s, rr = s;
    l.alpha2 = cut;
    rr.alpha1 = cut;
    const double whole = spline_mass(s, rc.cell.quad).value;
    const double parts = spline_mass(l, rc.cell.quad).value + spline_mass(rr, rc.cell.quad).value;
    if (std::abs(whole - parts) > 1e-12 * std::abs(whole) + 1e-15) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "whole %.17g vs parts %.17g", whole, parts);
      return std::string(buf);
    }
    return std::nullopt;
  });
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(SplineMassProperty, CellMassPositive) {
  const auto r = vt::for_all("cell mass sign", 1000, 32, [](vt::Rng& g, int) -> std::optional<std::string> {
    const auto rc = random_cell(g);
    double m = 0;
    for (const auto& s : rc.splines) m += spline_mass(s, rc.cell.quad).value;
    if (!(m > 0)) return "non-positive cell mass " + std::to_string(m);
    return std::nullopt;
  });
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(SplineMassProperty, Continuity) {
  const auto r = vt::for_all("continuity", 1000, 33, [](vt::Rng& g, int) -> std::optional<std::string> {
    const auto rc = random_cell(g);
    const auto& s = rc.splines[0];
    const SplineIntegral b0 = spline_mass(s, rc.cell.quad);
    // a pinched corner is a case boundary: nudging it leaves the limit formula
    for (FijCase c : b0.case_tags) {
      if (c == FijCase::IPointsAtJ || c == FijCase::JPointsAtI || c == FijCase::IVertJPoints ||
          c == FijCase::JVertIPoints) {
        return std::nullopt;
      }
    }
    const double base = b0.value;
    VerticalSpline p = s;
    const double w = s.alpha2 - s.alpha1;
    // shrink inward so the corners stay inside the host cell
    p.alpha1 += 1e-9 * w * g.uni(0, 1);
    p.alpha2 -= 1e-9 * w * g.uni(0, 1);
    p.bottom.B += 1e-9 * g.uni(0, 1);
    p.top.B -= 1e-9 * g.uni(0, 1);
    const double moved = spline_mass(p, rc.cell.quad).value;
    // the change must track the genuine change, measured by quadrature
    const double dq = spline_mass_quadrature(p, rc.cell.quad) - spline_mass_quadrature(s, rc.cell.quad);
    if (std::abs((moved - base) - dq) > 1e-9 * std::abs(base) + 1e-15) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "base %.17g moved %.17g quadrature change %.3g", base, moved, dq);
      return std::string(buf);
    }
    return std::nullopt;
  });
  EXPECT_TRUE(r.ok()) << r.first_failure;
}
