// Library tour: one uniform-pair probability, checked against Monte Carlo,
// then a Gaussian-to-Gaussian estimate at a coarse epsilon.
#include <cstdio>

#include "visprob/visprob.hpp"

int main() {
  using namespace visprob;

  const ConvexPolygon P1 = axis_box(0, 0, 1, 1);
  const ConvexPolygon P2 = axis_box(3, 0, 4, 1);
  const std::vector<ConvexPolygon> wall{axis_box(1.9, 0.45, 2.1, 0.55)};

  const ProbabilityResult r = uniform_pair_probability(P1, P2, wall);
  const MCEstimate mc = mc_uniform_pair(P1, P2, wall, 1000000, 7);
  std::printf("squares: analytic %.9f  mc %.6f +- %.6f  (%zu cells)\n", r.probability, mc.mean, mc.half_width_95,
              r.diagnostics.cells);

  const Gaussian g1({0, 0}, 1), g2({12, 0.5}, 1);
  const std::vector<ConvexPolygon> block{axis_box(5.5, -0.5, 6.5, 1.0)};
  const PipelineResult pr = gaussian_visibility_detailed(g1, g2, block, 0.3);
  const MCEstimate gm = mc_gaussian_pair(g1, g2, block, 1000000, 7);
  std::printf("gaussians: eps 0.3 (k=%d) %.6f  mc %.6f +- %.6f\n", pr.k1, pr.result.probability, gm.mean,
              gm.half_width_95);
  return 0;
}
