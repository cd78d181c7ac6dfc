#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dual_arrangement.hpp"
#include "error.hpp"
#include "gaussian_approx.hpp"
#include "mc_oracle.hpp"
#include "scene_io.hpp"
#include "svg.hpp"
#include "visibility_engine.hpp"

namespace visprob::cli {

enum ExitCode { kOk = 0, kInvalidInput = 2, kPreconditions = 3, kNumerical = 4 };

inline int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotSeparable:
    case ErrorCode::ObstacleOutsideSlab:
    case ErrorCode::RegionsNotSeparable:
    case ErrorCode::VerticalLine:
      return kPreconditions;
    case ErrorCode::AmbiguousCase:
    case ErrorCode::SingularEvaluation:
    case ErrorCode::DegenerateDenominator:
    case ErrorCode::NumericalFailure:
      return kNumerical;
    default:
      return kInvalidInput;
  }
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  f << text;
}

inline std::string fmt(double v, int prec = 12) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

// Draws from either kind of source; used for mixed polygon/Gaussian scenes.
inline MCEstimate mc_source_pair(const Source& a, const Source& b, const std::vector<ConvexPolygon>& obstacles,
                                 std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  const auto* pa = std::get_if<ConvexPolygon>(&a);
  const auto* pb = std::get_if<ConvexPolygon>(&b);
  const auto* ga = std::get_if<Gaussian>(&a);
  const auto* gb = std::get_if<Gaussian>(&b);
  if (pa && pb) return mc_uniform_pair(*pa, *pb, obstacles, samples, seed, threads);
  if (ga && gb) return mc_gaussian_pair(*ga, *gb, obstacles, samples, seed, threads);
  require_samples(samples);
  std::optional<ConvexSampler> sa, sb;
  if (pa) sa.emplace(*pa);
  if (pb) sb.emplace(*pb);
  auto draw = [](Philox4x32& rng, const Gaussian* g, const std::optional<ConvexSampler>& s) {
    if (g) return Point{g->center.x + g->sigma * rng.normal(), g->center.y + g->sigma * rng.normal()};
    return (*s)(rng);
  };
  const auto m = mc::run_batches(
      samples, seed,
      [&](Philox4x32& rng, std::uint64_t count, mc::Moments& acc) {
        for (std::uint64_t i = 0; i < count; ++i) {
          const Point p = draw(rng, ga, sa);
          const Point q = draw(rng, gb, sb);
          const double v = sees(p, q, obstacles) ? 1.0 : 0.0;
          acc.sum += v;
          acc.sum_sq += v;
          ++acc.n;
        }
      },
      threads);
  return mc::bernoulli(m, seed);
}

// Rotation (radians) that turns the best separating axis of the two sources
// into +x. Falls back to 0 when no axis separates them.
inline double auto_rotation(const Scene& s) {
  if (s.gaussian(0) || s.gaussian(1)) {
    auto c = [&](int i) {
      const auto& src = s.sources[static_cast<std::size_t>(i)];
      if (const auto* g = std::get_if<Gaussian>(&src)) return g->center;
      return std::get<ConvexPolygon>(src).centroid();
    };
    const Point d = c(1) - c(0);
    return -std::atan2(d.y, d.x);
  }
  const auto& A = std::get<ConvexPolygon>(s.sources[0]);
  const auto& B = std::get<ConvexPolygon>(s.sources[1]);
  double best_gap = 0, best = 0;
  for (const auto* P : {&A, &B}) {
    for (std::size_t i = 0; i < P->size(); ++i) {
      const Point e = P->vertex(i + 1) - P->vertex(i);
      Point axis{e.y, -e.x};
      axis = (1.0 / norm(axis)) * axis;
      const auto [a0, a1] = project(A.vertices(), axis);
      const auto [b0, b1] = project(B.vertices(), axis);
      const double gap = std::max(b0 - a1, a0 - b1);
      if (gap > best_gap) {
        best_gap = gap;
        const Point dir = b0 - a1 >= a0 - b1 ? axis : -1.0 * axis;
        best = -std::atan2(dir.y, dir.x);
      }
    }
  }
  return best;
}

inline std::string scene_svg(const Scene& s, const PolygonApproximation* m1, const PolygonApproximation* m2) {
  svg::Document doc;
  const PolygonApproximation* approx[2] = {m1, m2};
  for (int i = 0; i < 2; ++i) {
    const auto& src = s.sources[static_cast<std::size_t>(i)];
    if (const auto* P = std::get_if<ConvexPolygon>(&src)) {
      svg::add_source(doc, *P);
    } else if (approx[i]) {
      svg::add_polygons(doc, *approx[i]);
    } else {
      const auto& g = std::get<Gaussian>(src);
      for (int j = 3; j >= 1; --j) doc.circle(g.center, j * g.sigma, "fill=\"none\" stroke=\"#1f77b4\"");
    }
  }
  for (const auto& h : s.obstacles) svg::add_obstacle(doc, h);
  return doc.str();
}

struct ApproxArgs {
  std::string scene;
  int source = 1;
  std::optional<int> k;
  std::optional<double> epsilon;
  std::string shape = "disks";
  std::string svg, json;
};

inline int cmd_approx(const ApproxArgs& a, std::ostream& out) {
  const Scene s = load_scene(a.scene);
  const auto* g = std::get_if<Gaussian>(&s.sources[static_cast<std::size_t>(a.source - 1)]);
  if (!g) throw Error(ErrorCode::InvalidInput, "source " + std::to_string(a.source) + " must be a Gaussian");
  int k = 0;
  if (a.k) {
    if (*a.k < 1) throw Error(ErrorCode::InvalidInput, "--k must be >= 1");
    k = *a.k;
  } else if (a.epsilon || s.epsilon) {
    k = k_for_epsilon(a.epsilon ? *a.epsilon : *s.epsilon);
  } else {
    throw Error(ErrorCode::InvalidInput, "need --k or --epsilon (or an epsilon in the scene)");
  }
  const DiskApproximation d = optimal_disks(*g, k);
  nlohmann::json j{{"k", k},
                   {"sigma", g->sigma},
                   {"center", io::to_json(g->center)},
                   {"shape", a.shape},
                   {"error_bound", disk_error(k)}};
  out << "k = " << k << "\n"
      << "error bound ln((k+1)/k) = " << fmt(disk_error(k)) << "\n";
  j["disks"] = nlohmann::json::array();
  for (int i = 1; i <= k; ++i) {
    j["disks"].push_back({{"i", i}, {"r", d.r_at(i)}, {"w", d.w_at(i)}, {"rho", d.rho_at(i)}});
    out << "disk " << i << ": r = " << fmt(d.r_at(i)) << ", w = " << fmt(d.w_at(i)) << ", rho = " << fmt(d.rho_at(i))
        << "\n";
  }
  std::string picture;
  if (a.shape == "polygons") {
    const PolygonApproximation M = polygonize(d);
    j["polygons"] = nlohmann::json::array();
    for (std::size_t i = 0; i < M.pairs.size(); ++i) {
      const auto& p = M.pairs[i];
      j["polygons"].push_back({{"i", i + 1},
                               {"r_prime", p.r_prime},
                               {"r", p.r},
                               {"r_dprime", p.r_dprime},
                               {"n_inner", p.n_inner},
                               {"n_outer", p.n_outer},
                               {"weight", p.weight},
                               {"inner_vertices", io::to_json(p.inner.vertices())},
                               {"outer_vertices", io::to_json(p.outer.vertices())}});
      out << "pair " << i + 1 << ": n' = " << p.n_inner << ", n'' = " << p.n_outer << ", r' = " << fmt(p.r_prime)
          << ", r'' = " << fmt(p.r_dprime) << ", weight = " << fmt(p.weight) << "\n";
    }
    j["weighted_mass"] = M.weighted_mass();
    out << "weighted mass = " << fmt(M.weighted_mass()) << "\n";
    if (!a.svg.empty()) {
      svg::Document doc;
      svg::add_polygons(doc, M);
      picture = doc.str();
    }
  } else if (!a.svg.empty()) {
    svg::Document doc;
    svg::add_disks(doc, d);
    picture = doc.str();
  }
  if (!a.svg.empty()) write_file(a.svg, picture);
  if (!a.json.empty()) write_file(a.json, j.dump(2) + "\n");
  return kOk;
}

struct ProbArgs {
  std::string scene;
  std::string mode = "analytic";
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = mc::default_threads();
  std::optional<double> epsilon;
  bool renormalize = false;
  std::string rotate;
  std::string svg, dual_svg, json, csv, cells_csv;
};

inline int cmd_prob(const ProbArgs& a, std::ostream& out) {
  if (a.mode != "analytic" && a.mode != "mc" && a.mode != "both") {
    throw Error(ErrorCode::InvalidInput, "--mode must be analytic, mc or both");
  }
  Scene s = load_scene(a.scene);
  if (!a.rotate.empty()) {
    double theta = 0;
    if (a.rotate == "auto") {
      theta = auto_rotation(s);
    } else {
      try {
        theta = std::stod(a.rotate) * M_PI / 180;
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidInput, "--rotate takes degrees or \"auto\"");
      }
    }
    s = rotated(s, theta);
    out << "rotation: " << fmt(theta * 180 / M_PI) << " deg\n";
  }
  const bool analytic = a.mode != "mc";
  const bool mc = a.mode != "analytic";
  nlohmann::json j{{"mode", a.mode}};
  std::optional<double> p_analytic;
  std::optional<PolygonApproximation> m1, m2;

  if (analytic) {
    try {
      if (s.polygon(0) && s.polygon(1)) {
        const auto& P1 = std::get<ConvexPolygon>(s.sources[0]);
        const auto& P2 = std::get<ConvexPolygon>(s.sources[1]);
        EngineOptions eo;
        eo.keep_cells = !a.cells_csv.empty();
        const ProbabilityResult r = uniform_pair_probability(P1, P2, s.obstacles, eo);
        p_analytic = r.probability;
        out << "probability: " << fmt(r.probability) << "\n"
            << "numerator: " << fmt(r.numerator) << "\n"
            << "denominator: " << fmt(r.denominator) << "\n"
            << "cells: " << r.diagnostics.cells << "  splines: " << r.diagnostics.splines
            << "  fallback splines: " << r.diagnostics.fallback_splines << "\n"
            << "time: " << fmt(r.diagnostics.seconds, 4) << " s\n";
        j["analytic"] = {{"probability", r.probability},
                         {"numerator", r.numerator},
                         {"denominator", r.denominator},
                         {"cells", r.diagnostics.cells},
                         {"splines", r.diagnostics.splines},
                         {"fallback_splines", r.diagnostics.fallback_splines},
                         {"perturbation_applied", r.diagnostics.perturbation_applied},
                         {"seconds", r.diagnostics.seconds}};
        if (!a.cells_csv.empty()) {
          std::ostringstream c;
          c << "cell,blocked,mass,splines,fallback,cases\n";
          for (const auto& rep : r.cells) {
            c << rep.id << ',' << (rep.blocked ? 1 : 0) << ',' << fmt(rep.mass, 17) << ',' << rep.splines << ','
              << (rep.fallback ? 1 : 0) << ',';
            for (std::size_t t = 0; t < rep.case_tags.size(); ++t) {
              for (std::size_t u = 0; u < 8; ++u) c << (t || u ? " " : "") << to_string(rep.case_tags[t][u]);
            }
            c << '\n';
          }
          write_file(a.cells_csv, c.str());
        }
        if (!a.dual_svg.empty()) {
          write_file(a.dual_svg, svg::arrangement_svg(build_arrangement(P1, P2, s.obstacles), s.obstacles));
        }
      } else if (s.gaussian(0) && s.gaussian(1)) {
        const double eps = a.epsilon ? *a.epsilon : (s.epsilon ? *s.epsilon : 0.0);
        if (!a.epsilon && !s.epsilon) throw Error(ErrorCode::InvalidInput, "Gaussian scenes need an epsilon");
        PipelineOptions po;
        po.renormalize = a.renormalize;
        const PipelineResult pr = gaussian_visibility_detailed(std::get<Gaussian>(s.sources[0]),
                                                               std::get<Gaussian>(s.sources[1]), s.obstacles, eps, po);
        const auto& r = pr.result;
        p_analytic = r.probability;
        m1 = polygonize(optimal_disks(std::get<Gaussian>(s.sources[0]), pr.k1));
        m2 = polygonize(optimal_disks(std::get<Gaussian>(s.sources[1]), pr.k2));
        out << "probability: " << fmt(r.probability) << "\n"
            << "numerator: " << fmt(r.numerator) << "\n"
            << "denominator: " << fmt(r.denominator) << (a.renormalize ? " (renormalized)" : "") << "\n"
            << "epsilon: " << fmt(eps) << "  k1: " << pr.k1 << "  k2: " << pr.k2 << "\n"
            << "captured mass: " << fmt(pr.mass1) << " x " << fmt(pr.mass2) << "\n"
            << "polygon pairs: " << r.diagnostics.pairs << " (" << r.diagnostics.pairs_unobstructed
            << " unobstructed)\n"
            << "cells: " << r.diagnostics.cells << "  splines: " << r.diagnostics.splines
            << "  fallback splines: " << r.diagnostics.fallback_splines << "\n"
            << "time: " << fmt(r.diagnostics.seconds, 4) << " s\n";
        j["analytic"] = {{"probability", r.probability},
                         {"numerator", r.numerator},
                         {"denominator", r.denominator},
                         {"epsilon", eps},
                         {"k1", pr.k1},
                         {"k2", pr.k2},
                         {"mass1", pr.mass1},
                         {"mass2", pr.mass2},
                         {"pairs", r.diagnostics.pairs},
                         {"pairs_unobstructed", r.diagnostics.pairs_unobstructed},
                         {"cells", r.diagnostics.cells},
                         {"splines", r.diagnostics.splines},
                         {"fallback_splines", r.diagnostics.fallback_splines},
                         {"seconds", r.diagnostics.seconds}};
      } else {
        throw Error(ErrorCode::NotSeparable, "mixed polygon/Gaussian scenes have no analytic path");
      }
    } catch (const Error& e) {
      if (exit_code(e.code()) == kPreconditions) {
        throw Error(e.code(), e.detail() + " (analytic preconditions unmet; try --mode mc)");
      }
      throw;
    }
  }

  if (mc) {
    const MCEstimate est = mc_source_pair(s.sources[0], s.sources[1], s.obstacles, a.samples, a.seed, a.threads);
    out << "mc: " << fmt(est.mean) << " +- " << fmt(est.half_width_95, 4) << " (95%, samples " << est.samples
        << ", seed " << est.seed << ")\n";
    j["mc"] = {{"mean", est.mean},
               {"half_width_95", est.half_width_95},
               {"samples", est.samples},
               {"seed", est.seed}};
    if (p_analytic) {
      const double diff = *p_analytic - est.mean;
      const double z = est.sigma() > 0 ? diff / est.sigma() : (diff == 0 ? 0.0 : std::copysign(INFINITY, diff));
      out << "discrepancy: " << fmt(diff, 6) << " = " << fmt(z, 4) << " MC sigmas\n";
      j["z"] = std::isfinite(z) ? nlohmann::json(z) : nlohmann::json(nullptr);
    }
    if (!a.csv.empty()) {
      std::ostringstream c;
      c << "scene,mean,half_width_95,samples,seed\n"
        << a.scene << ',' << fmt(est.mean, 17) << ',' << fmt(est.half_width_95, 17) << ',' << est.samples << ','
        << est.seed << '\n';
      write_file(a.csv, c.str());
    }
  }
  if (!a.svg.empty()) write_file(a.svg, scene_svg(s, m1 ? &*m1 : nullptr, m2 ? &*m2 : nullptr));
  if (!a.json.empty()) write_file(a.json, j.dump(2) + "\n");
  return kOk;
}

struct ConvexityArgs {
  std::string polygon;
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  unsigned threads = mc::default_threads();
  std::string json, csv;
};

inline int cmd_convexity(const ConvexityArgs& a, std::ostream& out) {
  const PolygonWithHoles P = load_polygon_with_holes(a.polygon);
  const MCEstimate est = mc_degree_of_convexity(P, a.samples, a.seed, a.threads);
  out << "degree of convexity: " << fmt(est.mean) << " +- " << fmt(est.half_width_95, 4) << " (95%, samples "
      << est.samples << ", seed " << est.seed << ")\n";
  if (!a.json.empty()) {
    write_file(a.json, nlohmann::json{{"mean", est.mean},
                                      {"half_width_95", est.half_width_95},
                                      {"samples", est.samples},
                                      {"seed", est.seed}}
                               .dump(2) +
                           "\n");
  }
  if (!a.csv.empty()) {
    std::ostringstream c;
    c << "scene,mean,half_width_95,samples,seed\n"
      << a.polygon << ',' << fmt(est.mean, 17) << ',' << fmt(est.half_width_95, 17) << ',' << est.samples << ','
      << est.seed << '\n';
    write_file(a.csv, c.str());
  }
  return kOk;
}

// Scaling scene with about `n` vertices in total: two regular n/4-gons and
// n/8 small diamonds spread through the slab between them.
inline Scene bench_scene(int n) {
  const int q = std::max(3, n / 4);
  const int b = std::max(1, n / 8);
  Scene s{{regular_polygon({0, 0}, 1.0, q, 0.1), regular_polygon({10, 0}, 1.0, q, 0.2)}, {}, std::nullopt};
  const double pitch = 6.0 / b;
  const double h = std::min(0.4, 0.4 * pitch);
  for (int j = 0; j < b; ++j) {
    const Point c{2 + pitch * (j + 0.5), 0.8 * std::sin(2.4 * j)};
    s.obstacles.push_back(ConvexPolygon({{c.x - h, c.y}, {c.x, c.y - h}, {c.x + h, c.y}, {c.x, c.y + h}}));
  }
  return s;
}

inline int total_vertices(const Scene& s) {
  std::size_t n = std::get<ConvexPolygon>(s.sources[0]).size() + std::get<ConvexPolygon>(s.sources[1]).size();
  for (const auto& h : s.obstacles) n += h.size();
  return static_cast<int>(n);
}

struct BenchRow {
  int n{0};
  int trial{0};
  std::size_t cells{0};
  double seconds{0};
};

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

inline std::vector<BenchRow> run_bench(const std::vector<int>& sizes, int trials) {
  std::vector<BenchRow> rows;
  for (int n : sizes) {
    const Scene s = bench_scene(n);
    for (int t = 0; t < trials; ++t) {
      EngineOptions eo;
      eo.keep_cells = false;
      const ProbabilityResult r = uniform_pair_probability(std::get<ConvexPolygon>(s.sources[0]),
                                                           std::get<ConvexPolygon>(s.sources[1]), s.obstacles, eo);
      rows.push_back({total_vertices(s), t, r.diagnostics.cells, r.diagnostics.seconds});
    }
  }
  return rows;
}

// Slopes over the per-size minimum time and the (deterministic) cell count.
inline std::pair<double, double> bench_slopes(const std::vector<BenchRow>& rows) {
  std::vector<double> n, cells, secs;
  for (const auto& r : rows) {
    if (n.empty() || n.back() != r.n) {
      n.push_back(r.n);
      cells.push_back(static_cast<double>(r.cells));
      secs.push_back(r.seconds);
    } else {
      secs.back() = std::min(secs.back(), r.seconds);
    }
  }
  if (n.size() < 2) return {NAN, NAN};
  return {loglog_slope(n, cells), loglog_slope(n, secs)};
}

struct BenchArgs {
  std::vector<int> sizes{8, 16, 32, 64, 128};
  int trials = 3;
  std::string csv;
};

inline int cmd_bench(const BenchArgs& a, std::ostream& out) {
  if (a.trials < 1) throw Error(ErrorCode::InvalidInput, "--trials must be >= 1");
  for (int n : a.sizes) {
    if (n < 3) throw Error(ErrorCode::InvalidInput, "--sizes entries must be >= 3");
  }
  const auto rows = run_bench(a.sizes, a.trials);
  std::ostringstream c;
  c << "N,trial,cells,seconds\n";
  for (const auto& r : rows) c << r.n << ',' << r.trial << ',' << r.cells << ',' << fmt(r.seconds, 6) << '\n';
  out << c.str();
  const auto [sc, st] = bench_slopes(rows);
  out << "log-log slope: cells " << fmt(sc, 4) << ", time " << fmt(st, 4) << "\n";
  if (!a.csv.empty()) write_file(a.csv, c.str());
  return kOk;
}

// Entry point shared by the executable and the tests. `args` excludes argv[0].
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Visibility probability between imprecise points"};
  app.require_subcommand(1);
  std::optional<double> tol;
  app.add_option("--tolerance", tol, "incidence tolerance (default 1e-9 or $VISPROB_TOLERANCE)");

  ApproxArgs aa;
  auto* approx = app.add_subcommand("approx", "approximate a Gaussian source by weighted disks or polygons");
  approx->add_option("scene", aa.scene, "scene JSON")->required();
  approx->add_option("--source", aa.source, "which source (1 or 2)")->check(CLI::Range(1, 2));
  auto* k_opt = approx->add_option("--k", aa.k, "number of disks");
  approx->add_option("--epsilon", aa.epsilon, "target error")->excludes(k_opt);
  approx->add_option("--shape", aa.shape)->check(CLI::IsMember({"disks", "polygons"}));
  approx->add_option("--svg", aa.svg);
  approx->add_option("--json", aa.json);

  ProbArgs pa;
  auto* prob = app.add_subcommand("prob", "visibility probability between the two sources");
  prob->add_option("scene", pa.scene, "scene JSON")->required();
  prob->add_option("--mode", pa.mode)->check(CLI::IsMember({"analytic", "mc", "both"}));
  prob->add_option("--samples", pa.samples);
  prob->add_option("--seed", pa.seed);
  prob->add_option("--threads", pa.threads);
  prob->add_option("--epsilon", pa.epsilon, "Gaussian scenes: overrides the scene epsilon");
  prob->add_flag("--renormalize", pa.renormalize);
  prob->add_option("--rotate", pa.rotate, "pre-rotate the scene: degrees, or \"auto\"");
  prob->add_option("--svg", pa.svg);
  prob->add_option("--dual-svg", pa.dual_svg, "polygon scenes: dual arrangement picture");
  prob->add_option("--json", pa.json);
  prob->add_option("--csv", pa.csv, "Monte-Carlo row as CSV");
  prob->add_option("--cells-csv", pa.cells_csv, "polygon scenes: per-cell masses and case tags");

  ConvexityArgs ca;
  auto* conv = app.add_subcommand("convexity", "degree of convexity of a polygon with holes");
  conv->add_option("polygon", ca.polygon, "polygon JSON")->required();
  conv->add_option("--samples", ca.samples);
  conv->add_option("--seed", ca.seed);
  conv->add_option("--threads", ca.threads);
  conv->add_option("--json", ca.json);
  conv->add_option("--csv", ca.csv);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "cell count and time against scene size");
  bench->add_option("--sizes", ba.sizes)->delimiter(',');
  bench->add_option("--trials", ba.trials);
  bench->add_option("--csv", ba.csv);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }

  try {
    if (tol) set_tolerance(*tol);
    if (*approx) return cmd_approx(aa, out);
    if (*prob) return cmd_prob(pa, out);
    if (*conv) return cmd_convexity(ca, out);
    return cmd_bench(ba, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace visprob::cli
