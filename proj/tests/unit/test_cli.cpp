#include <gtest/gtest.h>

#include <sys/wait.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <filesystem>

#include "../support/test_support.hpp"
#include "visprob/cli.hpp"

using namespace visprob;
namespace fs = std::filesystem;

namespace {
struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int c = cli::run_cli(args, o, e);
  return {c, o.str(), e.str()};
}

std::string sample(const std::string& name) { return std::string(VISPROB_SAMPLES_DIR) + "/" + name; }

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("visprob_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name)) << text;
    return file(name);
  }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path);
  return nlohmann::json::parse(f);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  return {std::istreambuf_iterator<char>(f), {}};
}

void expect_valid_xml(const std::string& path) {
  boost::property_tree::ptree t;
  EXPECT_NO_THROW(boost::property_tree::read_xml(path, t)) << path;
  EXPECT_EQ(t.count("svg"), 1u);
}
}  // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"prob"}).code, 2);
  EXPECT_EQ(invoke({"prob", "/nonexistent/scene.json"}).code, 2);
  EXPECT_EQ(invoke({"prob", sample("two_squares.json"), "--mode", "sideways"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);

  TempDir d;
  EXPECT_EQ(invoke({"prob", d.write("bad.json", "{\"sources\": [")}).code, 2);
  const auto one = invoke({"prob", d.write("one.json", R"({"sources":[{"type":"gaussian","center":[0,0],"sigma":1}]})")});
  EXPECT_EQ(one.code, 2);
  EXPECT_NE(one.err.find("two sources"), std::string::npos);
  EXPECT_EQ(invoke({"prob", d.write("sigma.json", R"({"sources":[{"type":"gaussian","center":[0,0],"sigma":-1},
      {"type":"gaussian","center":[9,0],"sigma":1}],"epsilon":0.5})")})
                .code,
            2);
  EXPECT_EQ(invoke({"approx", sample("two_squares.json"), "--k", "1"}).code, 2);

  // overlapping sources: analytic preconditions unmet, MC still works
  const std::string overlap = d.write("overlap.json", R"({"sources":[
      {"type":"polygon","vertices":[[0,0],[2,0],[2,2],[0,2]]},
      {"type":"polygon","vertices":[[1,1],[3,1],[3,3],[1,3]]}]})");
  const auto r = invoke({"prob", overlap});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("--mode mc"), std::string::npos);
  EXPECT_EQ(invoke({"prob", overlap, "--mode", "mc", "--samples", "5000"}).code, 0);
  EXPECT_EQ(invoke({"convexity", d.write("bowtie.json", R"({"outer":[[0,0],[1,1],[1,0],[0,1]]})")}).code, 2);
}

TEST(Cli, BinaryExitStatus) {
  const std::string bin = VISPROB_CLI;
  auto status = [&](const std::string& args) {
    const int s = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("prob " + sample("two_squares.json")), 0);
  EXPECT_EQ(status("prob /nonexistent.json"), 2);
}

TEST(Cli, ApproxKTwo) {
  TempDir d;
  const auto r = invoke({"approx", sample("gaussian_k.json"), "--k", "2", "--json", d.file("a.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = read_json(d.file("a.json"));
  EXPECT_EQ(j["k"], 2);
  EXPECT_NEAR(j["disks"][0]["r"].get<double>(), std::sqrt(2 * std::log(1.5)), 1e-14);
  EXPECT_NEAR(j["disks"][1]["r"].get<double>(), std::sqrt(2 * std::log(6.0)), 1e-14);
  EXPECT_NEAR(j["disks"][0]["w"].get<double>(), 1 / (3 * M_PI), 1e-15);
  EXPECT_NEAR(j["disks"][1]["w"].get<double>(), 1 / (6 * M_PI), 1e-15);
  EXPECT_EQ(j["disks"][0]["rho"].get<double>(), 0.0);
  EXPECT_NEAR(j["disks"][1]["rho"].get<double>(), std::sqrt(2 * std::log(3.0)), 1e-14);
  EXPECT_NEAR(j["error_bound"].get<double>(), std::log(1.5), 1e-15);
  EXPECT_NE(r.out.find("k = 2"), std::string::npos);
}

TEST(Cli, ApproxEpsilonBoundary) {
  // ln 2 itself gives one disk; 0.6931 is just below ln 2 and needs two
  EXPECT_NE(invoke({"approx", sample("gaussian_k.json"), "--epsilon", "0.69314718055994531"}).out.find("k = 1\n"),
            std::string::npos);
  EXPECT_NE(invoke({"approx", sample("gaussian_k.json"), "--epsilon", "0.6931"}).out.find("k = 2\n"), std::string::npos);
  EXPECT_EQ(invoke({"approx", sample("gaussian_k.json"), "--epsilon", "0"}).code, 2);
  EXPECT_EQ(invoke({"approx", sample("gaussian_k.json"), "--k", "2", "--epsilon", "0.5"}).code, 2);
}

TEST(Cli, ApproxPolygonsAndSvg) {
  TempDir d;
  const auto r = invoke({"approx", sample("gaussian_k.json"), "--shape", "polygons", "--k", "1", "--json",
                      d.file("p.json"), "--svg", d.file("p.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = read_json(d.file("p.json"));
  EXPECT_EQ(j["polygons"][0]["n_inner"], 4);
  EXPECT_NE(r.out.find("n' = 4"), std::string::npos);
  expect_valid_xml(d.file("p.svg"));
  EXPECT_EQ(j["polygons"][0]["inner_vertices"][0][1].get<double>(), 0.0);
  EXPECT_NEAR(j["polygons"][0]["inner_vertices"][0][0].get<double>(), std::sqrt(2 * std::log(2.0)), 1e-14);
  // the same square is drawn in the picture
  const std::string pic = slurp(d.file("p.svg"));
  const double r1 = j["polygons"][0]["inner_vertices"][0][0].get<double>();
  EXPECT_NE(pic.find("points=\"" + svg::Document::num(r1) + ",0 "), std::string::npos) << pic.substr(0, 800);

  ASSERT_EQ(invoke({"approx", sample("gaussian_k.json"), "--k", "3", "--svg", d.file("disks.svg")}).code, 0);
  expect_valid_xml(d.file("disks.svg"));
  EXPECT_EQ(slurp(d.file("disks.svg")).find("<circle") != std::string::npos, true);
}

TEST(Cli, ProbExamples) {
  TempDir d;
  const auto a = invoke({"prob", sample("two_squares.json"), "--json", d.file("a.json")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(read_json(d.file("a.json"))["analytic"]["probability"].get<double>(), 1.0);
  const auto b = invoke({"prob", sample("full_wall.json"), "--json", d.file("b.json")});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(read_json(d.file("b.json"))["analytic"]["probability"].get<double>(), 0.0);
  EXPECT_NE(a.out.find("cells:"), std::string::npos);
  EXPECT_NE(a.out.find("time:"), std::string::npos);
}

TEST(Cli, ProbBothZScore) {
  TempDir d;
  vt::Rng g(61);
  for (int t = 0; t < 3; ++t) {
    const auto s = vt::random_case_one(g, 2, 3, 6);
    const std::string path = d.write("s" + std::to_string(t) + ".json",
                                     serialize_scene(Scene{{s.P1, s.P2}, s.obstacles, std::nullopt}));
    const auto r = invoke({"prob", path, "--mode", "both", "--samples", "200000", "--seed", std::to_string(7 + t),
                        "--json", d.file("r.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = read_json(d.file("r.json"));
    ASSERT_TRUE(j["z"].is_number()) << r.out;
    EXPECT_LE(std::abs(j["z"].get<double>()), 3.5) << r.out;
    EXPECT_NE(r.out.find("MC sigmas"), std::string::npos);
  }
}

TEST(Cli, ProbOutputs) {
  TempDir d;
  const auto r = invoke({"prob", sample("small_block.json"), "--mode", "both", "--samples", "20000", "--svg",
                      d.file("s.svg"), "--dual-svg", d.file("dual.svg"), "--csv", d.file("mc.csv"), "--cells-csv",
                      d.file("cells.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  expect_valid_xml(d.file("s.svg"));
  expect_valid_xml(d.file("dual.svg"));
  const std::string csv = slurp(d.file("mc.csv"));
  EXPECT_EQ(csv.rfind("scene,mean,half_width_95,samples,seed\n", 0), 0u);
  EXPECT_NE(csv.find(",20000,1\n"), std::string::npos);
  // the obstacle's corner (1.9, 0.45) is drawn in the scene picture
  const std::string svg = slurp(d.file("s.svg"));
  EXPECT_NE(svg.find("points=\"1.9,0.45 2.1,0.45 2.1,0.55 1.9,0.55\""), std::string::npos);

  // per-cell masses add up to the reported denominator
  std::istringstream cells(slurp(d.file("cells.csv")));
  std::string line;
  std::getline(cells, line);
  double total = 0;
  int rows = 0;
  while (std::getline(cells, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
    ASSERT_GE(f.size(), 5u);
    total += std::stod(f[2]);
    ++rows;
  }
  EXPECT_GT(rows, 0);
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(Cli, RotateKeepsProbability) {
  TempDir d;
  ASSERT_EQ(invoke({"prob", sample("small_block.json"), "--json", d.file("a.json")}).code, 0);
  ASSERT_EQ(invoke({"prob", sample("small_block.json"), "--rotate", "30", "--json", d.file("b.json")}).code, 0);
  EXPECT_NEAR(read_json(d.file("a.json"))["analytic"]["probability"].get<double>(),
              read_json(d.file("b.json"))["analytic"]["probability"].get<double>(), 1e-9);
  EXPECT_EQ(invoke({"prob", sample("small_block.json"), "--rotate", "sideways"}).code, 2);
}

TEST(Cli, GaussianScene) {
  TempDir d;
  const auto r = invoke({"prob", sample("gaussian_k.json"), "--epsilon", "0.6", "--renormalize", "--svg",
                      d.file("g.svg"), "--json", d.file("g.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(read_json(d.file("g.json"))["analytic"]["probability"].get<double>(), 1.0, 1e-12);
  expect_valid_xml(d.file("g.svg"));
  EXPECT_EQ(invoke({"prob", sample("gaussian_k.json")}).code, 2);  // no epsilon anywhere
}

TEST(Cli, Determinism) {
  const std::vector<std::string> a{"prob", sample("small_block.json"), "--mode", "both", "--samples", "50000",
                                   "--seed", "5"};
  auto strip_time = [](std::string s) {
    const auto p = s.find("time:");
    return s.erase(p, s.find('\n', p) - p);
  };
  EXPECT_EQ(strip_time(invoke(a).out), strip_time(invoke(a).out));
  const std::vector<std::string> c{"convexity", sample("l_shape.json"), "--samples", "20000", "--seed", "3"};
  EXPECT_EQ(invoke(c).out, invoke(c).out);
}

TEST(Cli, Convexity) {
  TempDir d;
  ASSERT_EQ(invoke({"convexity", sample("hexagon.json"), "--samples", "20000", "--json", d.file("h.json")}).code, 0);
  EXPECT_EQ(read_json(d.file("h.json"))["mean"].get<double>(), 1.0);
  ASSERT_EQ(
      invoke({"convexity", sample("square_with_hole.json"), "--samples", "20000", "--json", d.file("w.json")}).code, 0);
  const auto w = read_json(d.file("w.json"));
  EXPECT_LT(w["mean"].get<double>(), 0.3);
  EXPECT_GT(w["half_width_95"].get<double>(), 0.0);
}

TEST(Cli, SceneRoundTrip) {
  const auto r = vt::for_all("scene round trip", 1000, 62, [](vt::Rng& g, int) -> std::optional<std::string> {
    const auto c = vt::random_case_one(g, g.integer(0, 3));
    Scene s{{c.P1, c.P2}, c.obstacles, std::nullopt};
    if (g.integer(0, 1)) s.sources[0] = Gaussian({g.uni(-5, 5), g.uni(-5, 5)}, g.uni(0.1, 3));
    if (g.integer(0, 1)) s.epsilon = g.uni(0.01, 1);
    const std::string text = serialize_scene(s);
    const Scene back = parse_scene(text);
    if (serialize_scene(back) != text) return "serialization not stable";
    for (int i = 0; i < 2; ++i) {
      if (s.gaussian(i) != back.gaussian(i)) return "source kind changed";
      if (s.gaussian(i)) {
        const auto& a = std::get<Gaussian>(s.sources[i]);
        const auto& b = std::get<Gaussian>(back.sources[i]);
        if (!(a.center == b.center) || a.sigma != b.sigma) return "gaussian changed";
      } else if (std::get<ConvexPolygon>(s.sources[i]).vertices() != std::get<ConvexPolygon>(back.sources[i]).vertices()) {
        return "polygon changed";
      }
    }
    if (back.obstacles.size() != s.obstacles.size()) return "obstacle count changed";
    for (std::size_t k = 0; k < s.obstacles.size(); ++k) {
      if (back.obstacles[k].vertices() != s.obstacles[k].vertices()) return "obstacle changed";
    }
    if (back.epsilon != s.epsilon) return "epsilon changed";
    return std::nullopt;
  });
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(Cli, Bench) {
  const auto a = cli::run_bench({8, 16}, 1);
  const auto b = cli::run_bench({8, 16}, 1);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].cells, b[i].cells);
  EXPECT_LT(a[0].seconds, 1.0);
  const auto r = invoke({"bench", "--sizes", "8,16,32", "--trials", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("N,trial,cells,seconds\n", 0), 0u);
  EXPECT_NE(r.out.find("log-log slope"), std::string::npos);
  EXPECT_EQ(invoke({"bench", "--trials", "0"}).code, 2);
  EXPECT_NEAR(cli::loglog_slope({1, 2, 4}, {3, 12, 48}), 2.0, 1e-12);
}
