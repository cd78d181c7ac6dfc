#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "gaussian_approx.hpp"
#include "geom_core.hpp"
#include "mc_oracle.hpp"
#include "visibility_engine.hpp"

namespace visprob {

using Source = std::variant<Gaussian, ConvexPolygon>;

struct Scene {
  std::array<Source, 2> sources;
  std::vector<ConvexPolygon> obstacles;
  std::optional<double> epsilon;

  bool gaussian(int i) const { return std::holds_alternative<Gaussian>(sources[static_cast<std::size_t>(i)]); }
  bool polygon(int i) const { return std::holds_alternative<ConvexPolygon>(sources[static_cast<std::size_t>(i)]); }
};

inline bool convex_polygons_overlap(const ConvexPolygon& a, const ConvexPolygon& b) {
  return convex_polygons_intersect(a.vertices(), b.vertices(), 0.0);
}

inline void validate_obstacles(const std::vector<ConvexPolygon>& obstacles) {
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    for (std::size_t j = i + 1; j < obstacles.size(); ++j) {
      if (convex_polygons_overlap(obstacles[i], obstacles[j])) {
        throw Error(ErrorCode::ObstaclesOverlap,
                    "obstacles " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
      }
    }
  }
}

namespace io {

using nlohmann::json;

inline double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw Error(ErrorCode::InvalidInput, what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, what + " must be finite");
  return v;
}

inline Point point(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::InvalidInput, what + " must be [x, y]");
  return {number(j[0], what + ".x"), number(j[1], what + ".y")};
}

inline std::vector<Point> ring(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, what + " must be a list of [x, y]");
  std::vector<Point> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

inline const json& field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::InvalidInput, what + " is missing \"" + key + "\"");
  }
  return j.at(key);
}

inline ConvexPolygon polygon(const json& j, const std::string& what) {
  try {
    return ConvexPolygon(ring(field(j, "vertices", what), what + ".vertices"));
  } catch (const Error& e) {
    throw Error(e.code(), what + ": " + e.detail());
  }
}

inline json to_json(Point p) { return json::array({p.x, p.y}); }

inline json to_json(const std::vector<Point>& r) {
  json a = json::array();
  for (Point p : r) a.push_back(to_json(p));
  return a;
}

inline json to_json(const Source& s) {
  if (const auto* g = std::get_if<Gaussian>(&s)) {
    return {{"type", "gaussian"}, {"center", to_json(g->center)}, {"sigma", g->sigma}};
  }
  return {{"type", "polygon"}, {"vertices", to_json(std::get<ConvexPolygon>(s).vertices())}};
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace io

inline Source source_from_json(const nlohmann::json& j, const std::string& what) {
  const auto& t = io::field(j, "type", what);
  if (t == "gaussian") {
    try {
      return Gaussian(io::point(io::field(j, "center", what), what + ".center"),
                      io::number(io::field(j, "sigma", what), what + ".sigma"));
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidInput, what + ": " + e.detail());
    }
  }
  if (t == "polygon") return io::polygon(j, what);
  throw Error(ErrorCode::InvalidInput, what + ".type must be \"gaussian\" or \"polygon\"");
}

inline Scene scene_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "scene must be a JSON object");
  const auto& src = io::field(j, "sources", "scene");
  if (!src.is_array() || src.size() != 2) throw Error(ErrorCode::InvalidInput, "scene needs exactly two sources");
  Scene s{{source_from_json(src[0], "sources[0]"), source_from_json(src[1], "sources[1]")}, {}, std::nullopt};
  if (j.contains("obstacles")) {
    const auto& obs = j.at("obstacles");
    if (!obs.is_array()) throw Error(ErrorCode::InvalidInput, "obstacles must be a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      s.obstacles.push_back(io::polygon(obs[i], "obstacles[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("epsilon")) {
    const double e = io::number(j.at("epsilon"), "epsilon");
    if (!(e > 0)) throw Error(ErrorCode::NonPositiveEpsilon, "epsilon must be positive");
    s.epsilon = e;
  }
  validate_obstacles(s.obstacles);
  return s;
}

inline nlohmann::json scene_to_json(const Scene& s) {
  nlohmann::json j;
  j["sources"] = nlohmann::json::array({io::to_json(s.sources[0]), io::to_json(s.sources[1])});
  j["obstacles"] = nlohmann::json::array();
  for (const auto& h : s.obstacles) j["obstacles"].push_back({{"vertices", io::to_json(h.vertices())}});
  if (s.epsilon) j["epsilon"] = *s.epsilon;
  return j;
}

inline Scene parse_scene(const std::string& text) { return scene_from_json(io::parse_text(text)); }
inline Scene load_scene(const std::string& path) { return parse_scene(io::read_file(path)); }
inline std::string serialize_scene(const Scene& s) { return scene_to_json(s).dump(2); }

// {"outer": [[x,y],...], "holes": [[[x,y],...], ...]}
inline PolygonWithHoles polygon_with_holes_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "polygon file must be a JSON object");
  std::vector<std::vector<Point>> holes;
  if (j.contains("holes")) {
    const auto& h = j.at("holes");
    if (!h.is_array()) throw Error(ErrorCode::InvalidInput, "holes must be a list");
    for (std::size_t i = 0; i < h.size(); ++i) holes.push_back(io::ring(h[i], "holes[" + std::to_string(i) + "]"));
  }
  return PolygonWithHoles(io::ring(io::field(j, "outer", "polygon"), "outer"), std::move(holes));
}

inline nlohmann::json polygon_with_holes_to_json(const PolygonWithHoles& P) {
  nlohmann::json j{{"outer", io::to_json(P.outer())}, {"holes", nlohmann::json::array()}};
  for (const auto& h : P.holes()) j["holes"].push_back(io::to_json(h));
  return j;
}

inline PolygonWithHoles load_polygon_with_holes(const std::string& path) {
  return polygon_with_holes_from_json(io::parse_text(io::read_file(path)));
}

// Rigid rotation of every source and obstacle about the origin.
inline Scene rotated(const Scene& s, double radians) {
  const double c = std::cos(radians), sn = std::sin(radians);
  auto rot = [&](Point p) { return Point{c * p.x - sn * p.y, sn * p.x + c * p.y}; };
  Scene out = s;
  for (auto& src : out.sources) {
    if (auto* g = std::get_if<Gaussian>(&src)) {
      *g = Gaussian(rot(g->center), g->sigma);
    } else {
      src = std::get<ConvexPolygon>(src).mapped(rot);
    }
  }
  for (auto& h : out.obstacles) h = h.mapped(rot);
  return out;
}

}  // namespace visprob
