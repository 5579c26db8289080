#pragma once

// JSON documents: chain presets, robot geometry, scenes, scene specs, task
// goals, dynamics and plan results. Quaternions are stored as [w, x, y, z].

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "redugoal/collision.hpp"
#include "redugoal/ik.hpp"
#include "redugoal/kinematics.hpp"
#include "redugoal/planner.hpp"
#include "redugoal/scenes.hpp"
#include "redugoal/timing.hpp"

#ifndef REDUGOAL_DATA_DIR
#define REDUGOAL_DATA_DIR "data"
#endif

namespace redugoal {

using nlohmann::json;

inline std::filesystem::path data_dir() {
  if (const char* env = std::getenv("REDUGOAL_DATA_DIR")) return env;
  return REDUGOAL_DATA_DIR;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ArgumentError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

inline Eigen::Vector3d vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ArgumentError("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline json vec3_to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Eigen::Quaterniond quat_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ArgumentError("expected quaternion [w, x, y, z]");
  Eigen::Quaterniond q(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
  if (q.norm() < 1e-12) throw ArgumentError("quaternion has zero norm");
  return q.normalized();
}

inline json quat_to_json(const Eigen::Quaterniond& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

inline Pose pose_from_json(const json& j) {
  Pose p;
  p.position = vec3_from_json(j.at("position"));
  p.orientation = j.contains("quaternion") ? quat_from_json(j.at("quaternion")) : Eigen::Quaterniond::Identity();
  return p;
}

inline json pose_to_json(const Pose& p) {
  return {{"position", vec3_to_json(p.position)}, {"quaternion", quat_to_json(p.orientation)}};
}

// ---- kinematic chains --------------------------------------------------------

inline KinematicChain chain_from_json(const json& j) {
  std::vector<JointModel> joints;
  for (const auto& jj : j.at("joints")) {
    JointModel m;
    m.dh.a = jj.at("a").get<double>();
    m.dh.alpha = jj.at("alpha").get<double>();
    m.dh.d = jj.at("d").get<double>();
    m.dh.theta_offset = jj.value("theta_offset", 0.0);
    m.limit_lo = jj.at("limit_lo").get<double>();
    m.limit_hi = jj.at("limit_hi").get<double>();
    joints.push_back(m);
  }
  const auto base = j.contains("base_frame") ? pose_from_json(j["base_frame"]).to_isometry() : Eigen::Isometry3d::Identity();
  const auto tool = j.contains("tool_frame") ? pose_from_json(j["tool_frame"]).to_isometry() : Eigen::Isometry3d::Identity();
  return KinematicChain(j.value("name", std::string("chain")), std::move(joints), base, tool);
}

inline json chain_to_json(const KinematicChain& chain) {
  json joints = json::array();
  for (const auto& m : chain.joints()) {
    joints.push_back({{"a", m.dh.a}, {"alpha", m.dh.alpha}, {"d", m.dh.d}, {"theta_offset", m.dh.theta_offset},
                      {"limit_lo", m.limit_lo}, {"limit_hi", m.limit_hi}});
  }
  return {{"name", chain.name()},
          {"joints", joints},
          {"base_frame", pose_to_json(Pose::from_isometry(chain.base_frame()))},
          {"tool_frame", pose_to_json(Pose::from_isometry(chain.tool_frame()))}};
}

/// A preset name ("ur5", "ur5-elbow-limited", "ur5-vine") or a JSON file path.
inline KinematicChain load_chain(const std::string& name_or_path) {
  std::filesystem::path p(name_or_path);
  if (!std::filesystem::exists(p)) p = data_dir() / "chains" / (name_or_path + ".json");
  if (!std::filesystem::exists(p)) throw ArgumentError("unknown chain preset '" + name_or_path + "'");
  return chain_from_json(read_json_file(p));
}

// ---- robot geometry ------------------------------------------------------------

inline RobotGeometry robot_from_json(const json& j) {
  RobotGeometry g;
  g.name = j.value("name", std::string("robot"));
  for (const auto& c : j.at("link_capsules")) {
    g.link_capsules.push_back({c.at("link").get<std::size_t>(), vec3_from_json(c.at("p0")), vec3_from_json(c.at("p1")),
                               c.at("radius").get<double>()});
  }
  if (j.contains("self_check_pairs")) {
    for (const auto& p : j["self_check_pairs"]) g.self_check_pairs.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
  }
  return g;
}

inline json robot_to_json(const RobotGeometry& g) {
  json caps = json::array();
  for (const auto& c : g.link_capsules) {
    caps.push_back({{"link", c.link}, {"p0", vec3_to_json(c.p0)}, {"p1", vec3_to_json(c.p1)}, {"radius", c.radius}});
  }
  json pairs = json::array();
  for (const auto& [a, b] : g.self_check_pairs) pairs.push_back(json::array({a, b}));
  return {{"name", g.name}, {"link_capsules", caps}, {"self_check_pairs", pairs}};
}

inline RobotGeometry load_robot(const std::string& name_or_path) {
  std::filesystem::path p(name_or_path);
  if (!std::filesystem::exists(p)) p = data_dir() / "robots" / (name_or_path + ".json");
  if (!std::filesystem::exists(p)) throw ArgumentError("unknown robot geometry '" + name_or_path + "'");
  return robot_from_json(read_json_file(p));
}

// ---- shapes and scenes ---------------------------------------------------------

inline Shape shape_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  Shape s;
  if (type == "sphere") {
    s = Sphere{vec3_from_json(j.at("center")), j.at("radius").get<double>()};
  } else if (type == "capsule") {
    s = Capsule{vec3_from_json(j.at("p0")), vec3_from_json(j.at("p1")), j.at("radius").get<double>()};
  } else if (type == "box") {
    s = Box{vec3_from_json(j.at("center")), vec3_from_json(j.at("half_extents")),
            j.contains("quaternion") ? quat_from_json(j["quaternion"]) : Eigen::Quaterniond::Identity()};
  } else {
    throw ArgumentError("unknown shape type '" + type + "'");
  }
  validate_shape(s);
  return s;
}

inline json shape_to_json(const Shape& s) {
  struct V {
    json operator()(const Sphere& x) const {
      return {{"type", "sphere"}, {"center", vec3_to_json(x.center)}, {"radius", x.radius}};
    }
    json operator()(const Capsule& x) const {
      return {{"type", "capsule"}, {"p0", vec3_to_json(x.p0)}, {"p1", vec3_to_json(x.p1)}, {"radius", x.radius}};
    }
    json operator()(const Box& x) const {
      return {{"type", "box"}, {"center", vec3_to_json(x.center)}, {"half_extents", vec3_to_json(x.half_extents)},
              {"quaternion", quat_to_json(x.orientation)}};
    }
  };
  return std::visit(V{}, s);
}

inline std::string to_string(OrientationMode m) {
  return m == OrientationMode::fixed ? "fixed" : "free-about-tool-axis";
}

inline OrientationMode parse_orientation_mode(const std::string& s) {
  if (s == "fixed") return OrientationMode::fixed;
  if (s == "free-about-tool-axis") return OrientationMode::free_about_tool_axis;
  throw ArgumentError("unknown orientation_mode '" + s + "'");
}

/// {"position": [..], "quaternion": [w,x,y,z], "orientation_mode": .., "max_distinct_poses": n}
inline TaskGoal task_goal_from_json(const json& j) {
  TaskGoal g;
  g.target = pose_from_json(j);
  g.orientation_mode = parse_orientation_mode(j.value("orientation_mode", std::string("fixed")));
  g.max_distinct_poses = j.value("max_distinct_poses", 8);
  if (g.max_distinct_poses < 1) throw ArgumentError("max_distinct_poses must be >= 1");
  return g;
}

inline json task_goal_to_json(const TaskGoal& g) {
  json j = pose_to_json(g.target);
  j["orientation_mode"] = to_string(g.orientation_mode);
  j["max_distinct_poses"] = g.max_distinct_poses;
  return j;
}

/// Scene file: obstacles, a robot geometry reference and optional task goals.
inline json scene_to_json(const SceneBundle& bundle, const std::string& robot_ref) {
  json obstacles = json::array();
  for (const auto& s : bundle.scene.obstacles) obstacles.push_back(shape_to_json(s));
  json goals = json::array();
  for (const auto& g : bundle.goals) goals.push_back(task_goal_to_json(g));
  return {{"name", bundle.scene.name}, {"robot", robot_ref}, {"obstacles", obstacles}, {"goals", goals}};
}

inline SceneBundle scene_from_json(const json& j) {
  SceneBundle b;
  b.scene.name = j.value("name", std::string("scene"));
  for (const auto& o : j.at("obstacles")) b.scene.obstacles.push_back(shape_from_json(o));
  if (j.contains("goals")) {
    for (const auto& g : j["goals"]) b.goals.push_back(task_goal_from_json(g));
  }
  return b;
}

// ---- scene specs ---------------------------------------------------------------

inline SceneSpec scene_spec_from_json(const json& j) {
  SceneSpec s;
  const auto gen = j.at("generator").get<std::string>();
  if (gen == "cubicles") s.generator = SceneGenerator::cubicles;
  else if (gen == "vine") s.generator = SceneGenerator::vine;
  else if (gen == "file") s.generator = SceneGenerator::file;
  else throw ArgumentError("unknown scene generator '" + gen + "'");
  s.seed = j.value("seed", std::uint64_t{0});
  s.robot = j.value("robot", std::string("ur5"));
  s.file = j.value("file", std::string());
  if (j.contains("cubicles")) {
    const auto& c = j["cubicles"];
    auto& p = s.cubicles;
    p.rows = c.value("rows", p.rows);
    p.cols = c.value("cols", p.cols);
    p.cubicle_size = c.value("cubicle_size", p.cubicle_size);
    p.wall_thickness = c.value("wall_thickness", p.wall_thickness);
    p.front_distance = c.value("front_distance", p.front_distance);
    p.depth = c.value("depth", p.depth);
    p.center_height = c.value("center_height", p.center_height);
    p.goal_depth = c.value("goal_depth", p.goal_depth);
    p.grasp_offset = c.value("grasp_offset", p.grasp_offset);
    p.max_distinct_poses = c.value("max_distinct_poses", p.max_distinct_poses);
  }
  if (j.contains("vine")) {
    const auto& v = j["vine"];
    auto& p = s.vine;
    p.canes = v.value("canes", p.canes);
    p.cane_radius = v.value("cane_radius", p.cane_radius);
    p.cane_length_min = v.value("cane_length_min", p.cane_length_min);
    p.cane_length_max = v.value("cane_length_max", p.cane_length_max);
    p.plane_height = v.value("plane_height", p.plane_height);
    p.slab = v.value("slab", p.slab);
    p.region_x_min = v.value("region_x_min", p.region_x_min);
    p.region_x_max = v.value("region_x_max", p.region_x_max);
    p.region_y_min = v.value("region_y_min", p.region_y_min);
    p.region_y_max = v.value("region_y_max", p.region_y_max);
    p.standoff = v.value("standoff", p.standoff);
    p.back_wall = v.value("back_wall", p.back_wall);
    p.max_distinct_poses = v.value("max_distinct_poses", p.max_distinct_poses);
    p.min_feasible_poses = v.value("min_feasible_poses", p.min_feasible_poses);
  }
  s.validate();
  return s;
}

inline json scene_spec_to_json(const SceneSpec& s) {
  const auto& c = s.cubicles;
  const auto& v = s.vine;
  const char* gen = s.generator == SceneGenerator::cubicles ? "cubicles"
                    : s.generator == SceneGenerator::vine   ? "vine"
                                                            : "file";
  return {{"generator", gen},
          {"seed", s.seed},
          {"robot", s.robot},
          {"file", s.file},
          {"cubicles",
           {{"rows", c.rows}, {"cols", c.cols}, {"cubicle_size", c.cubicle_size}, {"wall_thickness", c.wall_thickness},
            {"front_distance", c.front_distance}, {"depth", c.depth}, {"center_height", c.center_height},
            {"goal_depth", c.goal_depth}, {"grasp_offset", c.grasp_offset}, {"max_distinct_poses", c.max_distinct_poses}}},
          {"vine",
           {{"canes", v.canes}, {"cane_radius", v.cane_radius}, {"cane_length_min", v.cane_length_min},
            {"cane_length_max", v.cane_length_max}, {"plane_height", v.plane_height}, {"slab", v.slab},
            {"region_x_min", v.region_x_min}, {"region_x_max", v.region_x_max}, {"region_y_min", v.region_y_min},
            {"region_y_max", v.region_y_max}, {"standoff", v.standoff}, {"back_wall", v.back_wall},
            {"max_distinct_poses", v.max_distinct_poses}, {"min_feasible_poses", v.min_feasible_poses}}}};
}

inline SceneSpec load_scene_spec(const std::filesystem::path& path) {
  auto spec = scene_spec_from_json(read_json_file(path));
  if (spec.generator == SceneGenerator::file && std::filesystem::path(spec.file).is_relative()) {
    spec.file = (path.parent_path() / spec.file).string();
  }
  return spec;
}

/// Runs the generator named by the spec (or loads its scene file).
inline SceneBundle build_scene(const SceneSpec& spec, const KinematicChain& chain, const RobotGeometry& robot) {
  switch (spec.generator) {
    case SceneGenerator::cubicles: return build_cubicles(spec, chain);
    case SceneGenerator::vine: return build_vine(spec, chain, robot);
    case SceneGenerator::file: return scene_from_json(read_json_file(spec.file));
  }
  throw ArgumentError("unhandled scene generator");
}

// ---- dynamics, configurations, results -----------------------------------------

inline JointDynamics dynamics_from_json(const json& j) {
  return {j.at("v_max").get<std::vector<double>>(), j.at("a_max").get<std::vector<double>>()};
}

inline json dynamics_to_json(const JointDynamics& d) { return {{"v_max", d.v_max}, {"a_max", d.a_max}}; }

inline json config_to_json(const Configuration& q) { return q.angles(); }

/// Either a JSON array of angles, a JSON file holding one, or "a,b,c".
inline Configuration parse_configuration(const std::string& text) {
  if (std::filesystem::exists(text)) {
    const auto j = read_json_file(text);
    return Configuration(j.is_object() ? j.at("angles").get<std::vector<double>>() : j.get<std::vector<double>>());
  }
  std::string t = text;
  if (!t.empty() && t.front() == '[') return Configuration(json::parse(t).get<std::vector<double>>());
  std::vector<double> v;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      throw ArgumentError("cannot parse configuration '" + text + "'");
    }
  }
  if (v.empty()) throw ArgumentError("empty configuration");
  return Configuration(std::move(v));
}

inline json goal_set_to_json(const GoalSet& set) {
  json ranked = json::array();
  for (std::size_t r = 1; r <= set.size(); ++r) {
    const auto idx = set.by_rank()[r - 1];
    ranked.push_back({{"rank", r}, {"distance", set.distance(idx)}, {"angles", config_to_json(set.configs()[idx])}});
  }
  return {{"start", config_to_json(set.start())}, {"size", set.size()}, {"goals", ranked}};
}

inline json plan_result_to_json(const PlanResult& r) {
  json wps = json::array();
  for (const auto& w : r.path.waypoints) wps.push_back(config_to_json(w));
  json trace = json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"elapsed_ms", t.elapsed_ms}, {"length", t.length}, {"goal_rank", t.goal_rank}, {"exec_time", t.exec_time}});
  }
  json j = {{"success", r.success},
            {"waypoints", wps},
            {"goal_rank", r.goal_rank},
            {"trace", trace},
            {"seed", r.seed},
            {"calibration", r.calibration},
            {"iterations", r.iterations},
            {"elapsed_ms", r.elapsed_ms},
            {"wall_ms", r.wall_ms},
            {"message", r.message}};
  j["length"] = r.success ? json(r.length) : json(nullptr);
  j["exec_time"] = r.success ? json(r.exec_time) : json(nullptr);
  return j;
}

}  // namespace redugoal
