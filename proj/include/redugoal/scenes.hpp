#pragma once

// Desk-scale scene generators: a shelf of cubicles reached with a fixed tool
// orientation, and a field of thin vine canes cut with a free tool roll.

#include <Eigen/Geometry>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "redugoal/collision.hpp"
#include "redugoal/ik.hpp"
#include "redugoal/kinematics.hpp"

namespace redugoal {

enum class SceneGenerator { cubicles, vine, file };

struct CubicleParams {
  int rows = 3;
  int cols = 3;
  double cubicle_size = 0.30;
  double wall_thickness = 0.01;
  double front_distance = 0.55;  // arm base to shelf front face, along +x
  double depth = 0.30;
  double center_height = 0.10;   // z of the shelf's vertical center
  double goal_depth = 0.5;       // grasp point as a fraction of depth
  double grasp_offset = 0.14;    // grasp point ahead of the flange along the tool z axis
  int max_distinct_poses = 8;
};

struct VineParams {
  int canes = 40;
  double cane_radius = 0.005;
  double cane_length_min = 0.15;
  double cane_length_max = 0.35;
  double plane_height = 0.45;    // z of the vine plane
  double slab = 0.06;            // thickness of the slab the canes live in
  double region_x_min = 0.20;
  double region_x_max = 0.60;
  double region_y_min = -0.40;
  double region_y_max = 0.40;
  double standoff = 0.19;        // flange distance below the cut point
  bool back_wall = true;
  int max_distinct_poses = 5;
  int min_feasible_poses = 1;
};

struct SceneSpec {
  SceneGenerator generator = SceneGenerator::cubicles;
  CubicleParams cubicles;
  VineParams vine;
  std::string file;
  std::string robot = "ur5";
  std::uint64_t seed = 0;

  void validate() const {
    if (generator == SceneGenerator::cubicles) {
      const auto& c = cubicles;
      if (c.rows < 1 || c.cols < 1) throw ArgumentError("cubicle grid needs at least one row and column");
      if (!(c.cubicle_size > 0.0) || !(c.depth > 0.0)) throw ArgumentError("cubicle dimensions must be > 0");
      if (!(c.wall_thickness > 0.0)) throw ArgumentError("cubicle wall thickness must be > 0");
      if (!(c.wall_thickness < c.cubicle_size)) throw ArgumentError("wall thickness must be below cubicle size");
      if (!(c.goal_depth > 0.0 && c.goal_depth < 1.0)) throw ArgumentError("goal_depth must be in (0, 1)");
      if (c.max_distinct_poses < 1) throw ArgumentError("max_distinct_poses must be >= 1");
      if (c.grasp_offset < 0.0) throw ArgumentError("grasp_offset must be >= 0");
    } else if (generator == SceneGenerator::vine) {
      const auto& v = vine;
      if (v.canes < 1) throw ArgumentError("vine needs at least one cane");
      if (!(v.cane_radius > 0.0)) throw ArgumentError("cane radius must be > 0");
      if (!(v.cane_length_min > 0.0) || v.cane_length_max < v.cane_length_min) {
        throw ArgumentError("cane length range is invalid");
      }
      if (!(v.region_x_max > v.region_x_min) || !(v.region_y_max > v.region_y_min)) {
        throw ArgumentError("vine region is empty");
      }
      if (v.max_distinct_poses < 1 || v.min_feasible_poses < 1) throw ArgumentError("pose counts must be >= 1");
    } else if (file.empty()) {
      throw ArgumentError("file scene spec needs a path");
    }
  }
};

struct SceneBundle {
  Scene scene;
  std::vector<TaskGoal> goals;
};

/// Tool z axis pointing along +x (into the shelf), tool x axis pointing down.
inline Eigen::Quaterniond shelf_approach_orientation() {
  return Eigen::Quaterniond(Eigen::AngleAxisd(kPi / 2, Eigen::Vector3d::UnitY()));
}

inline SceneBundle build_cubicles(const SceneSpec& spec, const KinematicChain& chain) {
  spec.validate();
  const auto& c = spec.cubicles;
  SceneBundle out;
  out.scene.name = "cubicles-" + std::to_string(c.rows) + "x" + std::to_string(c.cols);

  const double width = c.cols * c.cubicle_size;
  const double height = c.rows * c.cubicle_size;
  const double y0 = -width / 2.0;
  const double z0 = c.center_height - height / 2.0;
  const double xc = c.front_distance + c.depth / 2.0;
  const double t = c.wall_thickness;

  for (int r = 0; r <= c.rows; ++r) {
    out.scene.obstacles.push_back(Box{{xc, 0.0, z0 + r * c.cubicle_size},
                                      {c.depth / 2.0, width / 2.0 + t / 2.0, t / 2.0},
                                      Eigen::Quaterniond::Identity()});
  }
  for (int k = 0; k <= c.cols; ++k) {
    out.scene.obstacles.push_back(Box{{xc, y0 + k * c.cubicle_size, c.center_height},
                                      {c.depth / 2.0, t / 2.0, height / 2.0 + t / 2.0},
                                      Eigen::Quaterniond::Identity()});
  }
  out.scene.obstacles.push_back(Box{{c.front_distance + c.depth + t / 2.0, 0.0, c.center_height},
                                    {t / 2.0, width / 2.0 + t / 2.0, height / 2.0 + t / 2.0},
                                    Eigen::Quaterniond::Identity()});

  for (int r = 0; r < c.rows; ++r) {
    for (int k = 0; k < c.cols; ++k) {
      TaskGoal g;
      const Eigen::Vector3d grasp(c.front_distance + c.goal_depth * c.depth, y0 + (k + 0.5) * c.cubicle_size,
                                  z0 + (r + 0.5) * c.cubicle_size);
      g.target.orientation = shelf_approach_orientation();
      g.target.position = grasp - c.grasp_offset * (g.target.orientation * Eigen::Vector3d::UnitZ());
      g.orientation_mode = OrientationMode::fixed;
      g.max_distinct_poses = c.max_distinct_poses;
      if (analytic_ik_6r(chain, g.target).empty()) {
        throw GenerationError("cubicle (" + std::to_string(r) + ", " + std::to_string(k) +
                              ") center is out of reach for chain '" + chain.name() + "'");
      }
      out.goals.push_back(g);
    }
  }
  return out;
}

/// Tool z axis along +z (toward the vine plane).
inline SceneBundle build_vine(const SceneSpec& spec, const KinematicChain& chain, const RobotGeometry& robot) {
  spec.validate();
  const auto& v = spec.vine;
  SceneBundle out;
  out.scene.name = "vine-" + std::to_string(v.canes);

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> ux(v.region_x_min, v.region_x_max);
  std::uniform_real_distribution<double> uy(v.region_y_min, v.region_y_max);
  std::uniform_real_distribution<double> uz(-v.slab / 2.0, v.slab / 2.0);
  std::uniform_real_distribution<double> heading(0.0, kPi);
  std::uniform_real_distribution<double> len(v.cane_length_min, v.cane_length_max);
  std::uniform_real_distribution<double> along(0.2, 0.8);

  std::vector<Capsule> canes;
  std::vector<Eigen::Vector3d> cuts;
  for (int i = 0; i < v.canes; ++i) {
    const Eigen::Vector3d mid(ux(rng), uy(rng), v.plane_height + uz(rng));
    const double h = heading(rng);
    const double l = len(rng);
    const double dz = uz(rng);
    const Eigen::Vector3d dir = Eigen::Vector3d(std::cos(h), std::sin(h), dz / std::max(l, 1e-9)).normalized();
    Capsule cane{mid - dir * (l / 2.0), mid + dir * (l / 2.0), v.cane_radius};
    const double f = along(rng);
    cuts.push_back(cane.p0 + f * (cane.p1 - cane.p0));
    canes.push_back(cane);
    out.scene.obstacles.push_back(cane);
  }
  if (v.back_wall) {
    // Mounting surface just below the base link.
    const double top = -0.07;
    out.scene.obstacles.push_back(Box{{0.0, 0.0, top - 0.02}, {1.5, 1.5, 0.02}, Eigen::Quaterniond::Identity()});
  }

  CollisionChecker checker(out.scene, robot, chain);
  CollisionChecker::Workspace ws;
  const ConfigPredicate free = [&](const Configuration& q) { return !checker.in_collision(q, ws); };
  for (const auto& cut : cuts) {
    TaskGoal g;
    g.target.position = cut - Eigen::Vector3d(0.0, 0.0, v.standoff);
    g.target.orientation = Eigen::Quaterniond::Identity();
    g.orientation_mode = OrientationMode::free_about_tool_axis;
    g.max_distinct_poses = v.max_distinct_poses;
    const auto poses = distinct_pose_solutions(chain, g, spec.seed, free);
    if (static_cast<int>(poses.size()) >= v.min_feasible_poses) out.goals.push_back(g);
  }
  if (out.goals.empty()) throw GenerationError("no vine cut has a collision-free arm pose");
  return out;
}

}  // namespace redugoal
