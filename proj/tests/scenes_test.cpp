#include <gtest/gtest.h>

#include <set>

#include "redugoal/bench.hpp"
#include "redugoal/io.hpp"
#include "redugoal/scenes.hpp"

using namespace redugoal;

namespace {

SceneSpec vine_spec(std::uint64_t seed) {
  SceneSpec s;
  s.generator = SceneGenerator::vine;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(Cubicles, NineDistinctGoals) {
  const auto chain = load_chain("ur5-elbow-limited");
  const auto b = build_cubicles(SceneSpec{}, chain);
  ASSERT_EQ(b.goals.size(), 9u);
  std::set<std::tuple<double, double, double>> centers;
  for (const auto& g : b.goals) {
    centers.insert({g.target.position.x(), g.target.position.y(), g.target.position.z()});
    EXPECT_EQ(g.orientation_mode, OrientationMode::fixed);
    EXPECT_FALSE(analytic_ik_6r(chain, g.target).empty());
  }
  EXPECT_EQ(centers.size(), 9u);
  EXPECT_EQ(b.scene.obstacles.size(), 4u + 4u + 1u);
}

TEST(Cubicles, GraspPointSitsAtCubicleCenter) {
  const auto chain = load_chain("ur5");
  SceneSpec spec;
  const auto& c = spec.cubicles;
  const auto b = build_cubicles(spec, chain);
  const auto& g = b.goals[4];  // middle cubicle
  const Eigen::Vector3d grasp = g.target.position + c.grasp_offset * (g.target.orientation * Eigen::Vector3d::UnitZ());
  EXPECT_NEAR(grasp.x(), c.front_distance + c.goal_depth * c.depth, 1e-12);
  EXPECT_NEAR(grasp.y(), 0.0, 1e-12);
  EXPECT_NEAR(grasp.z(), c.center_height, 1e-12);
}

TEST(Cubicles, EveryCubicleHasEightCollisionFreePoses) {
  const auto chain = load_chain("ur5-elbow-limited");
  const auto robot = load_robot("ur5");
  const auto b = build_cubicles(SceneSpec{}, chain);
  const CollisionChecker checker(b.scene, robot, chain);
  for (const auto& g : b.goals) {
    EXPECT_EQ(distinct_pose_solutions(chain, g, 0, collision_free(checker)).size(), 8u);
    EXPECT_EQ(compute_goal_configurations(chain, g, Configuration(6, 0.0)).size(), 8u * 32u);
  }
}

TEST(Cubicles, InvalidSpecsRejected) {
  const auto chain = load_chain("ur5");
  SceneSpec s;
  s.cubicles.wall_thickness = 0.0;
  EXPECT_THROW(build_cubicles(s, chain), ArgumentError);
  s = SceneSpec{};
  s.cubicles.wall_thickness = 0.4;
  EXPECT_THROW(build_cubicles(s, chain), ArgumentError);
  s = SceneSpec{};
  s.cubicles.rows = 0;
  EXPECT_THROW(build_cubicles(s, chain), ArgumentError);
  s = SceneSpec{};
  s.cubicles.grasp_offset = -0.1;
  EXPECT_THROW(build_cubicles(s, chain), ArgumentError);
}

TEST(Cubicles, OutOfReachIsGenerationError) {
  SceneSpec s;
  s.cubicles.front_distance = 2.0;
  EXPECT_THROW(build_cubicles(s, load_chain("ur5")), GenerationError);
}

TEST(Vine, DeterministicPerSeed) {
  const auto chain = load_chain("ur5-vine");
  const auto robot = load_robot("ur5");
  const auto a = build_vine(vine_spec(3), chain, robot);
  const auto b = build_vine(vine_spec(3), chain, robot);
  EXPECT_EQ(scene_to_json(a, "ur5").dump(), scene_to_json(b, "ur5").dump());
  const auto c = build_vine(vine_spec(4), chain, robot);
  EXPECT_NE(scene_to_json(a, "ur5").dump(), scene_to_json(c, "ur5").dump());
}

TEST(Vine, KeptGoalsHaveCollisionFreePoseWithinPreset) {
  const auto chain = load_chain("ur5-vine");
  const auto robot = load_robot("ur5");
  const auto spec = vine_spec(5);
  const auto b = build_vine(spec, chain, robot);
  ASSERT_FALSE(b.goals.empty());
  EXPECT_EQ(b.scene.obstacles.size(), 41u);
  const CollisionChecker checker(b.scene, robot, chain);
  for (const auto& g : b.goals) {
    EXPECT_EQ(g.orientation_mode, OrientationMode::free_about_tool_axis);
    const auto poses = distinct_pose_solutions(chain, g, spec.seed, collision_free(checker));
    ASSERT_GE(poses.size(), 1u);
    for (const auto& q : poses) {
      EXPECT_GE(q[1], -kPi);
      EXPECT_LT(q[1], 0.0);
    }
    EXPECT_FALSE(compute_goal_configurations(chain, g, Configuration{0, -1, 0, 0, 0, 0}).empty());
  }
}

TEST(Vine, InvalidSpecsRejected) {
  auto s = vine_spec(1);
  s.vine.canes = 0;
  EXPECT_THROW(s.validate(), ArgumentError);
  s = vine_spec(1);
  s.vine.cane_radius = 0.0;
  EXPECT_THROW(s.validate(), ArgumentError);
  s = vine_spec(1);
  s.vine.region_x_max = s.vine.region_x_min;
  EXPECT_THROW(s.validate(), ArgumentError);
}

TEST(Vine, NoFeasibleCutIsGenerationError) {
  auto s = vine_spec(1);
  s.vine.canes = 3;
  s.vine.region_x_min = 1.5;
  s.vine.region_x_max = 1.6;
  EXPECT_THROW(build_vine(s, load_chain("ur5-vine"), load_robot("ur5")), GenerationError);
}
