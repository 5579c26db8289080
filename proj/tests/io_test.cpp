#include <gtest/gtest.h>

#include <filesystem>

#include "redugoal/io.hpp"

using namespace redugoal;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("redugoal-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(ChainIo, PresetsLoadAndRoundTrip) {
  for (const char* name : {"ur5", "ur5-elbow-limited", "ur5-vine"}) {
    const auto chain = load_chain(name);
    EXPECT_EQ(chain.name(), name);
    EXPECT_EQ(chain.dof(), 6u);
    const auto back = chain_from_json(chain_to_json(chain));
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_EQ(back.joint(i).limit_lo, chain.joint(i).limit_lo);
      EXPECT_EQ(back.joint(i).limit_hi, chain.joint(i).limit_hi);
      EXPECT_EQ(back.joint(i).dh.a, chain.joint(i).dh.a);
    }
  }
  EXPECT_EQ(load_chain("ur5-elbow-limited").joint(2).limit_lo, -kPi);
  EXPECT_EQ(load_chain("ur5-vine").joint(1).limit_hi, 0.0);
  EXPECT_THROW(load_chain("ur10"), ArgumentError);
}

TEST(ChainIo, LoadsFromPath) {
  const auto dir = scratch_dir("chain");
  write_text_file(dir / "c.json", chain_to_json(load_chain("ur5")).dump());
  EXPECT_EQ(load_chain((dir / "c.json").string()).dof(), 6u);
}

TEST(RobotIo, RoundTrip) {
  const auto r = load_robot("ur5");
  const auto back = robot_from_json(robot_to_json(r));
  ASSERT_EQ(back.link_capsules.size(), r.link_capsules.size());
  EXPECT_EQ(back.link_capsules[1].radius, r.link_capsules[1].radius);
  EXPECT_TRUE(r.self_check_pairs.empty());
}

TEST(SceneIo, ShapesRoundTrip) {
  const std::vector<Shape> shapes{Sphere{{1, 2, 3}, 0.5}, Capsule{{0, 0, 0}, {1, 0, 0}, 0.1},
                                  Box{{0, 1, 0}, {0.1, 0.2, 0.3}, Eigen::Quaterniond(0.5, 0.5, 0.5, 0.5)}};
  for (const auto& s : shapes) EXPECT_EQ(shape_to_json(shape_from_json(shape_to_json(s))), shape_to_json(s));
  EXPECT_THROW(shape_from_json(json{{"type", "cone"}}), ArgumentError);
  EXPECT_THROW(shape_from_json(json{{"type", "sphere"}, {"center", {0, 0, 0}}, {"radius", -1.0}}), ArgumentError);
}

TEST(SceneIo, FileGeneratorLoadsSavedScene) {
  const auto chain = load_chain("ur5");
  const auto robot = load_robot("ur5");
  const auto bundle = build_cubicles(SceneSpec{}, chain);
  const auto dir = scratch_dir("scene");
  write_text_file(dir / "shelf.json", scene_to_json(bundle, "ur5").dump(2));
  write_text_file(dir / "spec.json", json{{"generator", "file"}, {"file", "shelf.json"}}.dump());
  const auto spec = load_scene_spec(dir / "spec.json");
  const auto loaded = build_scene(spec, chain, robot);
  EXPECT_EQ(scene_to_json(loaded, "ur5"), scene_to_json(bundle, "ur5"));
}

TEST(SceneSpecIo, RoundTripAndShippedSpecs) {
  SceneSpec s;
  s.cubicles.rows = 2;
  s.cubicles.grasp_offset = 0.1;
  s.seed = 12;
  const auto back = scene_spec_from_json(scene_spec_to_json(s));
  EXPECT_EQ(scene_spec_to_json(back), scene_spec_to_json(s));
  const auto cub = load_scene_spec(data_dir() / "scenes" / "cubicles-3x3.json");
  EXPECT_EQ(cub.generator, SceneGenerator::cubicles);
  EXPECT_EQ(cub.cubicles.rows, 3);
  EXPECT_EQ(load_scene_spec(data_dir() / "scenes" / "vine-40.json").vine.canes, 40);
  EXPECT_THROW(scene_spec_from_json(json{{"generator", "forest"}}), ArgumentError);
  EXPECT_THROW(scene_spec_from_json(json{{"generator", "cubicles"}, {"cubicles", {{"wall_thickness", 0.0}}}}),
               ArgumentError);
}

TEST(ConfigIo, ParseForms) {
  EXPECT_EQ(parse_configuration("0.1,0.2,-3"), (Configuration{0.1, 0.2, -3.0}));
  EXPECT_EQ(parse_configuration("[1, 2]"), (Configuration{1.0, 2.0}));
  const auto dir = scratch_dir("config");
  write_text_file(dir / "q.json", R"({"angles": [0.5, 0.25]})");
  EXPECT_EQ(parse_configuration((dir / "q.json").string()), (Configuration{0.5, 0.25}));
  EXPECT_THROW(parse_configuration("a,b"), ArgumentError);
}

TEST(DynamicsIo, ShippedFileMatchesDefaults) {
  const auto d = dynamics_from_json(read_json_file(data_dir() / "dynamics" / "ur5.json"));
  const auto def = default_ur5_dynamics();
  EXPECT_EQ(d.v_max, def.v_max);
  EXPECT_EQ(d.a_max, def.a_max);
}

TEST(PlanResultIo, Fields) {
  PlanResult r;
  r.success = true;
  r.path.waypoints = {Configuration{0.0}, Configuration{1.0}};
  r.length = 1.0;
  r.exec_time = 2.0;
  r.goal_rank = 3;
  r.seed = 9;
  r.calibration = 8.0;
  r.trace.push_back({5.0, 1.0, 3, 2.0});
  const auto j = plan_result_to_json(r);
  EXPECT_EQ(j["waypoints"].size(), 2u);
  EXPECT_EQ(j["length"].get<double>(), 1.0);
  EXPECT_EQ(j["goal_rank"].get<int>(), 3);
  EXPECT_EQ(j["seed"].get<int>(), 9);
  EXPECT_EQ(j["calibration"].get<double>(), 8.0);
  EXPECT_EQ(j["trace"][0]["elapsed_ms"].get<double>(), 5.0);
  r.success = false;
  EXPECT_TRUE(plan_result_to_json(r)["length"].is_null());
}

TEST(Calibration, EnvironmentOverride) {
  ::setenv("REDUGOAL_CALIBRATION", "3.5", 1);
  EXPECT_EQ(calibration_constant(), 3.5);
  ::setenv("REDUGOAL_CALIBRATION", "junk", 1);
  EXPECT_EQ(calibration_constant(), kDefaultCalibration);
  ::unsetenv("REDUGOAL_CALIBRATION");
  EXPECT_EQ(calibration_constant(), kDefaultCalibration);
}
