#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "redugoal/io.hpp"
#include "redugoal/kinematics.hpp"
#include "test_util.hpp"

using namespace redugoal;
using redugoal::testing::planar_chain;
using redugoal::testing::random_config;

namespace {

// Independent 4x4 DH product, written out element by element.
using M4 = std::array<std::array<double, 4>, 4>;

M4 dh_matrix(double theta, double d, double a, double alpha) {
  const double ct = std::cos(theta), st = std::sin(theta), ca = std::cos(alpha), sa = std::sin(alpha);
  return {{{ct, -st * ca, st * sa, a * ct}, {st, ct * ca, -ct * sa, a * st}, {0, sa, ca, d}, {0, 0, 0, 1}}};
}

M4 mul(const M4& x, const M4& y) {
  M4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) r[i][j] += x[i][k] * y[k][j];
  return r;
}

std::vector<M4> oracle_frames(const KinematicChain& chain, const Configuration& q) {
  M4 t{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
  std::vector<M4> out;
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    const auto& dh = chain.joint(i).dh;
    t = mul(t, dh_matrix(q[i] + dh.theta_offset, dh.d, dh.a, dh.alpha));
    out.push_back(t);
  }
  return out;
}

}  // namespace

TEST(ForwardKinematics, PlanarStraight) {
  const auto chain = planar_chain(2);
  const auto p = forward_kinematics(chain, Configuration{0.0, 0.0});
  EXPECT_NEAR(p.position.x(), 2.0, 1e-12);
  EXPECT_NEAR(p.position.y(), 0.0, 1e-12);
  EXPECT_NEAR(p.position.z(), 0.0, 1e-12);
}

TEST(ForwardKinematics, PlanarQuarterTurn) {
  const auto p = forward_kinematics(planar_chain(2), Configuration{kPi / 2, 0.0});
  EXPECT_NEAR(p.position.x(), 0.0, 1e-12);
  EXPECT_NEAR(p.position.y(), 2.0, 1e-12);
}

TEST(ForwardKinematics, Ur5ZeroMatchesFrozenOracle) {
  const auto chain = load_chain("ur5");
  const auto p = forward_kinematics(chain, Configuration(6, 0.0));
  EXPECT_NEAR(p.position.x(), -0.81725, 1e-12);
  EXPECT_NEAR(p.position.y(), -0.19145, 1e-12);
  EXPECT_NEAR(p.position.z(), -0.005491, 1e-12);
}

TEST(ForwardKinematics, Ur5GenericMatchesFrozenOracle) {
  const auto chain = load_chain("ur5");
  const auto t = forward_transform(chain, Configuration{0.3, -1.2, 0.8, 0.4, -0.7, 1.9});
  EXPECT_NEAR(t.translation().x(), -0.390764547, 1e-9);
  EXPECT_NEAR(t.translation().y(), -0.301019939, 1e-9);
  EXPECT_NEAR(t.translation().z(), 0.543374956, 1e-9);
  EXPECT_NEAR(t.linear()(0, 2), 0.841470985, 1e-9);
  EXPECT_NEAR(t.linear()(2, 0), 0.946300088, 1e-9);
}

TEST(ForwardKinematics, DimensionMismatchThrows) {
  EXPECT_THROW(forward_kinematics(planar_chain(2), Configuration{0.0}), ArgumentError);
  EXPECT_THROW(link_frames(planar_chain(2), Configuration{0.0, 0.0, 0.0}), ArgumentError);
}

TEST(LinkFrames, PlanarZero) {
  const auto f = link_frames(planar_chain(2), Configuration{0.0, 0.0});
  ASSERT_EQ(f.size(), 2u);
  EXPECT_NEAR(f[0].translation().x(), 1.0, 1e-12);
  EXPECT_NEAR(f[1].translation().x(), 2.0, 1e-12);
}

TEST(LinkFrames, Ur5ZeroFrames) {
  const auto f = link_frames(load_chain("ur5"), Configuration(6, 0.0));
  const double expected[6][3] = {{0, 0, 0.089159},         {-0.425, 0, 0.089159},      {-0.81725, 0, 0.089159},
                                 {-0.81725, -0.10915, 0.089159}, {-0.81725, -0.10915, -0.005491},
                                 {-0.81725, -0.19145, -0.005491}};
  ASSERT_EQ(f.size(), 6u);
  for (int i = 0; i < 6; ++i) {
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(f[i].translation()[c], expected[i][c], 1e-12) << i << "," << c;
  }
}

TEST(LinkFrames, LastFrameIsForwardKinematics) {
  const auto chain = load_chain("ur5");
  std::mt19937_64 rng(3);
  for (int n = 0; n < 100; ++n) {
    const auto q = random_config(chain, rng);
    const auto f = link_frames(chain, q);
    const auto p = forward_kinematics(chain, q);
    EXPECT_LT((f.back().translation() - p.position).norm(), 1e-12);
  }
}

TEST(LinkFrames, AgreesWithMatrixProduct) {
  const auto chain = load_chain("ur5");
  std::mt19937_64 rng(5);
  for (int n = 0; n < 200; ++n) {
    const auto q = random_config(chain, rng);
    const auto f = link_frames(chain, q);
    const auto o = oracle_frames(chain, q);
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (int r = 0; r < 3; ++r) {
        EXPECT_NEAR(f[i].translation()[r], o[i][r][3], 1e-12);
        for (int c = 0; c < 3; ++c) EXPECT_NEAR(f[i].linear()(r, c), o[i][r][c], 1e-12);
      }
    }
  }
}

TEST(Equivalents, TwoJointExample) {
  const auto chain = planar_chain(2);
  const auto eq = equivalent_configurations(chain, Configuration{0.5, -1.0});
  ASSERT_EQ(eq.size(), 4u);
  std::set<std::pair<double, double>> got;
  for (const auto& q : eq) got.insert({q[0], q[1]});
  const std::set<std::pair<double, double>> want{
      {0.5, -1.0}, {0.5, -1.0 + kTwoPi}, {0.5 - kTwoPi, -1.0}, {0.5 - kTwoPi, -1.0 + kTwoPi}};
  EXPECT_EQ(got, want);
}

TEST(Equivalents, SingleTurnJointsGiveOnlyItself) {
  const auto chain = planar_chain(3, -kPi, kPi);
  const Configuration q{0.1, -3.0, 2.9};
  const auto eq = equivalent_configurations(chain, q);
  ASSERT_EQ(eq.size(), 1u);
  EXPECT_EQ(eq[0], q);
}

TEST(Equivalents, ElbowLimitedGives32) {
  const auto chain = load_chain("ur5-elbow-limited");
  std::mt19937_64 rng(9);
  for (int n = 0; n < 50; ++n) EXPECT_EQ(equivalent_configurations(chain, random_config(chain, rng)).size(), 32u);
}

TEST(Equivalents, OutOfLimitsThrows) {
  const auto chain = planar_chain(2, -kPi, kPi);
  EXPECT_THROW(equivalent_configurations(chain, Configuration{kPi, 0.0}), DomainError);
}

TEST(Equivalents, HalfOpenUpperLimit) {
  const auto chain = planar_chain(1, -kTwoPi, kTwoPi);
  const auto eq = equivalent_configurations(chain, Configuration{0.0});
  ASSERT_EQ(eq.size(), 2u);
  for (const auto& q : eq) EXPECT_LT(q[0], kTwoPi);
}

TEST(Equivalents, ClosureAndSeparation) {
  const auto chain = load_chain("ur5-vine");
  std::mt19937_64 rng(11);
  for (int n = 0; n < 100; ++n) {
    const auto q = random_config(chain, rng);
    const auto eq = equivalent_configurations(chain, q);
    EXPECT_NE(std::find(eq.begin(), eq.end(), q), eq.end());
    auto as_set = [](std::vector<Configuration> v) {
      std::set<std::vector<double>> s;
      for (auto& c : v) {
        std::vector<double> r;
        for (double x : c) r.push_back(std::round(x * 1e9) / 1e9);
        s.insert(r);
      }
      return s;
    };
    const auto member = eq[rng() % eq.size()];
    EXPECT_EQ(as_set(eq), as_set(equivalent_configurations(chain, member)));
    for (const auto& a : eq) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double turns = (a[i] - q[i]) / kTwoPi;
        EXPECT_NEAR(turns, std::round(turns), 1e-12);
      }
    }
  }
}

TEST(MaxEquivalentCount, Presets) {
  EXPECT_EQ(max_equivalent_count(load_chain("ur5")), 64u);
  EXPECT_EQ(max_equivalent_count(load_chain("ur5-elbow-limited")), 32u);
  EXPECT_EQ(max_equivalent_count(load_chain("ur5-vine")), 16u);
  EXPECT_EQ(max_equivalent_count(planar_chain(1, -kPi, kPi)), 1u);
}

TEST(MaxEquivalentCount, NonWholeSpanIsSupremum) {
  // 3 pi span: angles beyond +-pi/2 admit two placements, the rest one.
  const auto chain = planar_chain(1, -1.5 * kPi, 1.5 * kPi);
  EXPECT_EQ(max_equivalent_count(chain), 2u);
  EXPECT_EQ(equivalent_configurations(chain, Configuration{kPi}).size(), 2u);
  EXPECT_EQ(equivalent_configurations(chain, Configuration{0.0}).size(), 1u);
}

TEST(ConfigDistance, Basics) {
  EXPECT_DOUBLE_EQ(config_distance(Configuration{0.0, 0.0}, Configuration{3.0, 4.0}), 5.0);
  EXPECT_EQ(config_distance(Configuration{1.0, 2.0}, Configuration{1.0, 2.0}), 0.0);
  EXPECT_THROW(config_distance(Configuration{1.0}, Configuration{1.0, 2.0}), ArgumentError);
}

TEST(ConfigDistance, MetricAxioms) {
  const auto chain = load_chain("ur5");
  std::mt19937_64 rng(13);
  for (int n = 0; n < 1000; ++n) {
    const auto a = random_config(chain, rng), b = random_config(chain, rng), c = random_config(chain, rng);
    EXPECT_EQ(config_distance(a, b), config_distance(b, a));
    EXPECT_GT(config_distance(a, b), 0.0);
    EXPECT_LE(config_distance(a, c), config_distance(a, b) + config_distance(b, c) + 1e-12);
  }
}

TEST(Chain, RejectsBadLimits) {
  std::vector<JointModel> j(1);
  j[0].limit_lo = 1.0;
  j[0].limit_hi = 1.0;
  EXPECT_THROW(KinematicChain("bad", j), ArgumentError);
  j[0].limit_lo = -3.0 * kPi;
  j[0].limit_hi = 3.0 * kPi;
  EXPECT_THROW(KinematicChain("wide", j), ArgumentError);
  EXPECT_THROW(KinematicChain("empty", {}), ArgumentError);
}
